#include "smw/detkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smw {

Cplx cauchy_delta(const std::vector<Cplx>& x, const std::vector<Cplx>& y) {
  Cplx acc = vandermonde(x) * vandermonde(y);
  for (const Cplx& xi : x)
    for (const Cplx& yj : y) {
      const Cplx d = xi - yj;
      if (d == Cplx(0.0)) throw std::domain_error("cauchy_delta: coincident x_i and y_j");
      acc /= d;
    }
  return acc;
}

int half_pairs_parity(long n) {
  // n(n-1)/2 mod 2; n(n-1) is even for all integers n.
  long v = n * (n - 1) / 2;
  return static_cast<int>(((v % 2) + 2) % 2);
}

double cauchy_orientation(int N, int M) {
  const int par = (half_pairs_parity(N - M) + half_pairs_parity(M)) % 2;
  return par == 0 ? 1.0 : -1.0;
}

Cplx cauchy_delta_det(const std::vector<Cplx>& x, const std::vector<Cplx>& y) {
  const int N = static_cast<int>(x.size());
  const int M = static_cast<int>(y.size());
  if (M > N) throw std::invalid_argument("cauchy_delta_det: requires N >= M");
  if (N == 0) return Cplx(1.0);
  Mat m(N, N);
  // Monomial rows in decreasing power and fermionic rows in reversed order:
  // this orientation makes the determinant equal the product form directly.
  for (int k = 0; k < N - M; ++k)
    for (int i = 0; i < N; ++i) m(k, i) = std::pow(x[i], N - M - 1 - k);
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < N; ++i) m(N - M + j, i) = 1.0 / (x[i] - y[M - 1 - j]);
  return block_determinant(m).value;
}

Cplx cauchy_delta_oriented(const std::vector<Cplx>& x, const std::vector<Cplx>& y) {
  return cauchy_orientation(static_cast<int>(x.size()), static_cast<int>(y.size())) *
         cauchy_delta(x, y);
}

double barnes_g(int n) {
  if (n < 1) throw std::domain_error("barnes_g: n >= 1");
  double acc = 1.0, fact = 1.0;
  for (int i = 1; i <= n - 2; ++i) {
    fact *= i;
    acc *= fact;
  }
  return acc;
}

BlockDetSpec::Group BlockDetSpec::contiguous(const std::string& label, int count) {
  Group g;
  g.label = label;
  g.indices.resize(count);
  for (int i = 0; i < count; ++i) g.indices[i] = i + 1;
  return g;
}

int BlockDetSpec::rows_total() const {
  int n = 0;
  for (const auto& g : row_groups) n += static_cast<int>(g.indices.size());
  return n;
}

int BlockDetSpec::cols_total() const {
  int n = 0;
  for (const auto& g : col_groups) n += static_cast<int>(g.indices.size());
  return n;
}

Mat materialize(const BlockDetSpec& spec) {
  const int n = spec.rows_total();
  if (n != spec.cols_total()) throw std::invalid_argument("block spec is not square");
  Mat m(n, n);
  int r = 0;
  for (const auto& rg : spec.row_groups)
    for (int ri : rg.indices) {
      int c = 0;
      for (const auto& cg : spec.col_groups)
        for (int ci : cg.indices) m(r, c++) = spec.entry(rg.label, ri, cg.label, ci);
      ++r;
    }
  return m;
}

DetResult block_determinant(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("block_determinant: non-square");
  if (m.rows() == 0) return {Cplx(1.0), 1.0};
  Eigen::PartialPivLU<Mat> lu(m);
  DetResult res;
  res.value = lu.determinant();
  const auto diag = lu.matrixLU().diagonal();
  double mn = std::abs(diag(0)), mx = mn;
  for (Eigen::Index i = 1; i < diag.size(); ++i) {
    const double v = std::abs(diag(i));
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  res.conditioning = mx > 0.0 ? mn / mx : 0.0;
  return res;
}

DetResult block_determinant(const BlockDetSpec& spec) {
  return block_determinant(materialize(spec));
}

namespace {

const BlockDetSpec::DerivRule& find_rule(const BlockDetSpec& spec, const std::string& p) {
  auto it = spec.derivative_rules.find(p);
  if (it == spec.derivative_rules.end())
    throw std::invalid_argument("no derivative rule for parameter '" + p + "'");
  return it->second;
}

// Flat positions (within the spec's own axis) of the group members a rule touches.
std::vector<std::pair<int, int>> rule_slots(const BlockDetSpec& spec,
                                            const BlockDetSpec::DerivRule& rule) {
  std::vector<std::pair<int, int>> slots;  // (group #, position inside group)
  const auto& groups = rule.rows ? spec.row_groups : spec.col_groups;
  for (size_t g = 0; g < groups.size(); ++g) {
    bool touched = false;
    for (const auto& lbl : rule.groups) touched |= (groups[g].label == lbl);
    if (!touched) continue;
    for (size_t k = 0; k < groups[g].indices.size(); ++k)
      slots.emplace_back(static_cast<int>(g), static_cast<int>(k));
  }
  return slots;
}

BlockDetSpec bumped(BlockDetSpec spec, bool rows, int group, int pos, int by = 1) {
  auto& groups = rows ? spec.row_groups : spec.col_groups;
  groups[group].indices[pos] += by;
  return spec;
}

}  // namespace

Cplx leibniz_derivative(const BlockDetSpec& spec, const std::string& parameter, int order) {
  const auto& rule = find_rule(spec, parameter);
  const auto slots = rule_slots(spec, rule);
  if (order == 1) {
    Cplx acc = 0.0;
    for (const auto& [g, k] : slots)
      acc += block_determinant(bumped(spec, rule.rows, g, k)).value;
    return acc;
  }
  if (order == 2) {
    Cplx acc = 0.0;
    for (const auto& [g1, k1] : slots) {
      const BlockDetSpec once = bumped(spec, rule.rows, g1, k1);
      for (const auto& [g2, k2] : slots)
        acc += block_determinant(bumped(once, rule.rows, g2, k2)).value;
    }
    return acc;
  }
  throw std::invalid_argument("leibniz_derivative: order must be 1 or 2");
}

Cplx leibniz_mixed(const BlockDetSpec& spec, const std::string& p1, const std::string& p2) {
  const auto& r1 = find_rule(spec, p1);
  const auto& r2 = find_rule(spec, p2);
  Cplx acc = 0.0;
  for (const auto& [g1, k1] : rule_slots(spec, r1)) {
    const BlockDetSpec once = bumped(spec, r1.rows, g1, k1);
    for (const auto& [g2, k2] : rule_slots(once, r2))
      acc += block_determinant(bumped(once, r2.rows, g2, k2)).value;
  }
  return acc;
}

namespace {
Mat erase_rc(const Mat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int n = static_cast<int>(m.rows());
  Mat out(n - static_cast<int>(rows.size()), n - static_cast<int>(cols.size()));
  int rr = 0;
  for (int r = 0; r < n; ++r) {
    if (std::find(rows.begin(), rows.end(), r) != rows.end()) continue;
    int cc = 0;
    for (int c = 0; c < n; ++c) {
      if (std::find(cols.begin(), cols.end(), c) != cols.end()) continue;
      out(rr, cc++) = m(r, c);
    }
    ++rr;
  }
  return out;
}
}  // namespace

Cplx minor_det(const Mat& m, int row, int col) {
  return block_determinant(erase_rc(m, {row}, {col})).value;
}

Cplx minor_det2(const Mat& m, int r1, int r2, int c1, int c2) {
  return block_determinant(erase_rc(m, {r1, r2}, {c1, c2})).value;
}

Cplx jacobi_residual(const Mat& m, int i, int j, int k, int l) {
  if (m.rows() < 2) throw std::invalid_argument("jacobi_residual: size >= 2 required");
  if (i == j || k == l) throw std::invalid_argument("jacobi_residual: need distinct rows and columns");
  if (i > j) std::swap(i, j);  // the identity is stated for sorted index pairs
  if (k > l) std::swap(k, l);
  const Cplx D = block_determinant(m).value;
  const Cplx Dij = minor_det2(m, i - 1, j - 1, k - 1, l - 1);
  const Cplx Dik = minor_det(m, i - 1, k - 1);
  const Cplx Djl = minor_det(m, j - 1, l - 1);
  const Cplx Dil = minor_det(m, i - 1, l - 1);
  const Cplx Djk = minor_det(m, j - 1, k - 1);
  return D * Dij - (Dik * Djl - Dil * Djk);
}

double jacobi_scale(const Mat& m, int i, int j, int k, int l) {
  if (i > j) std::swap(i, j);
  if (k > l) std::swap(k, l);
  const Cplx D = block_determinant(m).value;
  const Cplx Dij = minor_det2(m, i - 1, j - 1, k - 1, l - 1);
  const Cplx Dik = minor_det(m, i - 1, k - 1);
  const Cplx Djl = minor_det(m, j - 1, l - 1);
  const Cplx Dil = minor_det(m, i - 1, l - 1);
  const Cplx Djk = minor_det(m, j - 1, k - 1);
  return std::max({std::abs(D * Dij), std::abs(Dik * Djl), std::abs(Dil * Djk), 1e-30});
}

}  // namespace smw

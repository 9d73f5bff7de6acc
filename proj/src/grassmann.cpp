#include "smw/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "smw/quad.hpp"
#include "smw/partition.hpp"

namespace smw {

namespace {

int merge_inversions(uint32_t s, uint32_t t) {
  // Number of pairs (i in s, j in t) with i > j.
  int inv = 0;
  for (uint32_t rest = t; rest; rest &= rest - 1) {
    const int bit = std::countr_zero(rest);
    inv += std::popcount(s >> (bit + 1));
  }
  return inv;
}

}  // namespace

GrassmannElement::GrassmannElement(int generators) : n_(generators) {
  if (n_ < 0 || n_ > 16) throw std::invalid_argument("grassmann: 0 <= generators <= 16");
  dense_ = n_ <= 8;
  if (dense_) dense_coeffs_.assign(size_t{1} << n_, Cplx(0.0));
}

GrassmannElement GrassmannElement::scalar(int generators, Cplx value) {
  GrassmannElement g(generators);
  g.set_coeff(0, value);
  return g;
}

GrassmannElement GrassmannElement::generator(int generators, int index) {
  if (index < 1 || index > generators) throw std::invalid_argument("grassmann: bad generator");
  GrassmannElement g(generators);
  g.set_coeff(1u << (index - 1), Cplx(1.0));
  return g;
}

Cplx GrassmannElement::coeff(uint32_t mask) const {
  if (dense_) return dense_coeffs_[mask];
  auto it = sparse_coeffs_.find(mask);
  return it == sparse_coeffs_.end() ? Cplx(0.0) : it->second;
}

void GrassmannElement::set_coeff(uint32_t mask, Cplx value) {
  if (dense_) {
    dense_coeffs_[mask] = value;
    return;
  }
  if (value == Cplx(0.0))
    sparse_coeffs_.erase(mask);
  else
    sparse_coeffs_[mask] = value;
}

void GrassmannElement::for_each(const std::function<void(uint32_t, Cplx)>& f) const {
  if (dense_) {
    for (uint32_t m = 0; m < dense_coeffs_.size(); ++m)
      if (dense_coeffs_[m] != Cplx(0.0)) f(m, dense_coeffs_[m]);
  } else {
    for (const auto& [m, c] : sparse_coeffs_) f(m, c);
  }
}

GrassmannElement GrassmannElement::operator+(const GrassmannElement& o) const {
  GrassmannElement out = *this;
  out += o;
  return out;
}

GrassmannElement& GrassmannElement::operator+=(const GrassmannElement& o) {
  if (n_ != o.n_) throw std::invalid_argument("grassmann: algebra mismatch");
  o.for_each([&](uint32_t m, Cplx c) { set_coeff(m, coeff(m) + c); });
  return *this;
}

GrassmannElement GrassmannElement::operator-(const GrassmannElement& o) const {
  return *this + o * Cplx(-1.0);
}

GrassmannElement GrassmannElement::operator*(Cplx s) const {
  GrassmannElement out(n_);
  for_each([&](uint32_t m, Cplx c) { out.set_coeff(m, c * s); });
  return out;
}

GrassmannElement GrassmannElement::operator*(const GrassmannElement& o) const {
  if (n_ != o.n_) throw std::invalid_argument("grassmann: algebra mismatch");
  GrassmannElement out(n_);
  for_each([&](uint32_t ma, Cplx ca) {
    o.for_each([&](uint32_t mb, Cplx cb) {
      if (ma & mb) return;  // repeated generator
      const int inv = merge_inversions(ma, mb);
      const double sign = (inv % 2 == 0) ? 1.0 : -1.0;
      const uint32_t m = ma | mb;
      out.set_coeff(m, out.coeff(m) + sign * ca * cb);
    });
  });
  return out;
}

bool GrassmannElement::is_zero(double tol) const {
  bool zero = true;
  for_each([&](uint32_t, Cplx c) { zero = zero && std::abs(c) <= tol; });
  return zero;
}

int GrassmannElement::top_degree() const {
  int deg = 0;
  for_each([&](uint32_t m, Cplx) { deg = std::max(deg, std::popcount(m)); });
  return deg;
}

GrassmannElement GrassmannElement::exp() const {
  GrassmannElement soul = *this;
  soul.set_coeff(0, Cplx(0.0));
  GrassmannElement acc = scalar(n_, Cplx(1.0));
  GrassmannElement power = scalar(n_, Cplx(1.0));
  double fact = 1.0;
  for (int k = 1; k <= n_; ++k) {
    power = power * soul;
    if (power.is_zero()) break;
    fact *= k;
    acc += power * Cplx(1.0 / fact);
  }
  return acc * std::exp(body());
}

GrassmannElement GrassmannElement::inverse() const {
  const Cplx b = body();
  if (b == Cplx(0.0)) throw std::domain_error("grassmann: inverse of a soul-only element");
  GrassmannElement soul = *this;
  soul.set_coeff(0, Cplx(0.0));
  const GrassmannElement ratio = soul * (Cplx(-1.0) / b);
  GrassmannElement acc = scalar(n_, Cplx(1.0));
  GrassmannElement power = scalar(n_, Cplx(1.0));
  for (int k = 1; k <= n_; ++k) {
    power = power * ratio;
    if (power.is_zero()) break;
    acc += power;
  }
  return acc * (Cplx(1.0) / b);
}

GrassmannElement berezin_integrate(const GrassmannElement& g, const std::vector<int>& gens) {
  // Iterated integral over dtheta_{i_k} ... dtheta_{i_1} with ascending i_1 <
  // ... < i_k (the lowest index sits innermost). The single integral extracts
  // the coefficient of theta_i commuted to the leftmost position, so
  // integrating theta_i * (theta_i-free) returns the cofactor unchanged; the
  // iterated integrals are applied from the highest index down, which fixes
  // the sign convention (dtheta_2 dtheta_1 on theta_1 theta_2 gives -1).
  std::vector<int> order = gens;
  std::sort(order.begin(), order.end(), std::greater<int>());
  GrassmannElement cur = g;
  for (int idx : order) {
    GrassmannElement next(g.generators());
    const uint32_t bit = 1u << (idx - 1);
    cur.for_each([&](uint32_t m, Cplx c) {
      if (!(m & bit)) return;
      const int below = std::popcount(m & (bit - 1));
      const double sign = (below % 2 == 0) ? 1.0 : -1.0;
      next.set_coeff(m & ~bit, next.coeff(m & ~bit) + sign * c);
    });
    cur = next;
  }
  return cur;
}

SuperMatrix::SuperMatrix(int nb_, int nf_, int generators)
    : nb(nb_), nf(nf_), entries((nb_ + nf_) * (nb_ + nf_), GrassmannElement(generators)) {}

GrassmannElement& SuperMatrix::at(int r, int c) { return entries[r * dim() + c]; }
const GrassmannElement& SuperMatrix::at(int r, int c) const { return entries[r * dim() + c]; }

SuperMatrix SuperMatrix::operator*(const SuperMatrix& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("supermatrix: size mismatch");
  SuperMatrix out(nb, nf, entries.front().generators());
  for (int r = 0; r < dim(); ++r)
    for (int c = 0; c < dim(); ++c) {
      GrassmannElement acc(entries.front().generators());
      for (int k = 0; k < dim(); ++k) acc += at(r, k) * o.at(k, c);
      out.at(r, c) = acc;
    }
  return out;
}

SuperMatrix SuperMatrix::diag_numeric(int nb_, int nf_, int generators,
                                      const std::vector<Cplx>& values) {
  SuperMatrix m(nb_, nf_, generators);
  for (int i = 0; i < nb_ + nf_; ++i) m.at(i, i) = GrassmannElement::scalar(generators, values[i]);
  return m;
}

GrassmannElement str(const SuperMatrix& m) {
  GrassmannElement acc(m.entries.front().generators());
  for (int i = 0; i < m.nb; ++i) acc += m.at(i, i);
  for (int j = 0; j < m.nf; ++j) acc += m.at(m.nb + j, m.nb + j) * Cplx(-1.0);
  return acc;
}

namespace {

// Determinant over commuting (even) Grassmann entries by Leibniz expansion;
// block sizes here stay tiny.
GrassmannElement even_det(const std::vector<GrassmannElement>& a, int n, int gens) {
  if (n == 0) return GrassmannElement::scalar(gens, Cplx(1.0));
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  GrassmannElement acc(gens);
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inv;
    GrassmannElement term = GrassmannElement::scalar(gens, (inv % 2 == 0) ? 1.0 : -1.0);
    for (int i = 0; i < n; ++i) term = term * a[i * n + perm[i]];
    acc += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

}  // namespace

GrassmannElement sdet(const SuperMatrix& m) {
  const int gens = m.entries.front().generators();
  const int nb = m.nb, nf = m.nf;
  // D inverse via the adjugate over the even subalgebra.
  std::vector<GrassmannElement> D(nf * nf, GrassmannElement(gens));
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) D[i * nf + j] = m.at(nb + i, nb + j);
  const GrassmannElement detD = even_det(D, nf, gens);
  if (detD.body() == Cplx(0.0)) throw std::domain_error("sdet: fermion block body singular");
  const GrassmannElement detD_inv = detD.inverse();

  std::vector<GrassmannElement> adj(nf * nf, GrassmannElement(gens));
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) {
      std::vector<GrassmannElement> minor;
      minor.reserve((nf - 1) * (nf - 1));
      for (int r = 0; r < nf; ++r) {
        if (r == i) continue;
        for (int c = 0; c < nf; ++c) {
          if (c == j) continue;
          minor.push_back(D[r * nf + c]);
        }
      }
      GrassmannElement cof = even_det(minor, nf - 1, gens);
      if ((i + j) % 2 == 1) cof = cof * Cplx(-1.0);
      adj[j * nf + i] = cof;  // transposed cofactor
    }

  // Schur complement A - B D^{-1} C.
  std::vector<GrassmannElement> schur(nb * nb, GrassmannElement(gens));
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      GrassmannElement acc = m.at(i, j);
      for (int r = 0; r < nf; ++r)
        for (int c = 0; c < nf; ++c) {
          // B_{i r} (D^{-1})_{r c} C_{c j}
          acc = acc - m.at(i, nb + r) * (adj[r * nf + c] * detD_inv) * m.at(nb + c, j);
        }
      schur[i * nb + j] = acc;
    }
  return even_det(schur, nb, gens) * detD_inv;
}

Z11Report z11_direct(const Potential& pot, const WeightScheme& scheme, double a, double b,
                     int order) {
  if (pot.degree() != 2 || pot.coefficients[0] != 0.0 || pot.coefficients[1] != 0.0 ||
      scheme.mode != WeightMode::FlipSign)
    throw std::invalid_argument("z11_direct: Gaussian flip-sign only");

  const int gens = 2;
  const GrassmannElement xi = GrassmannElement::generator(gens, 1);
  const GrassmannElement xi_dag = GrassmannElement::generator(gens, 2);
  const double hbar = pot.hbar;
  const double c2 = pot.coefficients[2];  // W = c2 x^2

  const QuadratureRule rule = default_rule_for(pot, RuleKind::GaussHermiteMapped, order);

  Cplx total = 0.0, bosonic = 0.0;
  for (int ix = 0; ix < rule.order; ++ix) {
    for (int iy = 0; iy < rule.order; ++iy) {
      const double x = rule.nodes(ix), y = rule.nodes(iy);
      // Z with the I_{1,1} insertion applied to the quadratic action:
      // c2 * Str((I Z)^2) with I = diag(1, i).
      SuperMatrix IZ(1, 1, gens);
      IZ.at(0, 0) = GrassmannElement::scalar(gens, Cplx(x, 0.0));
      IZ.at(0, 1) = xi;
      IZ.at(1, 0) = xi_dag * Cplx(0.0, 1.0);
      IZ.at(1, 1) = GrassmannElement::scalar(gens, Cplx(0.0, 1.0) * y);
      const GrassmannElement strW = str(IZ * IZ) * Cplx(c2, 0.0);
      // Source term Str(Z C) with C = diag(a, b).
      const GrassmannElement src =
          GrassmannElement::scalar(gens, Cplx(x * a - y * b, 0.0));
      const GrassmannElement action = src - strW * Cplx(1.0 / hbar, 0.0);

      // Log-domain: pull the body out, expand the nilpotent rest exactly.
      GrassmannElement soul = action;
      soul.set_coeff(0, Cplx(0.0));
      const Cplx body_weight =
          std::exp(action.body() + rule.log_weights(ix) + rule.log_weights(iy));
      const GrassmannElement expanded = soul.exp();  // soul only: body handled above

      const GrassmannElement berezin = berezin_integrate(expanded, {1, 2});
      total += body_weight * berezin.body();
      bosonic += body_weight;
    }
  }

  Z11Report rep;
  rep.value = total;
  rep.bosonic_truncation = bosonic;

  AuxKernels kern(pot, scheme);
  rep.eigen_value = z_source(kern, SourceSpec({a}, {b})).value;
  rep.ratio = rep.value / rep.eigen_value;
  return rep;
}

}  // namespace smw

#include "smw/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "smw/detkit.hpp"

namespace smw {

uint64_t CounterRng::mix(uint64_t seed, uint64_t counter) {
  // splitmix64 finalizer on the (seed, counter) stream position.
  uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double CounterRng::uniform(uint64_t seed, uint64_t counter) {
  return (static_cast<double>(mix(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::normal_pair(uint64_t seed, uint64_t pair_index) {
  const double u1 = uniform(seed, 2 * pair_index);
  const double u2 = uniform(seed, 2 * pair_index + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

double CounterRng::normal(uint64_t seed, uint64_t pair_index) {
  return normal_pair(seed, pair_index).first;
}

namespace {

std::vector<Cplx> to_cplx(const std::vector<double>& v) {
  return std::vector<Cplx>(v.begin(), v.end());
}

}  // namespace

Cplx eigenvalue_integral(const AuxKernels& kern, const SourceSpec& src,
                         const std::optional<ChPolySpec>& ch, RuleKind rule, int order) {
  const int N = src.N(), M = src.M();
  if (N + M > 4) throw std::invalid_argument("eigenvalue_integral: N + M <= 4");
  const Potential& pot = kern.potential();

  // Tilt range actually used, so the grid is no wider than necessary.
  double amax = 1.0;
  for (double v : src.a) amax = std::max(amax, std::abs(v));
  for (double v : src.b) amax = std::max(amax, std::abs(v));
  if (ch) {
    for (const Cplx& l : ch->lambda) amax = std::max(amax, std::abs(l.real()));
    for (const Cplx& m : ch->mu) amax = std::max(amax, std::abs(m.real()));
  }
  const QuadratureRule r = default_rule_for(pot, rule, order, amax + 0.5);
  const int n = r.order;

  // Split contours: bosonic dimensions run below the real axis and fermionic
  // ones above it, which doubles the distance of the grids from the Cauchy
  // poles (the integrals are contour independent). The bosonic side bends away
  // from the mu poles.
  const double lift = contour_lift(pot, kern.scheme());
  double bos_side = -1.0;
  if (ch) {
    for (const Cplx& m : ch->mu)
      if (m.imag() < 0.0) bos_side = 1.0;
    for (const Cplx& m : ch->mu)
      if (std::abs(m.imag() - bos_side * lift) < 0.2 * lift)
        throw std::runtime_error("eigenvalue_integral: mu too close to the bosonic contour");
  }

  std::vector<Eigen::ArrayXcd> fx(N), fy(M);
  Eigen::ArrayXcd xs(n), ys(n);
  for (int k = 0; k < n; ++k) {
    const double t = r.nodes(k);
    xs(k) = Cplx(t, bos_side * lift);
    ys(k) = Cplx(t, lift);
  }
  for (int i = 0; i < N; ++i) {
    fx[i].resize(n);
    for (int k = 0; k < n; ++k)
      fx[i](k) = std::exp(Cplx(r.log_weights(k), 0.0) - pot(xs(k)) / pot.hbar + xs(k) * src.a[i]);
  }
  for (int j = 0; j < M; ++j) {
    fy[j].resize(n);
    for (int k = 0; k < n; ++k)
      fy[j](k) = std::exp(Cplx(r.log_weights(k), 0.0) +
                          log_fermionic_weight_at(pot, kern.scheme(), ys(k)) - ys(k) * src.b[j]);
  }

  const int dims = N + M;
  std::vector<int> idx(dims, 0);
  std::vector<Cplx> xv(N), yv(M);
  Cplx total = 0.0;
  const bool with_ch = ch.has_value() && (ch->p() + ch->q() > 0);

  auto integrand = [&]() {
    Cplx val = cauchy_delta(xv, yv);
    if (with_ch) {
      for (const Cplx& l : ch->lambda) {
        for (const Cplx& x : xv) val *= (l - x);
        for (const Cplx& y : yv) val /= (l - y);
      }
      for (const Cplx& m : ch->mu) {
        for (const Cplx& y : yv) val *= (m - y);
        for (const Cplx& x : xv) val /= (m - x);
      }
    }
    return val;
  };

  // Odometer over the tensor grid; innermost dimension handled in bulk.
  while (true) {
    for (int i = 0; i < N; ++i) xv[i] = xs(idx[i]);
    for (int j = 0; j < M; ++j) yv[j] = ys(idx[N + j]);

    Cplx outer = 1.0;
    for (int d = 0; d < dims - 1; ++d)
      outer *= (d < N) ? fx[d](idx[d]) : fy[d - N](idx[N + (d - N)]);

    Cplx inner = 0.0;
    if (dims - 1 < N) {
      const int d = dims - 1;
      for (int k = 0; k < n; ++k) {
        xv[d] = xs(k);
        inner += fx[d](k) * integrand();
      }
    } else {
      const int d = dims - 1 - N;
      for (int k = 0; k < n; ++k) {
        yv[d] = ys(k);
        inner += fy[d](k) * integrand();
      }
    }
    total += outer * inner;

    int d = dims - 2;
    while (d >= 0) {
      if (++idx[d] < n) break;
      idx[d] = 0;
      --d;
    }
    if (d < 0) break;
  }

  return total / cauchy_delta(to_cplx(src.a), to_cplx(src.b));
}

Cplx hciz_closed(const std::vector<double>& x, const std::vector<double>& a) {
  const int N = static_cast<int>(x.size());
  if (static_cast<int>(a.size()) != N) throw std::invalid_argument("hciz_closed: size mismatch");
  Mat m(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m(i, j) = std::exp(x[i] * a[j]);
  double cn = 1.0, fact = 1.0;
  for (int k = 1; k < N; ++k) {
    fact *= k;
    cn *= fact;
  }
  return cn * block_determinant(m).value /
         (vandermonde(to_cplx(x)) * vandermonde(to_cplx(a)));
}

namespace {

Mat haar_unitary(int N, uint64_t seed, uint64_t sample) {
  Mat g(N, N);
  uint64_t ctr = sample * static_cast<uint64_t>(N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const auto [re, im] = CounterRng::normal_pair(seed, ctr++);
      g(i, j) = Cplx(re, im);
    }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat Q = qr.householderQ();
  const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) {
    const Cplx r = R(j, j);
    const Cplx phase = r / std::abs(r);
    Q.col(j) *= phase;
  }
  return Q;
}

}  // namespace

McEstimate haar_hciz_mc(const std::vector<double>& x, const std::vector<double>& a, long samples,
                        uint64_t seed) {
  const int N = static_cast<int>(x.size());
  if (N < 2 || N > 3) throw std::invalid_argument("haar_hciz_mc: N in {2,3}");
  if (static_cast<int>(a.size()) != N) throw std::invalid_argument("haar_hciz_mc: size mismatch");
  bool x_zero = true;
  for (double v : x) x_zero = x_zero && v == 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j)
      if ((!x_zero && x[i] == x[j]) || a[i] == a[j])
        throw std::domain_error("haar_hciz_mc: degenerate eigenvalues");

  Eigen::VectorXcd xd(N), ad(N);
  for (int i = 0; i < N; ++i) {
    xd(i) = x[i];
    ad(i) = a[i];
  }
  Cplx sum = 0.0;
  double sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    const Mat U = haar_unitary(N, seed, static_cast<uint64_t>(s));
    // Tr X U A U^dagger with diagonal X, A.
    Cplx tr = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) tr += xd(i) * U(i, j) * ad(j) * std::conj(U(i, j));
    const Cplx v = std::exp(tr);
    sum += v;
    sum_sq += std::norm(v);
  }
  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.mean = sum / static_cast<double>(samples);
  const double var =
      std::max(0.0, sum_sq / samples - std::norm(est.mean));
  est.stderr_ = std::sqrt(var / samples);
  return est;
}

McEstimate hermitian_mc(const Potential& pot, const std::vector<double>& a,
                        const std::optional<ChPolySpec>& ch, long samples, uint64_t seed) {
  // Exact sampling needs the Gaussian potential W = x^2/2.
  if (pot.degree() != 2 || pot.coefficients[2] != 0.5 || pot.coefficients[0] != 0.0 ||
      pot.coefficients[1] != 0.0)
    throw std::invalid_argument("hermitian_mc: Gaussian potential required");
  const int N = static_cast<int>(a.size());
  if (N < 1 || N > 4) throw std::invalid_argument("hermitian_mc: N <= 4");
  const double hb = pot.hbar;

  Cplx sum = 0.0;
  double sum_sq = 0.0;
  const uint64_t per_sample = static_cast<uint64_t>(N * N);
  for (long s = 0; s < samples; ++s) {
    uint64_t ctr = static_cast<uint64_t>(s) * per_sample;
    Mat X = Mat::Zero(N, N);
    for (int i = 0; i < N; ++i) {
      for (int j = i; j < N; ++j) {
        const auto [g1, g2] = CounterRng::normal_pair(seed, ctr++);
        if (i == j)
          X(i, i) = hb * a[i] + std::sqrt(hb) * g1;
        else {
          const Cplx off = std::sqrt(hb / 2.0) * Cplx(g1, g2);
          X(i, j) = off;
          X(j, i) = std::conj(off);
        }
      }
    }
    Cplx v = 1.0;
    if (ch) {
      for (const Cplx& l : ch->lambda)
        v *= block_determinant(Mat(l * Mat::Identity(N, N) - X)).value;
      for (const Cplx& m : ch->mu)
        v /= block_determinant(Mat(m * Mat::Identity(N, N) - X)).value;
    }
    sum += v;
    sum_sq += std::norm(v);
  }
  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sum_sq / samples - std::norm(est.mean));
  est.stderr_ = std::sqrt(var / samples);
  return est;
}

}  // namespace smw

#include "smw/quad.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace smw {

QuadratureRule QuadratureRule::gauss_hermite_mapped(int order, double center, double scale) {
  if (order < 8) throw std::invalid_argument("quadrature order must be >= 8");
  // Golub-Welsch on the Hermite Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    J(k, k - 1) = off;
    J(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  QuadratureRule r;
  r.kind = RuleKind::GaussHermiteMapped;
  r.order = order;
  r.center = center;
  r.scale = scale;
  r.nodes.resize(order);
  r.log_weights.resize(order);
  for (int k = 0; k < order; ++k) {
    const double t = es.eigenvalues()(k);
    r.nodes(k) = center + scale * t;
    // Gauss weight divided by e^{-t^2} via the Christoffel function of the
    // weighted orthonormal Hermite functions q_j = p_j e^{-t^2/2}; these stay
    // bounded, so the edge weights come out clean at high order (the raw
    // eigenvector components underflow into noise there).
    double q_prev = 0.0;
    double q = std::pow(M_PI, -0.25) * std::exp(-0.5 * t * t);
    double sum = q * q;
    for (int j = 0; j < order - 1; ++j) {
      const double q_next = (t * q - std::sqrt(j / 2.0) * q_prev) / std::sqrt((j + 1) / 2.0);
      q_prev = q;
      q = q_next;
      sum += q * q;
    }
    r.log_weights(k) = -std::log(sum) + std::log(scale);
  }
  return r;
}

QuadratureRule QuadratureRule::tanh_sinh(int order, double center, double halfwidth) {
  if (order < 8) throw std::invalid_argument("quadrature order must be >= 8");
  QuadratureRule r;
  r.kind = RuleKind::TanhSinh;
  r.order = order;
  r.center = center;
  r.scale = halfwidth;
  r.nodes.resize(order);
  r.log_weights.resize(order);
  const double tmax = 3.2;  // double-exponential cutoff
  const double h = 2.0 * tmax / (order - 1);
  const double half_pi = M_PI / 2.0;
  for (int k = 0; k < order; ++k) {
    const double t = -tmax + k * h;
    const double s = half_pi * std::sinh(t);
    const double u = std::tanh(s);  // in (-1, 1)
    const double dudt = half_pi * std::cosh(t) / (std::cosh(s) * std::cosh(s));
    r.nodes(k) = center + halfwidth * u;
    r.log_weights(k) = std::log(h * halfwidth * dudt);
  }
  return r;
}

double QuadratureRule::gaussian_defect() const {
  double acc = 0.0;
  for (int k = 0; k < nodes.size(); ++k) {
    const double t = (nodes(k) - center) / scale;
    acc += std::exp(log_weights(k) - t * t);
  }
  const double exact = scale * std::sqrt(M_PI);
  return std::abs(acc - exact) / exact;
}

QuadratureRule default_rule_for(const Potential& pot, RuleKind kind, int order, double a_max) {
  // Support radius: W(x)/hbar - a_max*|x| ~ 45 on the positive side.
  double r = pot.natural_scale();
  for (int it = 0; it < 400; ++it) {
    if (pot(r) / pot.hbar - a_max * r > 45.0) break;
    r *= 1.05;
  }
  if (kind == RuleKind::GaussHermiteMapped) {
    // Map so the outermost Hermite node sits just beyond the support radius.
    const double tmax = std::sqrt(2.0 * order + 1.0);
    return QuadratureRule::gauss_hermite_mapped(order, 0.0, r / tmax * 1.15);
  }
  return QuadratureRule::tanh_sinh(order, 0.0, r);
}

double contour_lift(const Potential& pot) {
  // Height of the fermionic quadrature contour. The kernel integrals are
  // contour-independent for any positive offset (the integrands are analytic
  // in the upper half plane), so the grid runs where the pole is resolved;
  // the weight's growth along Im y limits how far one may lift.
  const double ns = pot.natural_scale();
  return (pot.degree() <= 2 ? 0.65 : 0.42) * ns;
}

double contour_lift(const Potential& pot, const WeightScheme& scheme) {
  double lift = contour_lift(pot);
  if (scheme.mode == WeightMode::CustomFermionic)
    lift = std::min(lift, contour_lift(*scheme.fermionic_potential));
  return lift;
}

Cplx p_func(int k, Cplx lambda) { return std::pow(lambda, k); }

Cplx p_func_deriv(int k, int m, Cplx lambda) {
  if (m > k) return Cplx(0.0);
  double c = 1.0;
  for (int t = 0; t < m; ++t) c *= (k - t);
  return c * std::pow(lambda, k - m);
}

Cplx r_tilde(Cplx lambda, Cplx mu) {
  const Cplx d = lambda - mu;
  if (d == Cplx(0.0)) throw std::domain_error("r_tilde: coincident arguments");
  return 1.0 / d;
}

Cplx r_tilde_deriv(int m, int v, Cplx lambda, Cplx mu) {
  // d_lambda^m d_mu^v (lambda - mu)^{-1} = (-1)^m (m+v)! (lambda - mu)^{-(m+v+1)}.
  const Cplx d = lambda - mu;
  if (d == Cplx(0.0)) throw std::domain_error("r_tilde_deriv: coincident arguments");
  double fact = 1.0;
  for (int t = 2; t <= m + v; ++t) fact *= t;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * fact * std::pow(d, -(m + v + 1));
}

AuxKernels::AuxKernels(Potential pot, WeightScheme scheme, RuleKind kind, int order, double a_max)
    : pot_(std::move(pot)), scheme_(std::move(scheme)) {
  const QuadratureRule rule = default_rule_for(pot_, kind, order, a_max);
  const int n = rule.order;
  const double hf = std::max(scheme_.epsilon, contour_lift(pot_, scheme_));
  lift_ = hf;
  xb_.resize(n);
  wb_.resize(n);
  yf_.resize(n);
  wf_.resize(n);
  xsl_.resize(n);
  wsl_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = rule.nodes(k);
    const Cplx lw(rule.log_weights(k), 0.0);
    xb_(k) = t;
    wb_(k) = std::exp(lw + Cplx(log_weight_bosonic(pot_, t), 0.0));
    yf_(k) = Cplx(t, hf);
    wf_(k) = std::exp(lw + log_fermionic_weight_at(pot_, scheme_, yf_(k)));
    // S_L grid: bosonic contour dropped below the real axis (mu sits above
    // by convention; the mirrored grid handles Im mu < 0).
    xsl_(k) = Cplx(t, -hf);
    wsl_(k) = std::exp(lw + Cplx(-1.0, 0.0) * pot_(xsl_(k)) / pot_.hbar);
  }
  pole_.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pole_(i, j) = 1.0 / (Cplx(xb_(i), 0.0) - yf_(j));
  // Tail check: the weight at the grid edge must be negligible.
  const double edge = std::exp(log_weight_bosonic(pot_, xb_(n - 1)) + a_max * std::abs(xb_(n - 1)));
  if (edge > 1e-10)
    throw std::runtime_error("quadrature rule does not cover the weight's support");
}

bool AuxKernels::Key::operator<(const Key& o) const {
  return std::tie(fn, i, j, ur, ui, vr, vi) < std::tie(o.fn, o.i, o.j, o.ur, o.ui, o.vr, o.vi);
}

namespace {
uint64_t bits(double x) {
  uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}
}  // namespace

Cplx AuxKernels::cached(int fn, int i, int j, Cplx u, Cplx v,
                        const std::function<Cplx()>& compute) const {
  const Key key{fn, i, j, bits(u.real()), bits(u.imag()), bits(v.real()), bits(v.imag())};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const Cplx val = compute();
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(key, val);  // idempotent: recomputation is bit-identical
  return val;
}

size_t AuxKernels::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

Cplx AuxKernels::q_func(int k, Cplx a) const {
  return cached(0, k, 0, a, Cplx(0.0), [&] {
    Eigen::ArrayXcd f = (xb_.cast<Cplx>() * a).exp() * wb_;
    for (int t = 0; t < k; ++t) f *= xb_.cast<Cplx>();
    return f.sum();
  });
}

Cplx AuxKernels::q_fermionic(int j, Cplx b) const {
  return cached(1, j, 0, b, Cplx(0.0), [&] {
    Eigen::ArrayXcd f = (-yf_ * b).exp() * wf_;
    for (int t = 0; t < j; ++t) f *= -yf_;
    return f.sum();
  });
}

Cplx AuxKernels::r_func(int i, int j, Cplx a, Cplx b) const {
  return cached(2, i, j, a, b, [&] {
    Eigen::ArrayXcd fx = (xb_.cast<Cplx>() * a).exp() * wb_;
    for (int t = 0; t < i; ++t) fx *= xb_.cast<Cplx>();
    Eigen::ArrayXcd fy = (-yf_ * b).exp() * wf_;
    for (int t = 0; t < j; ++t) fy *= -yf_;
    return (fx.matrix().transpose() * pole_ * fy.matrix()).value();
  });
}

Cplx AuxKernels::s_left(int i, int v, Cplx a, Cplx mu) const {
  if (mu.imag() == 0.0) throw std::domain_error("s_left: mu must be off the real axis");
  return cached(3, i, v, a, mu, [&] {
    // Integration contour on the opposite side of the real axis from mu.
    const bool upper = mu.imag() > 0.0;
    const Eigen::ArrayXcd& xs = upper ? xsl_ : xsl_.conjugate();
    const Eigen::ArrayXcd ws = upper ? wsl_ : wsl_.conjugate();
    double fact = 1.0;
    for (int t = 2; t <= v; ++t) fact *= t;
    Eigen::ArrayXcd f = (xs * a).exp() * ws;
    for (int t = 0; t < i; ++t) f *= xs;
    const Eigen::ArrayXcd inv = (xs - mu).inverse();
    for (int t = 0; t < v + 1; ++t) f *= inv;
    return fact * f.sum();
  });
}

Cplx AuxKernels::s_right(int m, int u, Cplx lambda, Cplx b) const {
  return cached(4, m, u, lambda, b, [&] {
    double fact = 1.0;
    for (int t = 2; t <= m; ++t) fact *= t;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    Eigen::ArrayXcd f = (-yf_ * b).exp() * wf_;
    for (int t = 0; t < u; ++t) f *= -yf_;
    const Eigen::ArrayXcd inv = (lambda - yf_).inverse();
    for (int t = 0; t < m + 1; ++t) f *= inv;
    return sign * fact * f.sum();
  });
}

Cplx AuxKernels::weighted_p(int k, Cplx lambda, bool plus_sector) const {
  const Cplx w = plus_sector ? std::exp(pot_(lambda) / pot_.hbar)
                             : std::exp(-pot_(lambda) / pot_.hbar);
  return p_func(k, lambda) * w;
}

Cplx AuxKernels::weighted_r_tilde(Cplx lambda, Cplx mu) const {
  // Pointwise dressing of the replacement list: e^{-W(lambda)/hbar + W(mu)/hbar}.
  return std::exp((-pot_(lambda) + pot_(mu)) / pot_.hbar) * r_tilde(lambda, mu);
}

Cplx AuxKernels::weighted_s_left(Cplx a, Cplx mu) const {
  return std::exp(pot_(mu) / pot_.hbar) * s_left(0, 0, a, mu);
}

Cplx AuxKernels::weighted_s_right(Cplx lambda, Cplx b) const {
  return std::exp(-pot_(lambda) / pot_.hbar) * s_right(0, 0, lambda, b);
}

Cplx gaussian_q_closed(int k, Cplx a, double hbar) {
  const Cplx mean = hbar * a;
  const double var = hbar;
  // Moment recursion m_k = mean m_{k-1} + (k-1) var m_{k-2}.
  Cplx m0 = 1.0, m1 = mean;
  Cplx mk = (k == 0) ? m0 : m1;
  for (int t = 2; t <= k; ++t) {
    const Cplx m2 = mean * m1 + (t - 1) * var * m0;
    m0 = m1;
    m1 = m2;
    mk = m2;
  }
  return std::sqrt(2.0 * M_PI * hbar) * std::exp(0.5 * hbar * a * a) * mk;
}

}  // namespace smw

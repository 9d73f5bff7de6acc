#pragma once

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <optional>

#include "smw/model.hpp"

namespace smw {

enum class RuleKind { GaussHermiteMapped, TanhSinh };

/// A fixed 1D rule approximating integrals of weight-decaying integrands:
/// integral f(x) dx ~ sum_i w_i f(x_i). The weight function itself is not
/// folded in; nodes/weights are plain dx-rule data.
struct QuadratureRule {
  RuleKind kind = RuleKind::GaussHermiteMapped;
  int order = 80;
  double center = 0.0;
  double scale = 1.0;

  Eigen::ArrayXd nodes;         // x_i
  Eigen::ArrayXd log_weights;   // log w_i (w_i > 0 for both kinds)

  static QuadratureRule gauss_hermite_mapped(int order, double center, double scale);
  /// Tanh-sinh rule on [center - halfwidth, center + halfwidth].
  static QuadratureRule tanh_sinh(int order, double center, double halfwidth);

  /// Consistency check: sum w_i e^{-((x_i-center)/scale)^2} vs scale*sqrt(pi).
  double gaussian_defect() const;
};

/// Rule chosen to resolve e^{-W/hbar} times e^{x a} tilts with |a| <= a_max.
QuadratureRule default_rule_for(const Potential& pot, RuleKind kind, int order,
                                double a_max = 3.0);

/// Height at which the fermionic quadrature contour runs. The kernel
/// integrals are analytic in the offset, so any positive height yields the
/// same value; this one keeps the 1/(x-y) pole resolved by the grids while
/// limiting the fermionic weight's growth along the imaginary direction.
double contour_lift(const Potential& pot);
double contour_lift(const Potential& pot, const WeightScheme& scheme);

/// x^k (and its lambda-derivatives, which stay monomial).
Cplx p_func(int k, Cplx lambda);
/// d^m/d lambda^m of lambda^k, exact.
Cplx p_func_deriv(int k, int m, Cplx lambda);
/// 1/(lambda - mu).
Cplx r_tilde(Cplx lambda, Cplx mu);
/// d^m_lambda d^v_mu of 1/(lambda - mu), exact closed form.
Cplx r_tilde_deriv(int m, int v, Cplx lambda, Cplx mu);

/// Evaluators for the integral kernels Q, R, S_L, S_R of the model, all on a
/// shared pair of quadrature grids. Bosonic variables run on the real line,
/// fermionic ones on the shifted contour t + i*eps. Parameter derivatives are
/// realized by monomial (or pole-power) insertion under the integral sign, so
/// the derivative recursions hold exactly at the discretized level.
class AuxKernels {
 public:
  AuxKernels(Potential pot, WeightScheme scheme, RuleKind kind = RuleKind::GaussHermiteMapped,
             int order = 200, double a_max = 3.0);

  const Potential& potential() const { return pot_; }
  const WeightScheme& scheme() const { return scheme_; }
  int order() const { return static_cast<int>(xb_.size()); }
  double epsilon() const { return scheme_.epsilon; }
  double contour_height() const { return lift_; }

  /// Q_k(a) = integral x^k e^{-W(x)/hbar + x a} dx  (k-th a-derivative of Q_0).
  Cplx q_func(int k, Cplx a) const;

  /// Fermionic moment integral: integral (-y)^j w_F(y) e^{-y b} dy along the contour.
  Cplx q_fermionic(int j, Cplx b) const;

  /// R^{(i,j)}(a;b) = d_a^i d_b^j of the double integral
  ///   integral integral 1/(x - y) w_B(x) w_F(y) e^{x a - y b} dx dy.
  Cplx r_func(int i, int j, Cplx a, Cplx b) const;

  /// S_L^{(i,v)}(a;mu) = d_a^i d_mu^v of integral (x - mu)^{-1} w_B(x) e^{x a} dx.
  Cplx s_left(int i, int v, Cplx a, Cplx mu) const;

  /// S_R^{(m,u)}(lambda;b) = d_lambda^m d_b^u of
  ///   integral (lambda - y)^{-1} w_F(y) e^{-y b} dy along the contour.
  Cplx s_right(int m, int u, Cplx lambda, Cplx b) const;

  // Phi-variant (weighted) kernels: the extra e^{-W/hbar} factors on lambda-type
  // arguments and scheme fermionic weights on mu-type arguments. `plus_sector`
  // selects the replacement sign branch (M + p > N + q or not).
  Cplx weighted_p(int k, Cplx lambda, bool plus_sector = false) const;
  Cplx weighted_r_tilde(Cplx lambda, Cplx mu) const;
  Cplx weighted_s_left(Cplx a, Cplx mu) const;
  Cplx weighted_s_right(Cplx lambda, Cplx b) const;

  /// Bosonic weight factor e^{-W(t)/hbar} and fermionic contour weight at t + i eps.
  double bosonic_weight(double t) const { return weight_bosonic(pot_, t); }
  Cplx fermionic_weight(double t) const { return weight_fermionic(pot_, scheme_, t); }

  /// Grid access (the brute-force oracle shares the contour convention).
  const Eigen::ArrayXd& bosonic_nodes() const { return xb_; }
  const Eigen::ArrayXcd& bosonic_node_weights() const { return wb_; }   // includes w_B
  const Eigen::ArrayXcd& fermionic_nodes() const { return yf_; }        // t + i eps
  const Eigen::ArrayXcd& fermionic_node_weights() const { return wf_; } // includes w_F

  /// Cache statistics (diagnostic).
  size_t cache_size() const;

 private:
  Cplx cached(int fn, int i, int j, Cplx u, Cplx v, const std::function<Cplx()>& compute) const;

  Potential pot_;
  WeightScheme scheme_;
  double lift_ = 0.0;
  Eigen::ArrayXd xb_;
  Eigen::ArrayXcd wb_;
  Eigen::ArrayXcd yf_;
  Eigen::ArrayXcd wf_;
  Eigen::ArrayXcd xsl_;  // bosonic contour dropped to -i*lift (for s_left)
  Eigen::ArrayXcd wsl_;
  Eigen::MatrixXcd pole_;  // 1/(x_i - y_j), precomputed

  struct Key {
    int fn, i, j;
    uint64_t ur, ui, vr, vi;
    bool operator<(const Key& o) const;
  };
  mutable std::map<Key, Cplx> cache_;
  mutable std::mutex mutex_;
};

/// Closed-form Gaussian cross-check: Q_k for W = x^2/2 equals
/// sqrt(2 pi hbar) e^{hbar a^2 / 2} m_k(hbar a, hbar) with m_k the k-th moment
/// of a normal distribution with the stated mean and variance.
Cplx gaussian_q_closed(int k, Cplx a, double hbar);

}  // namespace smw

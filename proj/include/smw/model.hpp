#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smw {

using Cplx = std::complex<double>;

/// Polynomial matrix potential W(x) = sum_k c_k x^k together with the
/// coupling constant hbar. The weight e^{-W/hbar} must decay on the real
/// line when the potential is used as a bosonic weight.
struct Potential {
  std::vector<double> coefficients;  // c_0 .. c_d
  double hbar = 1.0;

  Potential() = default;
  Potential(std::vector<double> coeffs, double hb);

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  double leading() const { return coefficients.back(); }

  double operator()(double x) const;
  Cplx operator()(Cplx x) const;

  /// Scale where W(x)/hbar ~ 1; sets the default contour offset.
  double natural_scale() const;

  static Potential gaussian(double hbar = 1.0);  // W = x^2/2
  static Potential quartic(double hbar = 1.0);   // W = x^4
};

enum class WeightMode {
  FlipSign,         // fermionic weight e^{-W(y)/hbar} (I_{N,M} insertion)
  CustomFermionic,  // fermionic weight e^{+W_F(y)/hbar}
  // Imaginary coupling (Fresnel) is recognized in configs for documentation
  // purposes only; constructing a scheme with it throws.
  FresnelUnimplemented,
};

struct WeightScheme {
  WeightMode mode = WeightMode::FlipSign;
  std::optional<Potential> fermionic_potential;  // custom-fermionic only
  double epsilon = 1e-3;  // contour offset: fermionic variables run along y + i*eps

  static WeightScheme flip_sign(const Potential& pot, double eps = -1.0);
  static WeightScheme custom_fermionic(Potential wf, double eps);
};

/// External source eigenvalues {a_i} (bosonic) and {b_j} (fermionic), N >= M.
struct SourceSpec {
  std::vector<double> a;
  std::vector<double> b;

  SourceSpec() = default;
  SourceSpec(std::vector<double> av, std::vector<double> bv);

  int N() const { return static_cast<int>(a.size()); }
  int M() const { return static_cast<int>(b.size()); }
};

/// Characteristic polynomial arguments: p numerator points lambda_alpha and
/// q denominator points mu_beta (mu off the real axis).
struct ChPolySpec {
  std::vector<Cplx> lambda;
  std::vector<Cplx> mu;

  ChPolySpec() = default;
  ChPolySpec(std::vector<Cplx> lv, std::vector<Cplx> mv);

  int p() const { return static_cast<int>(lambda.size()); }
  int q() const { return static_cast<int>(mu.size()); }
};

void validate_combined(const SourceSpec& src, const ChPolySpec& ch);

/// e^{-W(x)/hbar}, evaluated in the log domain. Underflow returns 0.
double weight_bosonic(const Potential& pot, double x);

/// Fermionic weight at the shifted point y + i*eps.
Cplx weight_fermionic(const Potential& pot, const WeightScheme& scheme, double y);

/// Log of the bosonic weight (for quadrature nodes, keeping products stable).
double log_weight_bosonic(const Potential& pot, double x);
Cplx log_weight_fermionic(const Potential& pot, const WeightScheme& scheme, double y);

/// Fermionic log-weight at an arbitrary complex contour point.
Cplx log_fermionic_weight_at(const Potential& pot, const WeightScheme& scheme, Cplx y);

}  // namespace smw

#include "smw/model.hpp"

#include <cmath>
#include <set>

namespace smw {

Potential::Potential(std::vector<double> coeffs, double hb)
    : coefficients(std::move(coeffs)), hbar(hb) {
  if (coefficients.size() < 2) throw std::invalid_argument("potential: degree must be >= 1");
  if (coefficients.back() == 0.0) throw std::invalid_argument("potential: leading coefficient is zero");
  if (!(hbar > 0.0)) throw std::invalid_argument("potential: hbar must be positive");
}

double Potential::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Cplx Potential::operator()(Cplx x) const {
  Cplx acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Potential::natural_scale() const {
  return std::pow(hbar / std::abs(leading()), 1.0 / degree());
}

Potential Potential::gaussian(double hbar) { return Potential({0.0, 0.0, 0.5}, hbar); }
Potential Potential::quartic(double hbar) { return Potential({0.0, 0.0, 0.0, 0.0, 1.0}, hbar); }

WeightScheme WeightScheme::flip_sign(const Potential& pot, double eps) {
  if (pot.degree() % 2 != 0 || pot.leading() <= 0.0)
    throw std::invalid_argument("flip-sign: potential must be even-degree with positive leading coefficient");
  WeightScheme s;
  s.mode = WeightMode::FlipSign;
  s.epsilon = eps > 0.0 ? eps : 1e-3 * pot.natural_scale();
  return s;
}

WeightScheme WeightScheme::custom_fermionic(Potential wf, double eps) {
  // e^{+W_F/hbar} integrable requires W_F -> -inf at both ends.
  if (wf.degree() % 2 != 0 || wf.leading() >= 0.0)
    throw std::invalid_argument("custom-fermionic: W_F must be even-degree with negative leading coefficient");
  WeightScheme s;
  s.mode = WeightMode::CustomFermionic;
  s.fermionic_potential = std::move(wf);
  s.epsilon = eps > 0.0 ? eps : 1e-3;
  return s;
}

namespace {
template <typename T>
void require_distinct(const std::vector<T>& v, const char* what) {
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = i + 1; j < v.size(); ++j)
      if (v[i] == v[j]) throw std::invalid_argument(std::string(what) + ": coincident entries");
}
}  // namespace

SourceSpec::SourceSpec(std::vector<double> av, std::vector<double> bv)
    : a(std::move(av)), b(std::move(bv)) {
  if (M() > N()) throw std::invalid_argument("source: requires N >= M");
  require_distinct(a, "source a");
  require_distinct(b, "source b");
  for (double x : a)
    for (double y : b)
      if (x == y) throw std::invalid_argument("source: a_i == b_j");
}

ChPolySpec::ChPolySpec(std::vector<Cplx> lv, std::vector<Cplx> mv)
    : lambda(std::move(lv)), mu(std::move(mv)) {
  require_distinct(lambda, "chpoly lambda");
  require_distinct(mu, "chpoly mu");
  for (const Cplx& m : mu)
    if (m.imag() == 0.0) throw std::invalid_argument("chpoly: mu must have nonzero imaginary part");
  for (const Cplx& l : lambda)
    for (const Cplx& m : mu)
      if (l == m) throw std::invalid_argument("chpoly: lambda_a == mu_b");
}

void validate_combined(const SourceSpec& src, const ChPolySpec& ch) {
  if (src.N() + ch.p() <= src.M() + ch.q())
    throw std::invalid_argument("spec: requires N + p > M + q");
}

double log_weight_bosonic(const Potential& pot, double x) { return -pot(x) / pot.hbar; }

double weight_bosonic(const Potential& pot, double x) {
  return std::exp(log_weight_bosonic(pot, x));
}

Cplx log_fermionic_weight_at(const Potential& pot, const WeightScheme& scheme, Cplx y) {
  switch (scheme.mode) {
    case WeightMode::FlipSign:
      return -pot(y) / pot.hbar;
    case WeightMode::CustomFermionic:
      return (*scheme.fermionic_potential)(y) / scheme.fermionic_potential->hbar;
    default:
      throw std::logic_error("fresnel mode is not implemented");
  }
}

Cplx log_weight_fermionic(const Potential& pot, const WeightScheme& scheme, double y) {
  return log_fermionic_weight_at(pot, scheme, Cplx(y, scheme.epsilon));
}

Cplx weight_fermionic(const Potential& pot, const WeightScheme& scheme, double y) {
  return std::exp(log_weight_fermionic(pot, scheme, y));
}

}  // namespace smw

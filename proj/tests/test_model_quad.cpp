#include <doctest.h>

#include <cmath>

#include "smw/quad.hpp"

using namespace smw;

namespace {
double rel(Cplx a, Cplx b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30});
}
}  // namespace

TEST_CASE("bosonic weight examples") {
  const Potential g = Potential::gaussian();
  CHECK(weight_bosonic(g, 0.0) == 1.0);
  CHECK(weight_bosonic(g, 2.0) == doctest::Approx(std::exp(-2.0)));
  const Potential q({0, 0, 0, 0, 1.0}, 2.0);  // W = x^4, hbar = 2
  CHECK(weight_bosonic(q, 1.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("fermionic weight examples and epsilon continuity") {
  const Potential g = Potential::gaussian();
  const WeightScheme tiny = WeightScheme::flip_sign(g, 1e-12);
  CHECK(std::abs(weight_fermionic(g, tiny, 0.0) - Cplx(1.0)) < 1e-9);

  const WeightScheme s = WeightScheme::flip_sign(g, 1e-3);
  const Cplx expect = std::exp(-0.5 * Cplx(1.0, 1e-3) * Cplx(1.0, 1e-3));
  CHECK(rel(weight_fermionic(g, s, 1.0), expect) < 1e-14);

  // custom-fermionic with W_F = -x^2: weight e^{W_F} = e^{-1} at y = 1
  const WeightScheme cf = WeightScheme::custom_fermionic(Potential({0, 0, -1.0}, 1.0), 1e-12);
  CHECK(std::abs(weight_fermionic(g, cf, 1.0) - Cplx(std::exp(-1.0))) < 1e-9);

  // pointwise convergence to the bosonic weight as eps -> 0 (flip-sign)
  const WeightScheme e3 = WeightScheme::flip_sign(g, 1e-3);
  const WeightScheme e6 = WeightScheme::flip_sign(g, 1e-6);
  for (double y : {-1.3, 0.2, 2.1}) {
    const double wb = weight_bosonic(g, y);
    CHECK(std::abs(weight_fermionic(g, e6, y) - wb) <
          1e3 * std::abs(weight_fermionic(g, e3, y) - wb) + 1e-15);
  }
}

TEST_CASE("weight scheme rejections") {
  // flip-sign needs even degree with positive leading coefficient
  CHECK_THROWS(WeightScheme::flip_sign(Potential({0, 1.0, 0, 1.0}, 1.0)));
  // custom-fermionic W_F must decay: leading must be negative
  CHECK_THROWS(WeightScheme::custom_fermionic(Potential({0, 0, 1.0}, 1.0), 1e-3));
}

TEST_CASE("parameter-set invariants are validated") {
  CHECK_THROWS(SourceSpec({0.1}, {0.2, 0.3}));             // N < M
  CHECK_THROWS(SourceSpec({0.1, 0.1}, {}));                // coincident a
  CHECK_THROWS(SourceSpec({0.1, 0.3}, {0.3}));             // a meets b
  CHECK_THROWS(ChPolySpec({}, {Cplx(0.5, 0.0)}));          // real mu
  CHECK_THROWS(validate_combined(SourceSpec({0.1}, {}), ChPolySpec({}, {Cplx(0, 1)})));
}

TEST_CASE("gauss-hermite rule reproduces the gaussian integral") {
  for (int order : {16, 80, 200}) {
    const QuadratureRule r = QuadratureRule::gauss_hermite_mapped(order, 0.3, 1.7);
    CHECK(r.gaussian_defect() < 1e-12);
  }
  CHECK_THROWS(QuadratureRule::gauss_hermite_mapped(4, 0, 1));
}

TEST_CASE("q_func: Gaussian examples and closed form") {
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g));
  CHECK(rel(kern.q_func(0, 0.0), Cplx(std::sqrt(2.0 * M_PI))) < 1e-12);
  CHECK(std::abs(kern.q_func(1, 0.0)) < 1e-12);
  CHECK(rel(kern.q_func(0, 1.0), Cplx(std::sqrt(2.0 * M_PI) * std::exp(0.5))) < 1e-10);
  // frozen independent reference (30-digit adaptive quadrature)
  CHECK(rel(kern.q_func(3, 0.7), Cplx(7.82376053252321325)) < 1e-11);

  double worst = 0.0;
  for (int k = 0; k <= 8; ++k)
    for (double a : {-3.0, -1.1, 0.0, 0.7, 2.3, 3.0}) {
      // odd moments at a = 0 vanish: compare on the scale of the even neighbor
      const double scale = std::max(std::abs(gaussian_q_closed(k, a, 1.0)),
                                    std::abs(gaussian_q_closed(k, 1.0, 1.0)));
      worst = std::max(worst, std::abs(kern.q_func(k, a) - gaussian_q_closed(k, a, 1.0)) / scale);
    }
  CHECK(worst < 1e-8);
}

TEST_CASE("q_func derivative recursion against central differences") {
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g));
  const Cplx a(0.4, 0.0);
  for (int k = 0; k <= 2; ++k) {
    const Cplx exact = kern.q_func(k + 1, a);
    auto fd = [&](double h) {
      return (kern.q_func(k, a + h) - kern.q_func(k, a - h)) / (2.0 * h);
    };
    const double e3 = std::abs(fd(1e-3) - exact);
    const double e4 = std::abs(fd(1e-4) - exact);
    CHECK(rel(fd(1e-4), exact) < 1e-6);
    CHECK(e4 < 0.02 * e3 + 1e-9);  // O(h^2) drop by ~100
  }
}

TEST_CASE("p_func and r_tilde basics") {
  CHECK(p_func(0, Cplx(5.0)) == Cplx(1.0));
  CHECK(p_func(3, Cplx(2.0)) == Cplx(8.0));
  CHECK(p_func(1, Cplx(0, 1)) == Cplx(0, 1));
  CHECK(p_func_deriv(3, 2, Cplx(2.0)) == Cplx(12.0));
  CHECK(p_func_deriv(1, 2, Cplx(2.0)) == Cplx(0.0));

  CHECK(r_tilde(Cplx(3.0), Cplx(1.0)) == Cplx(0.5));
  CHECK(rel(r_tilde(Cplx(0.0), Cplx(0, 1)), Cplx(0, 1)) < 1e-15);
  CHECK_THROWS_AS(r_tilde(Cplx(1.0), Cplx(1.0)), std::domain_error);
  const uint64_t seed = 7;
  for (int rep = 0; rep < 20; ++rep) {
    const Cplx l(0.1 * rep, 0.3), m(1.0 - 0.05 * rep, -0.4);
    CHECK(rel(r_tilde(l, m), -r_tilde(m, l)) < 1e-15);
    (void)seed;
  }
  // derivative closed form vs finite differences
  const Cplx l(0.7, 0.2), m(-0.4, 0.9);
  const double h = 1e-5;
  const Cplx fd = (r_tilde(l + h, m) - r_tilde(l - h, m)) / (2.0 * h);
  CHECK(rel(fd, r_tilde_deriv(1, 0, l, m)) < 1e-8);
  const Cplx fd2 = (r_tilde_deriv(1, 0, l, m + h) - r_tilde_deriv(1, 0, l, m - h)) / (2.0 * h);
  CHECK(rel(fd2, r_tilde_deriv(1, 1, l, m)) < 1e-8);
}

TEST_CASE("r_func: frozen reference, derivative insertion, dual rules") {
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g));
  // frozen independent reference (30-digit adaptive double quadrature)
  CHECK(rel(kern.r_func(0, 0, 0.5, 0.1), Cplx(2.0223623338341497, 5.79557577333956014)) < 1e-9);

  // derivative by monomial insertion vs central finite difference
  const Cplx a(0.5, 0.0), b(0.1, 0.0);
  const double h = 1e-4;
  const Cplx fd_a = (kern.r_func(0, 0, a + h, b) - kern.r_func(0, 0, a - h, b)) / (2.0 * h);
  CHECK(rel(fd_a, kern.r_func(1, 0, a, b)) < 1e-6);
  const Cplx fd_b = (kern.r_func(0, 0, a, b + h) - kern.r_func(0, 0, a, b - h)) / (2.0 * h);
  CHECK(rel(fd_b, kern.r_func(0, 1, a, b)) < 1e-6);

  // independent rule family agrees
  const AuxKernels ts(g, WeightScheme::flip_sign(g), RuleKind::TanhSinh, 480);
  CHECK(rel(kern.r_func(0, 0, a, b), ts.r_func(0, 0, a, b)) < 1e-7);
  CHECK(rel(kern.q_func(2, 0.7), ts.q_func(2, 0.7)) < 1e-7);

  // a = b = 0: the regularized kernel is purely imaginary by symmetry
  CHECK(std::abs(kern.r_func(0, 0, 0.0, 0.0).real()) <
        1e-8 * std::abs(kern.r_func(0, 0, 0.0, 0.0)));
}

TEST_CASE("quartic kernels against frozen references") {
  const Potential q = Potential::quartic();
  const AuxKernels kern(q, WeightScheme::flip_sign(q), RuleKind::TanhSinh, 320);
  CHECK(rel(kern.q_func(2, 0.5), Cplx(0.670567574171506809)) < 1e-9);
  CHECK(rel(kern.r_func(0, 0, 0.5, 0.1), Cplx(1.00944227156974721, 4.88118896116965119)) < 1e-6);
  CHECK(rel(kern.s_right(0, 0, 2.0, 0.1), Cplx(0.985206110319765797, 2.89453806949817358e-7)) <
        1e-7);
}

TEST_CASE("s_left: asymptotics, symmetry, frozen reference") {
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g));
  CHECK(rel(kern.s_left(0, 0, 0.3, Cplx(0.2, 0.8)),
            Cplx(0.108577021476728357, 1.9122797724503979)) < 1e-9);

  // far pole: s_left ~ -Q_0(a)/(i T)
  const Cplx far(0.0, 1e3);
  const Cplx ratio = kern.s_left(0, 0, 0.4, far) * (-far) / kern.q_func(0, 0.4);
  CHECK(std::abs(ratio - Cplx(1.0)) < 1e-2);

  // even weight, a = 0, mu = i: the result is purely imaginary
  const Cplx v = kern.s_left(0, 0, 0.0, Cplx(0, 1));
  CHECK(std::abs(v.real()) < 1e-8 * std::abs(v));

  CHECK_THROWS_AS(kern.s_left(0, 0, 0.1, Cplx(0.5, 0.0)), std::domain_error);

  // mu below the axis: conjugate-symmetric evaluation
  const Cplx up = kern.s_left(0, 0, 0.3, Cplx(0.2, 0.8));
  const Cplx dn = kern.s_left(0, 0, 0.3, Cplx(0.2, -0.8));
  CHECK(rel(std::conj(up), dn) < 1e-12);

  // pole-power insertion vs finite difference in mu
  const Cplx mu(0.2, 0.8);
  const double h = 1e-5;
  const Cplx fd =
      (kern.s_left(0, 0, 0.3, mu + h) - kern.s_left(0, 0, 0.3, mu - h)) / (2.0 * h);
  CHECK(rel(fd, kern.s_left(0, 1, 0.3, mu)) < 1e-7);
}

TEST_CASE("s_right: frozen reference and dual-rule agreement") {
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g));
  CHECK(rel(kern.s_right(0, 0, 2.0, 0.1), Cplx(1.54100347335228749, 0.348098388305654593)) <
        1e-9);
  const AuxKernels ts(g, WeightScheme::flip_sign(g), RuleKind::TanhSinh, 480);
  CHECK(rel(kern.s_right(0, 0, 2.0, 0.1), ts.s_right(0, 0, 2.0, 0.1)) < 1e-7);
  CHECK(rel(kern.s_left(0, 0, 0.3, Cplx(0.2, 0.8)), ts.s_left(0, 0, 0.3, Cplx(0.2, 0.8))) <
        1e-7);

  // derivative insertions vs finite differences
  const double h = 1e-4;
  const Cplx fd_l =
      (kern.s_right(0, 0, 2.0 + h, 0.1) - kern.s_right(0, 0, 2.0 - h, 0.1)) / (2.0 * h);
  CHECK(rel(fd_l, kern.s_right(1, 0, 2.0, 0.1)) < 1e-6);
  const Cplx fd_b =
      (kern.s_right(0, 0, 2.0, 0.1 + h) - kern.s_right(0, 0, 2.0, 0.1 - h)) / (2.0 * h);
  CHECK(rel(fd_b, kern.s_right(0, 1, 2.0, 0.1)) < 1e-6);
}

TEST_CASE("weighted kernel family") {
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g));
  CHECK(kern.weighted_p(0, Cplx(0.0)) == Cplx(1.0));
  // e^{-W(1)/h + W(i)/h} / (1 - i) = e^{-1} / (1 - i)
  CHECK(rel(kern.weighted_r_tilde(Cplx(1.0), Cplx(0, 1)),
            Cplx(std::exp(-1.0)) / Cplx(1.0, -1.0)) < 1e-14);
  CHECK(rel(kern.weighted_s_left(0.3, Cplx(0.2, 0.8)),
            std::exp(g(Cplx(0.2, 0.8))) * kern.s_left(0, 0, 0.3, Cplx(0.2, 0.8))) < 1e-14);
}

TEST_CASE("cache is deterministic and grows") {
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g));
  const size_t before = kern.cache_size();
  const Cplx v1 = kern.r_func(1, 2, 0.37, -0.21);
  const size_t mid = kern.cache_size();
  const Cplx v2 = kern.r_func(1, 2, 0.37, -0.21);
  CHECK(mid == before + 1);
  CHECK(kern.cache_size() == mid);
  CHECK(v1 == v2);  // bit-identical
}

TEST_CASE("natural scale and contour height") {
  CHECK(Potential::gaussian().natural_scale() == doctest::Approx(std::sqrt(2.0)));
  const Potential g = Potential::gaussian();
  const AuxKernels kern(g, WeightScheme::flip_sign(g, 1e-3));
  CHECK(kern.epsilon() == 1e-3);
  CHECK(kern.contour_height() > 0.5);  // lifted above the label offset
}

TEST_CASE("bosonic weight is even whenever the potential is even") {
  const Potential g = Potential::gaussian();
  const Potential q = Potential::quartic();
  for (double x : {0.3, 1.1, 2.7}) {
    CHECK(weight_bosonic(g, x) == weight_bosonic(g, -x));
    CHECK(weight_bosonic(q, x) == weight_bosonic(q, -x));
  }
}

TEST_CASE("kernel values are bit-identical across instances") {
  const Potential g = Potential::gaussian();
  const AuxKernels k1(g, WeightScheme::flip_sign(g));
  const AuxKernels k2(g, WeightScheme::flip_sign(g));
  CHECK(k1.r_func(1, 2, 0.37, -0.21) == k2.r_func(1, 2, 0.37, -0.21));
  CHECK(k1.q_func(3, 0.7) == k2.q_func(3, 0.7));
}

#include <doctest.h>

#include <cmath>

#include "smw/oracle.hpp"
#include "smw/partition.hpp"

using namespace smw;

namespace {

double rel(Cplx a, Cplx b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30});
}

const Potential kGauss = Potential::gaussian();

const AuxKernels& gauss_kernels() {
  static AuxKernels kern(kGauss, WeightScheme::flip_sign(kGauss));
  return kern;
}

}  // namespace

TEST_CASE("counter rng is stateless and reproducible") {
  CHECK(CounterRng::mix(1, 0) == CounterRng::mix(1, 0));
  CHECK(CounterRng::mix(1, 0) != CounterRng::mix(1, 1));
  CHECK(CounterRng::mix(1, 0) != CounterRng::mix(2, 0));
  const double u = CounterRng::uniform(7, 13);
  CHECK(u > 0.0);
  CHECK(u < 1.0);
  const auto [g1, g2] = CounterRng::normal_pair(7, 13);
  const auto [h1, h2] = CounterRng::normal_pair(7, 13);
  CHECK(g1 == h1);
  CHECK(g2 == h2);
}

TEST_CASE("eigenvalue integral: 1D case is the plain Q integral") {
  const AuxKernels& kern = gauss_kernels();
  const Cplx orc = eigenvalue_integral(kern, SourceSpec({0.4}, {}));
  CHECK(rel(orc, kern.q_func(0, 0.4)) < 1e-9);
  CHECK_THROWS(eigenvalue_integral(kern, SourceSpec({0.1, 0.2, 0.3, 0.4, 0.5}, {})));
}

TEST_CASE("determinant formula equals the eigenvalue integral (Gaussian)") {
  const AuxKernels& kern = gauss_kernels();
  for (const auto& s : std::vector<std::pair<int, int>>{{1, 0}, {2, 0}, {1, 1}, {2, 1}}) {
    std::vector<double> a(s.first), b(s.second);
    for (int i = 0; i < s.first; ++i) a[i] = 0.4 - 0.6 * i;
    for (int j = 0; j < s.second; ++j) b[j] = 0.1 + 0.5 * j;
    const SourceSpec src(a, b);
    const Cplx det_val = z_source(kern, src).value;
    const Cplx orc = eigenvalue_integral(kern, src, std::nullopt, RuleKind::GaussHermiteMapped, 64);
    CHECK(rel(det_val, orc) < 1e-6);
  }
}

TEST_CASE("determinant formula equals the eigenvalue integral (quartic)") {
  const Potential q = Potential::quartic();
  const AuxKernels kern(q, WeightScheme::flip_sign(q), RuleKind::TanhSinh, 320);
  for (const auto& s : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}}) {
    std::vector<double> a(s.first), b(s.second);
    for (int i = 0; i < s.first; ++i) a[i] = 0.4 - 0.6 * i;
    for (int j = 0; j < s.second; ++j) b[j] = 0.1 + 0.5 * j;
    const SourceSpec src(a, b);
    const Cplx det_val = z_source(kern, src).value;
    const Cplx orc = eigenvalue_integral(kern, src, std::nullopt, RuleKind::GaussHermiteMapped, 72);
    CHECK(rel(det_val, orc) < 1e-5);
  }
}

TEST_CASE("psi equals the eigenvalue integral with char-poly factors") {
  const AuxKernels& kern = gauss_kernels();
  const SourceSpec src({0.4, -0.2}, {0.1});
  const ChPolySpec ch({Cplx(0.7, 0.0)}, {});
  const Cplx det_val = psi(kern, src, ch).value;
  const Cplx orc = eigenvalue_integral(kern, src, ch, RuleKind::GaussHermiteMapped, 64);
  CHECK(rel(det_val, orc) < 1e-5);
}

TEST_CASE("hciz closed form and Haar Monte Carlo") {
  // X = 0: every sample contributes exactly one.
  {
    const McEstimate est = haar_hciz_mc({0.0, 0.0}, {0.3, -0.4}, 200, 11);
    CHECK(est.mean == Cplx(1.0));
    CHECK(est.stderr_ < 1e-13);
  }
  // N=2 with x = (1,0), a = (1,0): closed form (e - 1).
  {
    const Cplx closed = hciz_closed({1.0, 0.0}, {1.0, 0.0});
    CHECK(rel(closed, Cplx(std::exp(1.0) - 1.0)) < 1e-12);
    const McEstimate est = haar_hciz_mc({1.0, 0.0}, {1.0, 0.0}, 20000, 17);
    CHECK(std::abs(est.mean - closed) < 3.0 * est.stderr_);
  }
  // swap invariance of the mean within combined errors
  {
    const McEstimate e1 = haar_hciz_mc({1.0, 0.0}, {1.0, 0.0}, 20000, 23);
    const McEstimate e2 = haar_hciz_mc({1.0, 0.0}, {0.0, 1.0}, 20000, 23);
    CHECK(std::abs(e1.mean - e2.mean) < 3.0 * (e1.stderr_ + e2.stderr_));
  }
  // N=3 against the closed form
  {
    const std::vector<double> x = {1.0, 0.2, -0.6}, a = {0.9, 0.2, -0.5};
    const McEstimate est = haar_hciz_mc(x, a, 30000, 29);
    CHECK(std::abs(est.mean - hciz_closed(x, a)) < 3.0 * est.stderr_);
  }
  CHECK_THROWS(haar_hciz_mc({1.0, 1.0}, {0.0, 1.0}, 100, 1));
}

TEST_CASE("stderr scales like the inverse square root of the sample count") {
  const McEstimate small = haar_hciz_mc({1.0, 0.0}, {1.0, 0.0}, 10000, 5);
  const McEstimate large = haar_hciz_mc({1.0, 0.0}, {1.0, 0.0}, 100000, 5);
  const double ratio = small.stderr_ / large.stderr_;
  CHECK(ratio > 2.2);
  CHECK(ratio < 4.5);
}

TEST_CASE("mc estimates are bit-reproducible for a fixed seed") {
  const McEstimate a = haar_hciz_mc({1.0, 0.0}, {0.5, -0.2}, 5000, 99);
  const McEstimate b = haar_hciz_mc({1.0, 0.0}, {0.5, -0.2}, 5000, 99);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("hermitian mc against the normalized psi ratios") {
  const AuxKernels& kern = gauss_kernels();

  // N=1, no char poly: the ratio of partition values at a vs 0.
  {
    const McEstimate est = hermitian_mc(kGauss, {0.3}, std::nullopt, 20000, 7);
    CHECK(est.mean == Cplx(1.0));  // normalized expectation of 1
  }
  // N=2, p=1 at a near zero: <det(lambda - X)> ~ lambda^2 - hbar.
  {
    const std::vector<double> a = {0.01, -0.01};
    const ChPolySpec ch({Cplx(0.8, 0.0)}, {});
    const McEstimate est = hermitian_mc(kGauss, a, ch, 200000, 31);
    const Cplx brute =
        psi(kern, SourceSpec(a, {}), ch).value / z_source(kern, SourceSpec(a, {})).value;
    CHECK(std::abs(est.mean - brute) < 3.0 * est.stderr_);
    CHECK(std::abs(brute - Cplx(0.8 * 0.8 - 1.0)) < 0.01);  // polynomial form
  }
  // q = 1 with Im mu = 1: inverse determinant average stays finite.
  {
    const std::vector<double> a = {0.3, -0.2};
    const ChPolySpec ch({}, {Cplx(0.1, 1.0)});
    const McEstimate est = hermitian_mc(kGauss, a, ch, 200000, 37);
    const Cplx brute =
        psi(kern, SourceSpec(a, {}), ch).value / z_source(kern, SourceSpec(a, {})).value;
    CHECK(std::isfinite(est.mean.real()));
    CHECK(std::abs(est.mean - brute) < 3.0 * est.stderr_);
  }
  CHECK_THROWS(hermitian_mc(Potential::quartic(), {0.1}, std::nullopt, 10, 1));
}

TEST_CASE("eigenvalue integral is deterministic") {
  const AuxKernels& kern = gauss_kernels();
  const SourceSpec src({0.4, -0.2}, {0.1});
  const Cplx v1 = eigenvalue_integral(kern, src);
  const Cplx v2 = eigenvalue_integral(kern, src);
  CHECK(v1 == v2);
}

TEST_CASE("gue char-poly average at N=1 against psi") {
  const AuxKernels& kern = gauss_kernels();
  const std::vector<double> a = {0.3};
  const ChPolySpec ch({Cplx(0.7, 0.0)}, {});
  const McEstimate est = hermitian_mc(kGauss, a, ch, 100000, 41);
  const Cplx expected =
      psi(kern, SourceSpec(a, {}), ch).value / z_source(kern, SourceSpec(a, {})).value;
  CHECK(std::abs(est.mean - expected) < 3.0 * est.stderr_);
  // 1D: <lambda - X> = lambda - hbar a exactly
  CHECK(std::abs(expected - Cplx(0.7 - 0.3)) < 1e-8);
}

TEST_CASE("determinant-oracle agreement is independent of the epsilon label") {
  for (double eps : {1e-2, 1e-3}) {
    const AuxKernels kern(kGauss, WeightScheme::flip_sign(kGauss, eps), 
                          RuleKind::GaussHermiteMapped, 160);
    const SourceSpec src({0.4, -0.2}, {0.1});
    CHECK(rel(z_source(kern, src).value, eigenvalue_integral(kern, src)) < 1e-6);
  }
}

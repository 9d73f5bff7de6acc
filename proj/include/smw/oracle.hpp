#pragma once

#include <cstdint>
#include <optional>

#include "smw/quad.hpp"

namespace smw {

/// Stateless counter-based generator: every draw is a pure function of
/// (seed, counter), so runs are reproducible and partitionable.
struct CounterRng {
  uint64_t seed = 0;

  static uint64_t mix(uint64_t seed, uint64_t counter);
  /// Uniform in (0,1).
  static double uniform(uint64_t seed, uint64_t counter);
  /// Standard normal via Box-Muller on counters (2k, 2k+1).
  static double normal(uint64_t seed, uint64_t pair_index);
  /// Two normals per pair (cos and sin branches).
  static std::pair<double, double> normal_pair(uint64_t seed, uint64_t pair_index);
};

struct McEstimate {
  Cplx mean{0.0, 0.0};
  double stderr_ = 0.0;
  long samples = 0;
  uint64_t seed = 0;
};

/// Direct eigenvalue-representation integral on tensor-product grids:
///   (1/Delta(a;b)) int prod dx_i w_B e^{x_i a_i} prod dy_j w_F e^{-y_j b_j}
///       Delta_{N,M}(x;y) * [char-poly ratio factors]
/// with the same fermionic contour as the kernel module. Grids are built from
/// an independent rule (different family/order than the kernels under test).
Cplx eigenvalue_integral(const AuxKernels& kern, const SourceSpec& src,
                         const std::optional<ChPolySpec>& ch = std::nullopt,
                         RuleKind rule = RuleKind::GaussHermiteMapped, int order = 64);

/// Haar-unitary Monte Carlo average of e^{Tr X U A U^dagger} for diagonal X, A.
McEstimate haar_hciz_mc(const std::vector<double>& x, const std::vector<double>& a, long samples,
                        uint64_t seed);

/// Closed form of the U(N) angular integral:
///   prod_{k<N} k! * det(e^{x_i a_j}) / (Delta(x) Delta(a)).
Cplx hciz_closed(const std::vector<double>& x, const std::vector<double>& a);

/// Gaussian Hermitian-matrix Monte Carlo with the source tilt absorbed into a
/// mean shift (X = hbar A + G). Returns the normalized expectation
///   < prod det(lambda - X) prod det(mu - X)^{-1} >.
McEstimate hermitian_mc(const Potential& pot, const std::vector<double>& a,
                        const std::optional<ChPolySpec>& ch, long samples, uint64_t seed);

}  // namespace smw

#pragma once

#include <string>
#include <vector>

#include "smw/partition.hpp"

namespace smw {

struct DualityReport {
  Cplx lhs{0.0, 0.0};
  Cplx rhs{0.0, 0.0};
  double sign = 1.0;      // the (-1)^{Np+Mq} factor in play
  double residual = 0.0;  // |lhs - sign*rhs| / max(|lhs|, |rhs|)
  std::string note;
};

/// Row/column-reordered form of the psi determinant: evaluating the block
/// matrix with the lambda columns first and the mu rows before the b rows
/// must reproduce (-1)^{Np+Mq} times the original determinant.
DualityReport check_transpose_duality(const AuxKernels& kern, const SourceSpec& src,
                                      const ChPolySpec& ch);

/// Gaussian self-duality: Psi_{N,M;p,q}(a,b;lambda,mu) against the dual-model
/// evaluation Psi_{p,q;N,M}(lambda,mu;a,b) assembled from the Fourier-partner
/// kernels (P<->Q, R<->R~, S_L<->S_R), up to one calibrated constant.
DualityReport check_gaussian_self_duality(const AuxKernels& kern, const SourceSpec& src,
                                          const ChPolySpec& ch);

/// The calibration constant frozen from the smallest nontrivial case (1,0,1,0).
Cplx gaussian_duality_constant(const AuxKernels& kern);

struct WebResidual {
  std::string arrow;  // "P->Q", "Rt->SL", "Rt->SR", "SR->R", "SL->R", "compose"
  double residual = 0.0;
  Cplx lhs{0.0, 0.0}, rhs{0.0, 0.0};
};

struct WebSample {
  Cplx a{0.0, 0.0}, b{0.0, 0.0}, lambda{0.0, 0.0}, mu{0.0, 0.0};
  int k = 0;
};

/// Numerical verification of the transform web among the auxiliary functions:
/// each arrow is the e^{x a}-kernel integral applied by an independent outer
/// rule; both endpoints are evaluated on the kernel module's own grids.
std::vector<WebResidual> check_fourier_web(const AuxKernels& kern,
                                           const std::vector<WebSample>& samples,
                                           int outer_order = 640);

}  // namespace smw

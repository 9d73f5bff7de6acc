#pragma once

#include "smw/detkit.hpp"
#include "smw/quad.hpp"

namespace smw {

struct PartitionResult {
  Cplx value{0.0, 0.0};       // determinant / prefactor
  Cplx prefactor{1.0, 0.0};   // the Delta normalization divided out
  Cplx determinant{0.0, 0.0};
  double conditioning = 1.0;
};

/// Orientation of the equal-parameter (Wronskian) limit relative to the
/// source determinant: lim Z = wronskian_orientation * c * Z-tilde.
double wronskian_orientation(int N, int M);
/// Sign relating Delta_{N+p,M+q} to Delta_{N,M} Delta_{p,q} times the
/// cross-ratio factors, in the determinant-layout convention.
double factorization_sign(int N, int M, int p, int q);

/// Block spec builders (all partition determinants go through these).
BlockDetSpec z_source_spec(const AuxKernels& kern, const SourceSpec& src);
BlockDetSpec psi_spec(const AuxKernels& kern, const SourceSpec& src, const ChPolySpec& ch);
BlockDetSpec z_tilde_spec(const AuxKernels& kern, int N, int M, Cplx a, Cplx b);
BlockDetSpec psi_tilde_spec(const AuxKernels& kern, int N, int M, int p, int q, Cplx a, Cplx b,
                            Cplx lambda, Cplx mu);

/// Z_{N,M}(a;b): N x N block determinant over rows Q_{k-1}(a_i), R(a_i;b_j),
/// divided by the oriented Cauchy factor. Equals the eigenvalue integral.
PartitionResult z_source(const AuxKernels& kern, const SourceSpec& src);

/// N = M specialization: det R(a_i;b_j) over the oriented Cauchy factor.
PartitionResult z_nn_kernel(const AuxKernels& kern, const SourceSpec& src);

/// Characteristic polynomial ratio average Psi_{N,M;p,q}.
PartitionResult psi(const AuxKernels& kern, const SourceSpec& src, const ChPolySpec& ch);

/// Convenience reductions of psi (M = q = 0, M = p = 0, M = 0).
PartitionResult psi_char_poly(const AuxKernels& kern, const std::vector<double>& a,
                              const std::vector<Cplx>& lambda);
PartitionResult psi_char_poly_inverse(const AuxKernels& kern, const std::vector<double>& a,
                                      const std::vector<Cplx>& mu);
PartitionResult psi_char_poly_ratio(const AuxKernels& kern, const std::vector<double>& a,
                                    const std::vector<Cplx>& lambda, const std::vector<Cplx>& mu);

struct PhiResult {
  Cplx from_psi{0.0, 0.0};      // psi * weight dressing
  Cplx from_weighted{0.0, 0.0}; // assembled from the weighted kernel family
  double conditioning = 1.0;
};

/// Weighted correlator Phi: psi times prod e^{-W(lambda)/hbar} prod e^{+W(mu)/hbar},
/// assembled along both routes.
PhiResult phi(const AuxKernels& kern, const SourceSpec& src, const ChPolySpec& ch);

/// Equal-parameter Wronskian tau-function and its constant:
/// Z_{N,M}(a,..,a;b,..,b) = wronskian_orientation * c_nm * z_tilde.
Cplx z_tilde(const AuxKernels& kern, int N, int M, Cplx a, Cplx b);
Cplx c_nm(int N, int M, Cplx a, Cplx b);

Cplx psi_tilde(const AuxKernels& kern, int N, int M, int p, int q, Cplx a, Cplx b, Cplx lambda,
               Cplx mu);
Cplx c_nmpq(int N, int M, int p, int q, Cplx a, Cplx b, Cplx lambda, Cplx mu);

/// Equal-parameter limit of z_source / psi by Richardson extrapolation along
/// fixed offset directions delta in {1e-1, 1e-2, 1e-3}.
Cplx z_source_equal_limit(const AuxKernels& kern, int N, int M, double a, double b);
Cplx psi_equal_limit(const AuxKernels& kern, int N, int M, int p, int q, double a, double b,
                     Cplx lambda, Cplx mu);

}  // namespace smw

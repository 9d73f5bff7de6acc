#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace smw {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// prod_{i<j} (x_i - x_j). Empty and singleton sequences give 1.
template <typename Scalar>
Scalar vandermonde(const std::vector<Scalar>& x) {
  Scalar acc(1);
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j) acc *= x[i] - x[j];
  return acc;
}

/// Generalized Cauchy factor Delta_{N,M}(x;y) = Delta(x) Delta(y) / prod (x_i - y_j),
/// product form. Requires x_i != y_j.
Cplx cauchy_delta(const std::vector<Cplx>& x, const std::vector<Cplx>& y);

/// The same quantity evaluated through the N x N block determinant
/// (monomial rows x_i^{k-1}, k = 1..N-M, then rows 1/(x_i - y_j)), with the
/// row orientation fixed so that it coincides with the product form for
/// every N >= M. Second evaluation path for cross-checks.
Cplx cauchy_delta_det(const std::vector<Cplx>& x, const std::vector<Cplx>& y);

/// n(n-1)/2 mod 2 as a sign exponent; valid for negative n as well.
int half_pairs_parity(long n);

/// Ratio (block determinant in the plain printed layout) / (product form).
/// Depends only on the sizes: (-1)^{g(N-M)+g(M)} with g(n) = n(n-1)/2.
double cauchy_orientation(int N, int M);

/// Delta in the determinant-layout convention: cauchy_orientation * product form.
/// This is the normalization under which all block determinant formulas of the
/// model are exact. Defined for M > N as well (via the same parity formula).
Cplx cauchy_delta_oriented(const std::vector<Cplx>& x, const std::vector<Cplx>& y);

/// Barnes G: G(n) = prod_{i=0}^{n-2} i!.
double barnes_g(int n);

/// Declarative block matrix. Row and column groups carry explicit index
/// lists; entries are produced by a named generator. Derivatives with
/// respect to a parameter act by bumping the indices of the groups that
/// the parameter's rule names (the Wronskian structures used here encode
/// every derivative as an index shift).
struct BlockDetSpec {
  struct Group {
    std::string label;
    std::vector<int> indices;
  };
  struct DerivRule {
    bool rows = true;                 // true: bumps row indices, false: columns
    std::vector<std::string> groups;  // group labels the parameter touches
  };

  std::vector<Group> row_groups;
  std::vector<Group> col_groups;
  std::function<Cplx(const std::string&, int, const std::string&, int)> entry;
  std::map<std::string, DerivRule> derivative_rules;

  static Group contiguous(const std::string& label, int count);
  int rows_total() const;
  int cols_total() const;
};

struct DetResult {
  Cplx value{0.0, 0.0};
  double conditioning = 1.0;  // min |pivot| / max |pivot| from the LU sweep
};

Mat materialize(const BlockDetSpec& spec);
DetResult block_determinant(const Mat& m);
DetResult block_determinant(const BlockDetSpec& spec);

/// Exact derivative of det(spec) of the given order (1 or 2) with respect to
/// the named parameter, as a sum of determinants with bumped rows/columns.
Cplx leibniz_derivative(const BlockDetSpec& spec, const std::string& parameter, int order = 1);

/// Exact mixed second derivative d_p1 d_p2 det(spec).
Cplx leibniz_mixed(const BlockDetSpec& spec, const std::string& p1, const std::string& p2);

/// Minor with one row and one column removed (0-based positions).
Cplx minor_det(const Mat& m, int row, int col);
/// Minor with two rows and two columns removed.
Cplx minor_det2(const Mat& m, int r1, int r2, int c1, int c2);

/// D * D(i,j;k,l) - [ D(i;k) D(j;l) - D(i;l) D(j;k) ]  (1-based positions).
/// Vanishes identically for any square matrix (Desnanot-Jacobi).
Cplx jacobi_residual(const Mat& m, int i, int j, int k, int l);
/// Magnitude scale of the identity's terms, for relative comparisons.
double jacobi_scale(const Mat& m, int i, int j, int k, int l);

}  // namespace smw

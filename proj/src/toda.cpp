#include "smw/toda.hpp"

#include <cmath>

namespace smw {

double relative_residual(Cplx lhs, Cplx rhs) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
  return std::abs(lhs - rhs) / scale;
}

namespace {

BilinearResidual make(const std::string& eq, Cplx lhs, Cplx rhs, DerivMethod method) {
  BilinearResidual r;
  r.equation = eq;
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = relative_residual(lhs, rhs);
  r.method = method;
  return r;
}

BilinearResidual skip(const std::string& eq, const std::string& why) {
  BilinearResidual r;
  r.equation = eq;
  r.skipped = true;
  r.note = why;
  return r;
}

}  // namespace

BilinearResidual toda_2d_residual(const AuxKernels& kern, int N, int M, Cplx a, Cplx b,
                                  DerivMethod method, double h) {
  if (M < 1 || N < M)
    return skip("toda2d", "site needs N >= M >= 1 so that (N-1,M-1) is a valid lattice point");
  const Cplx up = z_tilde(kern, N + 1, M + 1, a, b);
  const Cplx down = z_tilde(kern, N - 1, M - 1, a, b);
  const BlockDetSpec spec = z_tilde_spec(kern, N, M, a, b);
  const DetResult center = block_determinant(spec);

  Cplx da, db, dab;
  if (method == DerivMethod::ExactLeibniz) {
    da = leibniz_derivative(spec, "a", 1);
    db = leibniz_derivative(spec, "b", 1);
    dab = leibniz_mixed(spec, "a", "b");
  } else {
    auto f = [&](Cplx aa, Cplx bb) { return z_tilde(kern, N, M, aa, bb); };
    da = (f(a + h, b) - f(a - h, b)) / (2.0 * h);
    db = (f(a, b + h) - f(a, b - h)) / (2.0 * h);
    dab = (f(a + h, b + h) - f(a + h, b - h) - f(a - h, b + h) + f(a - h, b - h)) / (4.0 * h * h);
  }

  BilinearResidual r = make("toda2d", up * down, center.value * dab - da * db, method);
  if (center.conditioning < 1e-13) r.inconclusive = true;
  return r;
}

namespace {

// z_tilde determinant with explicit Taylor-row and Q-column index lists
// (fermionic R columns stay contiguous). Used for the skip minors of the 1D
// lattice identity at M >= 1.
Cplx z_tilde_indexed(const AuxKernels& kern, int M, const std::vector<int>& taylor,
                     const std::vector<int>& qcols, Cplx a, Cplx b) {
  BlockDetSpec spec;
  spec.row_groups = {{"taylor", taylor}};
  spec.col_groups = {{"qcol", qcols}, BlockDetSpec::contiguous("rcol", M)};
  spec.entry = [&kern, a, b](const std::string&, int ri, const std::string& cl, int ci) -> Cplx {
    if (cl == "qcol") return kern.q_func(ri + ci - 2, a);
    return kern.r_func(ri - 1, ci - 1, a, b);
  };
  return block_determinant(spec).value;
}

std::vector<int> range1(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  return v;
}

std::vector<int> skip_top(int n) {
  // 1..n-1 with the top index bumped: (1, .., n-2, n).
  std::vector<int> v = range1(n - 1);
  if (!v.empty()) v.back() = n;
  return v;
}

}  // namespace

BilinearResidual toda_1d_residual(const AuxKernels& kern, int N, int M, Cplx a, Cplx b,
                                  DerivMethod method, double h) {
  if (N - 1 < M || M < 0)
    return skip("toda1d", "site needs N - 1 >= M so that (N-1,M) is a valid lattice point");
  const Cplx up = z_tilde(kern, N + 1, M, a, b);
  const Cplx down = z_tilde(kern, N - 1, M, a, b);
  const BlockDetSpec spec = z_tilde_spec(kern, N, M, a, b);
  const DetResult center = block_determinant(spec);

  Cplx rhs;
  if (M == 0) {
    Cplx da, daa;
    if (method == DerivMethod::ExactLeibniz) {
      da = leibniz_derivative(spec, "a", 1);
      daa = leibniz_derivative(spec, "a", 2);
    } else {
      auto f = [&](Cplx aa) { return z_tilde(kern, N, M, aa, b); };
      da = (f(a + h) - f(a - h)) / (2.0 * h);
      daa = (f(a + h) - 2.0 * z_tilde(kern, N, M, a, b) + f(a - h)) / (h * h);
    }
    rhs = center.value * daa - da * da;
  } else {
    // Jacobi-minor form: the printed d_a^2 version holds only at M = 0; the
    // general-site identity keeps the honest skip minors of Z~_{N+1,M}.
    const int K = N + 1 - M;  // Q-columns of the (N+1,M) determinant
    const Cplx a2 =
        z_tilde_indexed(kern, M, skip_top(N + 1), skip_top(K), a, b);  // both skips
    const Cplx a3 = z_tilde_indexed(kern, M, range1(N), skip_top(K), a, b);  // column skip
    Cplx da;  // row skip of Z~_{N+1,M} = d_a Z~_{N,M}
    if (method == DerivMethod::ExactLeibniz)
      da = leibniz_derivative(spec, "a", 1);
    else {
      auto f = [&](Cplx aa) { return z_tilde(kern, N, M, aa, b); };
      da = (f(a + h) - f(a - h)) / (2.0 * h);
    }
    rhs = a2 * center.value - a3 * da;
  }

  BilinearResidual r = make("toda1d", up * down, rhs, method);
  if (M >= 1) r.note = "general-site Jacobi form (printed d_a^2 form is the M = 0 case)";
  if (center.conditioning < 1e-13) r.inconclusive = true;
  return r;
}

BilinearResidual toda_1d_naive_residual(const AuxKernels& kern, int N, int M, Cplx a, Cplx b) {
  if (N - 1 < M || M < 0) return skip("toda1d-naive", "invalid lattice site");
  const Cplx up = z_tilde(kern, N + 1, M, a, b);
  const Cplx down = z_tilde(kern, N - 1, M, a, b);
  const BlockDetSpec spec = z_tilde_spec(kern, N, M, a, b);
  const Cplx center = block_determinant(spec).value;
  const Cplx da = leibniz_derivative(spec, "a", 1);
  const Cplx daa = leibniz_derivative(spec, "a", 2);
  BilinearResidual r = make("toda1d-naive", up * down, center * daa - da * da,
                            DerivMethod::ExactLeibniz);
  r.note = "verbatim d_a^2 form; not an identity for M >= 1";
  return r;
}

namespace {

struct PsiTilde {
  const AuxKernels& kern;
  Cplx a, b, lambda, mu;

  Cplx val(int N, int M, int p, int q) const {
    return psi_tilde(kern, N, M, p, q, a, b, lambda, mu);
  }
  BlockDetSpec spec(int N, int M, int p, int q) const {
    return psi_tilde_spec(kern, N, M, p, q, a, b, lambda, mu);
  }
  bool valid(int N, int M, int p, int q) const {
    return N >= 0 && M >= 0 && p >= 0 && q >= 0 && N + p - M - q >= 0;
  }
};

}  // namespace

std::vector<BilinearResidual> psi_bilinear_residuals(const AuxKernels& kern, int N, int M, int p,
                                                     int q, Cplx a, Cplx b, Cplx lambda, Cplx mu) {
  const PsiTilde t{kern, a, b, lambda, mu};
  std::vector<BilinearResidual> out;
  if (!t.valid(N, M, p, q)) {
    out.push_back(skip("eq1", "base indices invalid"));
    return out;
  }
  const Cplx base = t.val(N, M, p, q);

  // eq1: two mu rows against two lambda columns -> (p-2, q-2).
  if (t.valid(N, M, p - 2, q - 2) && p >= 2 && q >= 2) {
    const BlockDetSpec s = t.spec(N, M, p - 1, q - 1);
    const Cplx A = block_determinant(s).value;
    const Cplx rhs = A * leibniz_mixed(s, "lambda", "mu") -
                     leibniz_derivative(s, "lambda", 1) * leibniz_derivative(s, "mu", 1);
    out.push_back(make("eq1", base * t.val(N, M, p - 2, q - 2), rhs, DerivMethod::ExactLeibniz));
  } else {
    out.push_back(skip("eq1", "shift (p-2, q-2) leaves an invalid block structure"));
  }

  // eq2: two mu rows against two x columns -> (N-2, q-2).
  if (t.valid(N - 2, M, p, q - 2) && N >= 2 && q >= 2) {
    const BlockDetSpec s = t.spec(N - 1, M, p, q - 1);
    const Cplx A = block_determinant(s).value;
    const Cplx rhs = A * leibniz_mixed(s, "a", "mu") -
                     leibniz_derivative(s, "a", 1) * leibniz_derivative(s, "mu", 1);
    out.push_back(make("eq2", base * t.val(N - 2, M, p, q - 2), rhs, DerivMethod::ExactLeibniz));
  } else {
    out.push_back(skip("eq2", "shift (N-2, q-2) leaves an invalid block structure"));
  }

  // eq3: two b rows against two lambda columns -> (M-2, p-2).
  if (t.valid(N, M - 2, p - 2, q) && M >= 2 && p >= 2) {
    const BlockDetSpec s = t.spec(N, M - 1, p - 1, q);
    const Cplx A = block_determinant(s).value;
    const Cplx rhs = A * leibniz_mixed(s, "lambda", "b") -
                     leibniz_derivative(s, "lambda", 1) * leibniz_derivative(s, "b", 1);
    out.push_back(make("eq3", base * t.val(N, M - 2, p - 2, q), rhs, DerivMethod::ExactLeibniz));
  } else {
    out.push_back(skip("eq3", "shift (M-2, p-2) leaves an invalid block structure"));
  }

  // eq4: two b rows against two x columns -> (N-2, M-2).
  if (t.valid(N - 2, M - 2, p, q) && N >= 2 && M >= 2) {
    const BlockDetSpec s = t.spec(N - 1, M - 1, p, q);
    const Cplx A = block_determinant(s).value;
    const Cplx rhs = A * leibniz_mixed(s, "a", "b") -
                     leibniz_derivative(s, "a", 1) * leibniz_derivative(s, "b", 1);
    out.push_back(make("eq4", base * t.val(N - 2, M - 2, p, q), rhs, DerivMethod::ExactLeibniz));
  } else {
    out.push_back(skip("eq4", "shift (N-2, M-2) leaves an invalid block structure"));
  }

  // eq5: two monomial rows against two lambda columns -> (p-2, q). Closed
  // derivative form requires M = 0 (fermionic source rows otherwise couple
  // through the string terms of the monomial identity).
  if (p >= 2 && t.valid(N, M, p - 2, q) && M == 0) {
    const BlockDetSpec s = t.spec(N, M, p - 1, q);
    const Cplx A = block_determinant(s).value;
    const Cplx rhs = A * leibniz_mixed(s, "a", "lambda") -
                     leibniz_derivative(s, "a", 1) * leibniz_derivative(s, "lambda", 1) +
                     static_cast<double>(p - 1) * A * A;
    out.push_back(make("eq5", base * t.val(N, M, p - 2, q), rhs, DerivMethod::ExactLeibniz));
  } else if (p >= 2 && t.valid(N, M, p - 2, q)) {
    out.push_back(skip("eq5", "derivative form valid only at M = 0"));
  } else {
    out.push_back(skip("eq5", "shift (p-2, q) leaves an invalid block structure"));
  }

  // eq6: two monomial rows against two x columns -> (N-2, M); the reduced
  // form is 1D Toda in N. Requires M = 0 for the same reason as eq5.
  if (N >= 2 && t.valid(N - 2, M, p, q) && M == 0) {
    const BlockDetSpec s = t.spec(N - 1, M, p, q);
    const Cplx B = block_determinant(s).value;
    const Cplx da = leibniz_derivative(s, "a", 1);
    const Cplx rhs = B * leibniz_derivative(s, "a", 2) - da * da;
    out.push_back(make("eq6", base * t.val(N - 2, M, p, q), rhs, DerivMethod::ExactLeibniz));
  } else if (N >= 2 && t.valid(N - 2, M, p, q)) {
    out.push_back(skip("eq6", "derivative form valid only at M = 0"));
  } else {
    out.push_back(skip("eq6", "shift (N-2, M) leaves an invalid block structure"));
  }

  // 2D Toda in the (lambda, mu) direction, the eq1 consequence.
  if (t.valid(N, M, p + 1, q + 1) && t.valid(N, M, p - 1, q - 1) && p >= 1 && q >= 1) {
    const BlockDetSpec s = t.spec(N, M, p, q);
    const Cplx rhs = base * leibniz_mixed(s, "lambda", "mu") -
                     leibniz_derivative(s, "lambda", 1) * leibniz_derivative(s, "mu", 1);
    out.push_back(make("toda2d-lm", t.val(N, M, p + 1, q + 1) * t.val(N, M, p - 1, q - 1), rhs,
                       DerivMethod::ExactLeibniz));
  } else {
    out.push_back(skip("toda2d-lm", "lattice neighbors in (p,q) unavailable"));
  }

  return out;
}

BilinearResidual monomial_det_identity(int N, int M, Cplx x) {
  if (M < 1) return skip("monomial-id", "requires M >= 1");
  if (x == Cplx(0.0)) return skip("monomial-id", "requires x != 0");
  auto dpow = [](int power, int order, Cplx xx) { return p_func_deriv(power, order, xx); };

  Mat lhs_m(M, M), rhs_m(M, M);
  for (int r = 0; r < M; ++r) {
    const int pw = (r == M - 1) ? N + M : N + r;  // skip power N+M-1
    for (int c = 0; c < M; ++c) lhs_m(r, c) = dpow(pw, c, x);
  }
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < M; ++c) rhs_m(r, c) = dpow(N + r, c, x);

  const Cplx lhs = block_determinant(lhs_m).value;
  const Cplx rhs = static_cast<double>(M) * x * block_determinant(rhs_m).value;
  return make("monomial-id", lhs, rhs, DerivMethod::ExactLeibniz);
}

}  // namespace smw

#include "smw/partition.hpp"

#include <cmath>
#include <stdexcept>

namespace smw {

namespace {

std::vector<Cplx> to_cplx(const std::vector<double>& v) {
  return std::vector<Cplx>(v.begin(), v.end());
}

Cplx oriented_prefactor(const std::vector<double>& a, const std::vector<double>& b) {
  return cauchy_delta_oriented(to_cplx(a), to_cplx(b));
}

PartitionResult from_det(const DetResult& det, Cplx prefactor, Cplx extra_sign = Cplx(1.0)) {
  PartitionResult r;
  r.determinant = det.value;
  r.prefactor = prefactor;
  r.conditioning = det.conditioning;
  r.value = extra_sign * det.value / prefactor;
  return r;
}

}  // namespace

double wronskian_orientation(int N, int M) {
  const int par = (half_pairs_parity(N) + half_pairs_parity(N - M)) % 2;
  return par == 0 ? 1.0 : -1.0;
}

double factorization_sign(int /*N*/, int M, int p, int q) {
  return (M * (p + q)) % 2 == 0 ? 1.0 : -1.0;
}

BlockDetSpec z_source_spec(const AuxKernels& kern, const SourceSpec& src) {
  const int N = src.N(), M = src.M();
  BlockDetSpec spec;
  spec.row_groups = {BlockDetSpec::contiguous("mono", N - M), BlockDetSpec::contiguous("bsrc", M)};
  spec.col_groups = {BlockDetSpec::contiguous("asrc", N)};
  const std::vector<double> a = src.a, b = src.b;
  spec.entry = [&kern, a, b](const std::string& rl, int ri, const std::string&, int ci) -> Cplx {
    if (rl == "mono") return kern.q_func(ri - 1, a[ci - 1]);
    return kern.r_func(0, 0, a[ci - 1], b[ri - 1]);
  };
  return spec;
}

PartitionResult z_source(const AuxKernels& kern, const SourceSpec& src) {
  if (src.N() == 0) return {Cplx(1.0), Cplx(1.0), Cplx(1.0), 1.0};
  return from_det(block_determinant(z_source_spec(kern, src)), oriented_prefactor(src.a, src.b));
}

PartitionResult z_nn_kernel(const AuxKernels& kern, const SourceSpec& src) {
  if (src.N() != src.M()) throw std::invalid_argument("z_nn_kernel: requires N == M");
  BlockDetSpec spec;
  const int N = src.N();
  spec.row_groups = {BlockDetSpec::contiguous("bsrc", N)};
  spec.col_groups = {BlockDetSpec::contiguous("asrc", N)};
  const std::vector<double> a = src.a, b = src.b;
  spec.entry = [&kern, a, b](const std::string&, int ri, const std::string&, int ci) -> Cplx {
    return kern.r_func(0, 0, a[ci - 1], b[ri - 1]);
  };
  return from_det(block_determinant(spec), oriented_prefactor(src.a, src.b));
}

BlockDetSpec psi_spec(const AuxKernels& kern, const SourceSpec& src, const ChPolySpec& ch) {
  const int N = src.N(), M = src.M(), p = ch.p(), q = ch.q();
  const int K = N + p - M - q;
  if (K < 0) throw std::invalid_argument("psi: requires N + p >= M + q");
  BlockDetSpec spec;
  spec.row_groups = {BlockDetSpec::contiguous("mono", K), BlockDetSpec::contiguous("bsrc", M),
                     BlockDetSpec::contiguous("mu", q)};
  spec.col_groups = {BlockDetSpec::contiguous("asrc", N), BlockDetSpec::contiguous("lch", p)};
  const std::vector<double> a = src.a, b = src.b;
  const std::vector<Cplx> lam = ch.lambda, mu = ch.mu;
  spec.entry = [&kern, a, b, lam, mu](const std::string& rl, int ri, const std::string& cl,
                                      int ci) -> Cplx {
    const bool acol = (cl == "asrc");
    if (rl == "mono") return acol ? kern.q_func(ri - 1, a[ci - 1]) : p_func(ri - 1, lam[ci - 1]);
    if (rl == "bsrc")
      return acol ? kern.r_func(0, 0, a[ci - 1], b[ri - 1]) : kern.s_right(0, 0, lam[ci - 1], b[ri - 1]);
    return acol ? kern.s_left(0, 0, a[ci - 1], mu[ri - 1]) : r_tilde(lam[ci - 1], mu[ri - 1]);
  };
  return spec;
}

PartitionResult psi(const AuxKernels& kern, const SourceSpec& src, const ChPolySpec& ch) {
  const int N = src.N(), M = src.M(), p = ch.p(), q = ch.q();
  if (N + p == 0) return {Cplx(1.0), Cplx(1.0), Cplx(1.0), 1.0};
  const Cplx pref = oriented_prefactor(src.a, src.b) * cauchy_delta_oriented(ch.lambda, ch.mu);
  return from_det(block_determinant(psi_spec(kern, src, ch)), pref,
                  factorization_sign(N, M, p, q));
}

PartitionResult psi_char_poly(const AuxKernels& kern, const std::vector<double>& a,
                              const std::vector<Cplx>& lambda) {
  return psi(kern, SourceSpec(a, {}), ChPolySpec(lambda, {}));
}

PartitionResult psi_char_poly_inverse(const AuxKernels& kern, const std::vector<double>& a,
                                      const std::vector<Cplx>& mu) {
  return psi(kern, SourceSpec(a, {}), ChPolySpec({}, mu));
}

PartitionResult psi_char_poly_ratio(const AuxKernels& kern, const std::vector<double>& a,
                                    const std::vector<Cplx>& lambda, const std::vector<Cplx>& mu) {
  return psi(kern, SourceSpec(a, {}), ChPolySpec(lambda, mu));
}

PhiResult phi(const AuxKernels& kern, const SourceSpec& src, const ChPolySpec& ch) {
  const Potential& pot = kern.potential();
  Cplx dress(1.0);
  for (const Cplx& l : ch.lambda) dress *= std::exp(-pot(l) / pot.hbar);
  for (const Cplx& m : ch.mu) dress *= std::exp(pot(m) / pot.hbar);

  const PartitionResult base = psi(kern, src, ch);

  // Independent assembly from the weighted kernel family: the lambda columns
  // and mu rows of the psi determinant carry the dressing entrywise.
  BlockDetSpec spec = psi_spec(kern, src, ch);
  const std::vector<double> a = src.a, b = src.b;
  const std::vector<Cplx> lam = ch.lambda, mu = ch.mu;
  spec.entry = [&kern, a, b, lam, mu](const std::string& rl, int ri, const std::string& cl,
                                      int ci) -> Cplx {
    const bool acol = (cl == "asrc");
    if (rl == "mono")
      return acol ? kern.q_func(ri - 1, a[ci - 1]) : kern.weighted_p(ri - 1, lam[ci - 1]);
    if (rl == "bsrc")
      return acol ? kern.r_func(0, 0, a[ci - 1], b[ri - 1])
                  : kern.weighted_s_right(lam[ci - 1], b[ri - 1]);
    return acol ? kern.weighted_s_left(a[ci - 1], mu[ri - 1])
                : kern.weighted_r_tilde(lam[ci - 1], mu[ri - 1]);
  };
  const DetResult det = block_determinant(spec);
  const Cplx pref = oriented_prefactor(src.a, src.b) * cauchy_delta_oriented(ch.lambda, ch.mu);

  PhiResult out;
  out.from_psi = base.value * dress;
  out.from_weighted = factorization_sign(src.N(), src.M(), ch.p(), ch.q()) * det.value / pref;
  out.conditioning = det.conditioning;
  return out;
}

BlockDetSpec z_tilde_spec(const AuxKernels& kern, int N, int M, Cplx a, Cplx b) {
  if (N < M || M < 0) throw std::invalid_argument("z_tilde: requires N >= M >= 0");
  BlockDetSpec spec;
  spec.row_groups = {BlockDetSpec::contiguous("taylor", N)};
  spec.col_groups = {BlockDetSpec::contiguous("qcol", N - M), BlockDetSpec::contiguous("rcol", M)};
  spec.entry = [&kern, a, b](const std::string&, int ri, const std::string& cl, int ci) -> Cplx {
    if (cl == "qcol") return kern.q_func(ri + ci - 2, a);
    return kern.r_func(ri - 1, ci - 1, a, b);
  };
  spec.derivative_rules["a"] = {true, {"taylor"}};
  spec.derivative_rules["b"] = {false, {"rcol"}};
  return spec;
}

Cplx z_tilde(const AuxKernels& kern, int N, int M, Cplx a, Cplx b) {
  if (N == 0 && M == 0) return Cplx(1.0);
  return block_determinant(z_tilde_spec(kern, N, M, a, b)).value;
}

Cplx c_nm(int N, int M, Cplx a, Cplx b) {
  return wronskian_orientation(N, M) * std::pow(a - b, N * M) /
         (barnes_g(N + 1) * barnes_g(M + 1));
}

BlockDetSpec psi_tilde_spec(const AuxKernels& kern, int N, int M, int p, int q, Cplx a, Cplx b,
                            Cplx lambda, Cplx mu) {
  const int K = N + p - M - q;
  if (K < 0) throw std::invalid_argument("psi_tilde: requires N + p >= M + q");
  BlockDetSpec spec;
  spec.row_groups = {BlockDetSpec::contiguous("mono", K), BlockDetSpec::contiguous("brow", M),
                     BlockDetSpec::contiguous("murow", q)};
  spec.col_groups = {BlockDetSpec::contiguous("acol", N), BlockDetSpec::contiguous("lcol", p)};
  spec.entry = [&kern, a, b, lambda, mu](const std::string& rl, int ri, const std::string& cl,
                                         int ci) -> Cplx {
    const bool acol = (cl == "acol");
    if (rl == "mono")
      return acol ? kern.q_func(ri + ci - 2, a) : p_func_deriv(ri - 1, ci - 1, lambda);
    if (rl == "brow")
      return acol ? kern.r_func(ci - 1, ri - 1, a, b) : kern.s_right(ci - 1, ri - 1, lambda, b);
    return acol ? kern.s_left(ci - 1, ri - 1, a, mu) : r_tilde_deriv(ci - 1, ri - 1, lambda, mu);
  };
  spec.derivative_rules["a"] = {false, {"acol"}};
  spec.derivative_rules["lambda"] = {false, {"lcol"}};
  spec.derivative_rules["b"] = {true, {"brow"}};
  spec.derivative_rules["mu"] = {true, {"murow"}};
  return spec;
}

Cplx psi_tilde(const AuxKernels& kern, int N, int M, int p, int q, Cplx a, Cplx b, Cplx lambda,
               Cplx mu) {
  if (N + p == 0) return Cplx(1.0);
  return block_determinant(psi_tilde_spec(kern, N, M, p, q, a, b, lambda, mu)).value;
}

Cplx c_nmpq(int N, int M, int p, int q, Cplx a, Cplx b, Cplx lambda, Cplx mu) {
  const double orient = wronskian_orientation(N, M) * wronskian_orientation(p, q) *
                        factorization_sign(N, M, p, q);
  return orient * std::pow(a - b, N * M) * std::pow(lambda - mu, p * q) /
         (barnes_g(N + 1) * barnes_g(M + 1) * barnes_g(p + 1) * barnes_g(q + 1));
}

namespace {

// Lagrange extrapolation to delta = 0 through (delta_i, f_i).
Cplx richardson(const std::vector<double>& deltas, const std::vector<Cplx>& f) {
  Cplx acc = 0.0;
  for (size_t i = 0; i < deltas.size(); ++i) {
    Cplx term = f[i];
    for (size_t j = 0; j < deltas.size(); ++j) {
      if (j == i) continue;
      term *= -deltas[j] / (deltas[i] - deltas[j]);
    }
    acc += term;
  }
  return acc;
}

const std::vector<double> kOffsets = {1e-1, 1e-2, 1e-3};

}  // namespace

Cplx z_source_equal_limit(const AuxKernels& kern, int N, int M, double a, double b) {
  std::vector<Cplx> vals;
  for (double d : kOffsets) {
    std::vector<double> av(N), bv(M);
    for (int i = 0; i < N; ++i) av[i] = a + d * i;
    for (int j = 0; j < M; ++j) bv[j] = b + d * (j + 0.5);
    vals.push_back(z_source(kern, SourceSpec(av, bv)).value);
  }
  return richardson(kOffsets, vals);
}

Cplx psi_equal_limit(const AuxKernels& kern, int N, int M, int p, int q, double a, double b,
                     Cplx lambda, Cplx mu) {
  std::vector<Cplx> vals;
  for (double d : kOffsets) {
    std::vector<double> av(N), bv(M);
    std::vector<Cplx> lv(p), mv(q);
    for (int i = 0; i < N; ++i) av[i] = a + d * i;
    for (int j = 0; j < M; ++j) bv[j] = b + d * (j + 0.5);
    for (int i = 0; i < p; ++i) lv[i] = lambda + d * (i + 0.25);
    for (int j = 0; j < q; ++j) mv[j] = mu + d * (j + 0.75);
    vals.push_back(psi(kern, SourceSpec(av, bv), ChPolySpec(lv, mv)).value);
  }
  return richardson(kOffsets, vals);
}

}  // namespace smw

#include "smw/jobs.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <semaphore>
#include <sstream>

#include "smw/detkit.hpp"
#include "smw/duality.hpp"
#include "smw/grassmann.hpp"
#include "smw/oracle.hpp"
#include "smw/partition.hpp"
#include "smw/toda.hpp"

namespace smw {

namespace {

void require_keys(const Json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

Cplx parse_cplx(const Json& j, const std::string& where) {
  if (j.is_number()) return Cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Cplx(j[0].get<double>(), j[1].get<double>());
  throw ConfigError(where + ": expected a number or [re, im]");
}

std::vector<double> parse_reals(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(where + ": expected numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

std::vector<Cplx> parse_cplx_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<Cplx> v;
  for (const auto& e : j) v.push_back(parse_cplx(e, where));
  return v;
}

Json cplx_json(Cplx z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

double JobConfig::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  if (it == tolerances.end()) return fallback;
  if (!it->is_number()) throw ConfigError("tolerances." + name + ": expected a number");
  return it->get<double>();
}

JobConfig JobConfig::parse(const Json& j) {
  require_keys(j, {"schema", "potential", "scheme", "quadrature", "params", "tolerances",
                   "timing"},
               "config");
  if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != 1)
    throw ConfigError("config: requires \"schema\": 1");

  JobConfig cfg;
  if (j.contains("potential")) {
    const Json& p = j["potential"];
    require_keys(p, {"coefficients", "hbar"}, "potential");
    if (!p.contains("coefficients") || !p.contains("hbar"))
      throw ConfigError("potential: needs coefficients and hbar");
    try {
      cfg.potential = Potential(parse_reals(p["coefficients"], "potential.coefficients"),
                                p["hbar"].get<double>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("potential: ") + e.what());
    }
  }
  std::string mode = "flip-sign";
  double eps = -1.0;
  std::optional<Potential> wf;
  if (j.contains("scheme")) {
    const Json& s = j["scheme"];
    require_keys(s, {"mode", "epsilon", "fermionic_potential"}, "scheme");
    if (s.contains("mode")) mode = s["mode"].get<std::string>();
    if (s.contains("epsilon")) eps = s["epsilon"].get<double>();
    if (s.contains("fermionic_potential")) {
      const Json& f = s["fermionic_potential"];
      require_keys(f, {"coefficients", "hbar"}, "scheme.fermionic_potential");
      wf = Potential(parse_reals(f["coefficients"], "scheme.fermionic_potential.coefficients"),
                     f["hbar"].get<double>());
    }
  }
  try {
    if (mode == "flip-sign")
      cfg.scheme = WeightScheme::flip_sign(cfg.potential, eps);
    else if (mode == "custom-fermionic") {
      if (!wf) throw ConfigError("scheme: custom-fermionic needs fermionic_potential");
      cfg.scheme = WeightScheme::custom_fermionic(*wf, eps);
    } else if (mode == "fresnel")
      throw ConfigError("scheme: fresnel mode is recognized but not implemented");
    else
      throw ConfigError("scheme: unknown mode '" + mode + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scheme: ") + e.what());
  }

  if (j.contains("quadrature")) {
    const Json& q = j["quadrature"];
    require_keys(q, {"kind", "order"}, "quadrature");
    if (q.contains("kind")) {
      const std::string kind = q["kind"].get<std::string>();
      if (kind == "gauss-hermite-mapped")
        cfg.rule_kind = RuleKind::GaussHermiteMapped;
      else if (kind == "tanh-sinh")
        cfg.rule_kind = RuleKind::TanhSinh;
      else
        throw ConfigError("quadrature: unknown kind '" + kind + "'");
    }
    if (q.contains("order")) cfg.rule_order = q["order"].get<int>();
    if (cfg.rule_order < 8) throw ConfigError("quadrature: order must be >= 8");
  }
  if (j.contains("params")) cfg.params = j["params"];
  if (j.contains("tolerances")) cfg.tolerances = j["tolerances"];
  if (j.contains("timing")) cfg.timing = j["timing"].get<bool>();
  cfg.echo = j;
  return cfg;
}

JobConfig JobConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse(j);
}

namespace {

AuxKernels make_kernels(const JobConfig& cfg) {
  return AuxKernels(cfg.potential, cfg.scheme, cfg.rule_kind, cfg.rule_order);
}

CheckRow check(const std::string& id, int N, int M, int p, int q, double residual, double tol) {
  CheckRow r;
  r.check_id = id;
  r.N = N;
  r.M = M;
  r.p = p;
  r.q = q;
  r.residual = residual;
  r.tolerance = tol;
  r.status = residual <= tol ? "pass" : "fail";
  return r;
}

CheckRow info(const std::string& id, int N, int M, int p, int q) {
  CheckRow r;
  r.check_id = id;
  r.N = N;
  r.M = M;
  r.p = p;
  r.q = q;
  r.status = "info";
  return r;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

SourceSpec source_from(const JobConfig& cfg) {
  std::vector<double> a, b;
  if (cfg.params.contains("a")) a = parse_reals(cfg.params["a"], "params.a");
  if (cfg.params.contains("b")) b = parse_reals(cfg.params["b"], "params.b");
  if (a.empty()) a = {0.4, -0.2};
  return SourceSpec(a, b);
}

ChPolySpec chpoly_from(const JobConfig& cfg) {
  std::vector<Cplx> lam, mu;
  if (cfg.params.contains("lambda")) lam = parse_cplx_list(cfg.params["lambda"], "params.lambda");
  if (cfg.params.contains("mu")) mu = parse_cplx_list(cfg.params["mu"], "params.mu");
  return ChPolySpec(lam, mu);
}

uint64_t seed_from(const JobConfig& cfg, uint64_t fallback = 20240817ull) {
  if (cfg.params.contains("seed")) return cfg.params["seed"].get<uint64_t>();
  return fallback;
}

long samples_from(const JobConfig& cfg, long fallback = 100000) {
  if (cfg.params.contains("samples")) return cfg.params["samples"].get<long>();
  return fallback;
}

}  // namespace

JobOutcome run_partition(const JobConfig& cfg) {
  const AuxKernels kern = make_kernels(cfg);
  const SourceSpec src = source_from(cfg);
  JobOutcome out;

  CheckRow row = info("z_source", src.N(), src.M(), 0, 0);
  const PartitionResult z = z_source(kern, src);
  row.values = {{"value", z.value}, {"determinant", z.determinant}, {"prefactor", z.prefactor}};
  row.note = "conditioning " + std::to_string(z.conditioning);
  out.rows.push_back(row);

  if (src.N() == src.M() && src.N() > 0) {
    CheckRow nn = info("z_nn_kernel", src.N(), src.M(), 0, 0);
    nn.values = {{"value", z_nn_kernel(kern, src).value}};
    out.rows.push_back(nn);
  }

  // Equal-parameter Wronskian at the configured center-of-mass values.
  const double a0 = cfg.params.contains("a0") ? cfg.params["a0"].get<double>() : 0.37;
  const double b0 = cfg.params.contains("b0") ? cfg.params["b0"].get<double>() : -0.21;
  CheckRow zt = info("z_tilde", src.N(), src.M(), 0, 0);
  const Cplx ztv = z_tilde(kern, src.N(), src.M(), a0, b0);
  zt.values = {{"z_tilde", ztv}, {"c_nm", c_nm(src.N(), src.M(), a0, b0)}};
  out.rows.push_back(zt);
  return out;
}

JobOutcome run_chpoly(const JobConfig& cfg) {
  const AuxKernels kern = make_kernels(cfg);
  const SourceSpec src = source_from(cfg);
  const ChPolySpec ch = chpoly_from(cfg);
  validate_combined(src, ch);
  JobOutcome out;

  const PartitionResult ps = psi(kern, src, ch);
  CheckRow row = info("psi", src.N(), src.M(), ch.p(), ch.q());
  row.values = {{"value", ps.value}};
  out.rows.push_back(row);

  const PhiResult ph = phi(kern, src, ch);
  CheckRow phir = check("phi_dual_assembly", src.N(), src.M(), ch.p(), ch.q(),
                        relative_residual(ph.from_psi, ph.from_weighted),
                        cfg.tolerance("phi", 1e-8));
  phir.values = {{"from_psi", ph.from_psi}, {"from_weighted", ph.from_weighted}};
  out.rows.push_back(phir);
  out.any_fail |= phir.status == "fail";

  const double a0 = cfg.params.contains("a0") ? cfg.params["a0"].get<double>() : 0.37;
  const double b0 = cfg.params.contains("b0") ? cfg.params["b0"].get<double>() : -0.21;
  const Cplx l0 = cfg.params.contains("lambda0")
                      ? parse_cplx(cfg.params["lambda0"], "params.lambda0")
                      : Cplx(0.54, 0.0);
  const Cplx m0 = cfg.params.contains("mu0") ? parse_cplx(cfg.params["mu0"], "params.mu0")
                                             : Cplx(0.13, 0.77);
  CheckRow pt = info("psi_tilde", src.N(), src.M(), ch.p(), ch.q());
  pt.values = {{"psi_tilde", psi_tilde(kern, src.N(), src.M(), ch.p(), ch.q(), a0, b0, l0, m0)},
               {"c_nmpq", c_nmpq(src.N(), src.M(), ch.p(), ch.q(), a0, b0, l0, m0)}};
  out.rows.push_back(pt);
  return out;
}

JobOutcome run_verify_duality(const JobConfig& cfg) {
  const AuxKernels kern = make_kernels(cfg);
  JobOutcome out;
  const double tol_t = cfg.tolerance("transpose", 1e-10);
  const double tol_s = cfg.tolerance("selfdual", 1e-5);
  const uint64_t seed = seed_from(cfg);
  const int combos = cfg.params.contains("combinations")
                         ? cfg.params["combinations"].get<int>()
                         : 50;

  // Seeded (N,M,p,q) sweeps for the transpose identity.
  long drawn = 0;
  uint64_t ctr = 0;
  while (drawn < combos) {
    const int N = 1 + static_cast<int>(CounterRng::mix(seed, ctr++) % 3);
    const int M = static_cast<int>(CounterRng::mix(seed, ctr++) % (N + 1));
    const int p = static_cast<int>(CounterRng::mix(seed, ctr++) % 3);
    const int q = static_cast<int>(CounterRng::mix(seed, ctr++) % 3);
    if (N + p <= M + q) continue;
    std::vector<double> a(N), b(M);
    std::vector<Cplx> lam(p), mu(q);
    for (int i = 0; i < N; ++i) a[i] = -1.2 + 2.4 * CounterRng::uniform(seed, ctr++);
    for (int j = 0; j < M; ++j) b[j] = -1.4 + 2.4 * CounterRng::uniform(seed, ctr++);
    for (int i = 0; i < p; ++i)
      lam[i] = Cplx(-1.0 + 2.0 * CounterRng::uniform(seed, ctr++), 0.0);
    for (int j = 0; j < q; ++j) {
      const double re = CounterRng::uniform(seed, ctr++);
      const double im = CounterRng::uniform(seed, ctr++);
      mu[j] = Cplx(-0.5 + re, 0.5 + im);
    }
    SourceSpec srcd(a, b);
    ChPolySpec chd(lam, mu);
    const DualityReport rep = check_transpose_duality(kern, srcd, chd);
    CheckRow row = check("transpose_duality", N, M, p, q, rep.residual, tol_t);
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
    ++drawn;
  }

  // Gaussian self-duality at the configured spec (plus the acceptance trio).
  const auto& pc = kern.potential().coefficients;
  const bool gaussian = kern.potential().degree() == 2 && pc[0] == 0.0 && pc[1] == 0.0 &&
                        pc[2] == 0.5 && kern.scheme().mode == WeightMode::FlipSign;
  if (gaussian) {
    struct Case {
      int N, M, p, q;
    };
    const std::vector<Case> cases = {{1, 0, 1, 0}, {1, 1, 1, 1}, {2, 1, 1, 1}};
    for (const auto& c : cases) {
      std::vector<double> a(c.N), b(c.M);
      std::vector<Cplx> lam(c.p), mu(c.q);
      for (int i = 0; i < c.N; ++i) a[i] = 0.3 + 0.45 * i;
      for (int j = 0; j < c.M; ++j) b[j] = -0.25 + 0.4 * j;
      for (int i = 0; i < c.p; ++i) lam[i] = Cplx(0.7 + 0.3 * i, 0.0);
      for (int j = 0; j < c.q; ++j) mu[j] = Cplx(0.2 + 0.3 * j, 0.8);
      const DualityReport rep =
          check_gaussian_self_duality(kern, SourceSpec(a, b), ChPolySpec(lam, mu));
      CheckRow row = check("gaussian_self_duality", c.N, c.M, c.p, c.q, rep.residual, tol_s);
      out.any_fail |= row.status == "fail";
      out.rows.push_back(row);
    }
  }
  return out;
}

JobOutcome run_verify_toda(const JobConfig& cfg) {
  const AuxKernels kern = make_kernels(cfg);
  JobOutcome out;
  const double tol = cfg.tolerance("toda", 1e-6);
  const double tol_mono = cfg.tolerance("monomial", 1e-10);
  const Cplx a0 = cfg.params.contains("a0") ? parse_cplx(cfg.params["a0"], "params.a0")
                                            : Cplx(0.37, 0.0);
  const Cplx b0 = cfg.params.contains("b0") ? parse_cplx(cfg.params["b0"], "params.b0")
                                            : Cplx(-0.21, 0.0);

  const std::vector<std::pair<int, int>> sites_2d = {{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}};
  const std::vector<std::pair<int, int>> sites_1d = {{1, 0}, {2, 0}, {3, 0},
                                                     {2, 1}, {3, 1}, {3, 2}};
  for (auto method : {DerivMethod::ExactLeibniz, DerivMethod::FiniteDifference}) {
    const std::string tag = method == DerivMethod::ExactLeibniz ? "leibniz" : "fd";
    for (auto [N, M] : sites_2d) {
      const BilinearResidual r = toda_2d_residual(kern, N, M, a0, b0, method);
      if (r.skipped) continue;
      CheckRow row = check("toda2d_" + tag, N, M, 0, 0, r.residual, tol);
      row.note = r.note;
      out.any_fail |= row.status == "fail";
      out.rows.push_back(row);
    }
    for (auto [N, M] : sites_1d) {
      const BilinearResidual r = toda_1d_residual(kern, N, M, a0, b0, method);
      if (r.skipped) continue;
      CheckRow row = check("toda1d_" + tag, N, M, 0, 0, r.residual, tol);
      row.note = r.note;
      out.any_fail |= row.status == "fail";
      out.rows.push_back(row);
    }
  }

  // Informational: the verbatim d_a^2 form at a fermionic site.
  {
    const BilinearResidual naive = toda_1d_naive_residual(kern, 2, 1, a0, b0);
    CheckRow row = info("toda1d_naive_form", 2, 1, 0, 0);
    row.residual = naive.residual;
    row.note = naive.note;
    out.rows.push_back(row);
  }

  const int N = cfg.params.contains("N") ? cfg.params["N"].get<int>() : 2;
  const int M = cfg.params.contains("M") ? cfg.params["M"].get<int>() : 2;
  const int p = cfg.params.contains("p") ? cfg.params["p"].get<int>() : 2;
  const int q = cfg.params.contains("q") ? cfg.params["q"].get<int>() : 2;
  const Cplx l0 = cfg.params.contains("lambda0")
                      ? parse_cplx(cfg.params["lambda0"], "params.lambda0")
                      : Cplx(0.54, 0.0);
  const Cplx m0 = cfg.params.contains("mu0") ? parse_cplx(cfg.params["mu0"], "params.mu0")
                                             : Cplx(0.13, 0.77);
  for (const BilinearResidual& r :
       psi_bilinear_residuals(kern, N, M, p, q, a0, b0, l0, m0)) {
    if (r.skipped) {
      CheckRow row = info(r.equation, N, M, p, q);
      row.status = "skip";
      row.note = r.note;
      out.rows.push_back(row);
      continue;
    }
    CheckRow row = check(r.equation, N, M, p, q, r.residual, tol);
    row.note = r.note;
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }

  for (int Mm = 1; Mm <= 4; ++Mm) {
    for (const Cplx x : {Cplx(2.0, 0.0), Cplx(-1.5, 0.0)}) {
      const BilinearResidual r = monomial_det_identity(2, Mm, x);
      CheckRow row = check("monomial_id", 2, Mm, 0, 0, r.residual, tol_mono);
      out.any_fail |= row.status == "fail";
      out.rows.push_back(row);
    }
  }
  return out;
}

JobOutcome run_verify_web(const JobConfig& cfg) {
  const AuxKernels kern = make_kernels(cfg);
  JobOutcome out;
  const double tol = cfg.tolerance("web", 1e-5);
  const uint64_t seed = seed_from(cfg);
  const int count = cfg.params.contains("samples_per_arrow")
                        ? cfg.params["samples_per_arrow"].get<int>()
                        : 10;
  std::vector<WebSample> samples;
  uint64_t ctr = 0;
  for (int i = 0; i < count; ++i) {
    WebSample s;
    s.a = Cplx(-0.8 + 1.6 * CounterRng::uniform(seed, ctr++), 0.0);
    s.b = Cplx(-0.8 + 1.6 * CounterRng::uniform(seed, ctr++), 0.0);
    s.lambda = Cplx(-1.0 + 2.0 * CounterRng::uniform(seed, ctr++), 0.0);
    {
      const double re = CounterRng::uniform(seed, ctr++);
      const double im = CounterRng::uniform(seed, ctr++);
      s.mu = Cplx(-0.5 + re, 0.6 + 0.6 * im);
    }
    s.k = static_cast<int>(CounterRng::mix(seed, ctr++) % 4);
    samples.push_back(s);
  }
  for (const WebResidual& r : check_fourier_web(kern, samples)) {
    CheckRow row = check("web_" + r.arrow, 0, 0, 0, 0, r.residual, tol);
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }
  return out;
}

JobOutcome run_oracle_compare(const JobConfig& cfg) {
  const AuxKernels kern = make_kernels(cfg);
  JobOutcome out;
  const double tol_z = cfg.tolerance("oracle_z", 1e-6);
  const double tol_psi = cfg.tolerance("oracle_psi", 1e-5);
  const uint64_t seed = seed_from(cfg);

  // Determinant formula against the eigenvalue-representation integral.
  struct ZCase {
    int N, M;
  };
  for (const auto& c : std::vector<ZCase>{{1, 0}, {2, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 1}}) {
    std::vector<double> a(c.N), b(c.M);
    for (int i = 0; i < c.N; ++i) a[i] = 0.4 - 0.6 * i;
    for (int j = 0; j < c.M; ++j) b[j] = 0.1 + 0.5 * j;
    const SourceSpec src(a, b);
    const Cplx det_val = z_source(kern, src).value;
    const Cplx orc = eigenvalue_integral(kern, src, std::nullopt, RuleKind::GaussHermiteMapped, 64);
    CheckRow row = check("oracle_z_source", c.N, c.M, 0, 0, relative_residual(det_val, orc),
                         tol_z);
    row.values = {{"determinant_formula", det_val}, {"eigenvalue_integral", orc}};
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }

  struct PsiCase {
    int N, M, p, q;
  };
  for (const auto& c :
       std::vector<PsiCase>{{1, 0, 1, 0}, {1, 0, 0, 1}, {1, 1, 1, 1}, {2, 1, 1, 0}}) {
    std::vector<double> a(c.N), b(c.M);
    std::vector<Cplx> lam(c.p), mu(c.q);
    for (int i = 0; i < c.N; ++i) a[i] = 0.4 - 0.6 * i;
    for (int j = 0; j < c.M; ++j) b[j] = 0.1 + 0.5 * j;
    for (int i = 0; i < c.p; ++i) lam[i] = Cplx(0.7 + 0.4 * i, 0.0);
    for (int j = 0; j < c.q; ++j) mu[j] = Cplx(0.2 + 0.3 * j, 0.8);
    const SourceSpec src(a, b);
    const ChPolySpec ch(lam, mu);
    const Cplx det_val = psi(kern, src, ch).value;
    const Cplx orc = eigenvalue_integral(kern, src, ch, RuleKind::GaussHermiteMapped, 64);
    CheckRow row =
        check("oracle_psi", c.N, c.M, c.p, c.q, relative_residual(det_val, orc), tol_psi);
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }

  // HCIZ closed form against the Haar Monte Carlo.
  const long samples = samples_from(cfg);
  for (int n = 2; n <= 3; ++n) {
    std::vector<double> x(n), aa(n);
    for (int i = 0; i < n; ++i) {
      x[i] = 1.0 - 0.8 * i;
      aa[i] = 0.9 - 0.7 * i;
    }
    const McEstimate est = haar_hciz_mc(x, aa, samples, seed);
    const Cplx closed = hciz_closed(x, aa);
    const double sigmas = std::abs(est.mean - closed) / std::max(est.stderr_, 1e-300);
    CheckRow row = check("hciz_mc", n, 0, 0, 0, sigmas, cfg.tolerance("hciz_sigmas", 3.0));
    row.note = "distance in standard errors";
    row.values = {{"mc", est.mean}, {"closed_form", closed}};
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }
  {
    // X = 0 integrand is constant: the estimate must be exactly one.
    const McEstimate est = haar_hciz_mc({0.0, 0.0}, {0.3, -0.4}, 1000, seed);
    CheckRow row = check("hciz_mc_x0", 2, 0, 0, 0, std::abs(est.mean - Cplx(1.0)), 0.0);
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }

  // Gaussian Hermitian MC against the normalized psi ratio.
  if (kern.potential().degree() == 2 && kern.potential().coefficients[2] == 0.5 &&
      kern.potential().coefficients[0] == 0.0 && kern.potential().coefficients[1] == 0.0) {
    const std::vector<double> a = {0.3, -0.2};
    const ChPolySpec ch({Cplx(0.8, 0.0)}, {});
    const McEstimate est = hermitian_mc(kern.potential(), a, ch, samples, seed + 1);
    const Cplx expected =
        psi(kern, SourceSpec(a, {}), ch).value / z_source(kern, SourceSpec(a, {})).value;
    const double sigmas = std::abs(est.mean - expected) / std::max(est.stderr_, 1e-300);
    CheckRow row =
        check("hermitian_mc", 2, 0, 1, 0, sigmas, cfg.tolerance("hciz_sigmas", 3.0));
    row.note = "distance in standard errors";
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }
  return out;
}

JobOutcome run_grassmann_check(const JobConfig& cfg) {
  JobOutcome out;
  const uint64_t seed = seed_from(cfg);
  const double tol_sdet = cfg.tolerance("sdet", 1e-10);

  // Associativity on seeded random triples (exact).
  {
    double worst = 0.0;
    uint64_t ctr = 0;
    for (int rep = 0; rep < 200; ++rep) {
      const int n = 2 + static_cast<int>(CounterRng::mix(seed, ctr++) % 5);
      auto rand_elem = [&](int gens) {
        // dyadic coefficients keep floating products exact, so associativity
        // holds to the last bit
        GrassmannElement g(gens);
        for (uint32_t m = 0; m < (1u << gens); ++m)
          if (CounterRng::uniform(seed, ctr++) < 0.4) {
            const double re = 0.25 * (static_cast<int>(CounterRng::mix(seed, ctr++) % 17) - 8);
            const double im = 0.25 * (static_cast<int>(CounterRng::mix(seed, ctr++) % 17) - 8);
            g.set_coeff(m, Cplx(re, im));
          }
        return g;
      };
      const GrassmannElement x = rand_elem(n), y = rand_elem(n), z = rand_elem(n);
      const GrassmannElement d = (x * y) * z - x * (y * z);
      d.for_each([&](uint32_t, Cplx c) { worst = std::max(worst, std::abs(c)); });
    }
    CheckRow row = check("grassmann_associativity", 0, 0, 0, 0, worst, 0.0);
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }
  // Anticommutation of all generator pairs (exact).
  {
    double worst = 0.0;
    const int n = 6;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const GrassmannElement ti = GrassmannElement::generator(n, i);
        const GrassmannElement tj = GrassmannElement::generator(n, j);
        const GrassmannElement d = ti * tj + tj * ti;
        d.for_each([&](uint32_t, Cplx c) { worst = std::max(worst, std::abs(c)); });
      }
    CheckRow row = check("grassmann_anticommutation", 0, 0, 0, 0, worst, 0.0);
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }
  // Sdet multiplicativity on numeric supermatrices.
  {
    double worst = 0.0;
    uint64_t ctr = 1000;
    for (int rep = 0; rep < 50; ++rep) {
      SuperMatrix m1(2, 1, 0), m2(2, 1, 0);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          const bool diag_block = (r < 2) == (c < 2);
          const auto val = [&] {
            const double re = CounterRng::uniform(seed, ctr++);
            const double im = CounterRng::uniform(seed, ctr++);
            return Cplx(re - 0.5, im - 0.5);
          };
          m1.at(r, c) = GrassmannElement::scalar(0, diag_block ? val() + Cplx(r == c ? 1.5 : 0.0)
                                                               : Cplx(0.0));
          m2.at(r, c) = GrassmannElement::scalar(0, diag_block ? val() + Cplx(r == c ? 1.5 : 0.0)
                                                               : Cplx(0.0));
        }
      const Cplx lhs = sdet(m1 * m2).body();
      const Cplx rhs = sdet(m1).body() * sdet(m2).body();
      worst = std::max(worst, relative_residual(lhs, rhs));
    }
    CheckRow row = check("sdet_multiplicative", 2, 1, 0, 0, worst, tol_sdet);
    out.any_fail |= row.status == "fail";
    out.rows.push_back(row);
  }
  // Direct U(1|1) integral; the ratio against z_source is recorded, not asserted.
  {
    const double a = cfg.params.contains("a0") ? cfg.params["a0"].get<double>() : 0.3;
    const double b = cfg.params.contains("b0") ? cfg.params["b0"].get<double>() : 0.1;
    const Z11Report rep = z11_direct(Potential::gaussian(cfg.potential.hbar),
                                     WeightScheme::flip_sign(Potential::gaussian(cfg.potential.hbar)),
                                     a, b);
    CheckRow row = info("z11_direct_vs_eigen", 1, 1, 0, 0);
    row.values = {{"direct", rep.value},
                  {"eigen", rep.eigen_value},
                  {"ratio", rep.ratio},
                  {"bosonic_truncation", rep.bosonic_truncation}};
    row.note = "recorded only: flat-measure vs eigenvalue-representation normalization";
    out.rows.push_back(row);
  }
  return out;
}

JobOutcome run_report_all(const JobConfig& cfg) {
  JobOutcome all;
  const std::vector<std::pair<std::string, JobOutcome (*)(const JobConfig&)>> parts = {
      {"oracle", run_oracle_compare}, {"duality", run_verify_duality},
      {"toda", run_verify_toda},      {"web", run_verify_web},
      {"grassmann", run_grassmann_check},
  };
  const char* env = std::getenv("SMW_THREADS");
  const int threads = env ? std::max(1, std::atoi(env)) : 1;

  if (threads <= 1) {
    for (const auto& [name, fn] : parts) {
      const JobOutcome o = fn(cfg);
      all.any_fail |= o.any_fail;
      for (const auto& r : o.rows) all.rows.push_back(r);
    }
    return all;
  }
  std::counting_semaphore<64> slots(threads);
  std::vector<std::future<JobOutcome>> futures;
  for (const auto& [name, fn] : parts) {
    futures.push_back(std::async(std::launch::async, [&slots, fn, &cfg] {
      slots.acquire();
      JobOutcome o = fn(cfg);
      slots.release();
      return o;
    }));
  }
  for (auto& f : futures) {
    const JobOutcome o = f.get();
    all.any_fail |= o.any_fail;
    for (const auto& r : o.rows) all.rows.push_back(r);
  }
  return all;
}

Json report_json(const std::string& command, const JobConfig& cfg, const JobOutcome& out) {
  Json rep;
  rep["schema"] = 1;
  rep["command"] = command;
  rep["config"] = cfg.echo;
  Json rows = Json::array();
  for (const CheckRow& r : out.rows) {
    Json row;
    row["check_id"] = r.check_id;
    row["N"] = r.N;
    row["M"] = r.M;
    row["p"] = r.p;
    row["q"] = r.q;
    if (r.status == "pass" || r.status == "fail") {
      row["residual"] = r.residual;
      row["tolerance"] = r.tolerance;
    }
    row["status"] = r.status;
    if (!r.note.empty()) row["note"] = r.note;
    if (!r.values.empty()) {
      Json vals;
      for (const auto& [k, v] : r.values) vals[k] = cplx_json(v);
      row["values"] = vals;
    }
    if (cfg.timing) row["seconds"] = r.seconds;
    rows.push_back(row);
  }
  rep["results"] = rows;
  rep["all_passed"] = !out.any_fail;
  return rep;
}

std::string summary_csv(const JobOutcome& out) {
  std::ostringstream os;
  os << "check_id,N,M,p,q,residual,tolerance,status,seconds\n";
  for (const CheckRow& r : out.rows) {
    os << r.check_id << ',' << r.N << ',' << r.M << ',' << r.p << ',' << r.q << ',';
    if (r.status == "pass" || r.status == "fail")
      os << r.residual << ',' << r.tolerance;
    else
      os << ',';
    os << ',' << r.status << ',' << r.seconds << '\n';
  }
  return os.str();
}

int run_command(const std::string& command, const std::filesystem::path& config_file,
                const std::filesystem::path& out_dir) {
  JobConfig cfg;
  try {
    cfg = JobConfig::load(config_file);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  JobOutcome out;
  Timer timer;
  try {
    if (command == "partition")
      out = run_partition(cfg);
    else if (command == "chpoly")
      out = run_chpoly(cfg);
    else if (command == "verify-duality")
      out = run_verify_duality(cfg);
    else if (command == "verify-toda")
      out = run_verify_toda(cfg);
    else if (command == "verify-web")
      out = run_verify_web(cfg);
    else if (command == "oracle-compare")
      out = run_oracle_compare(cfg);
    else if (command == "grassmann-check")
      out = run_grassmann_check(cfg);
    else if (command == "report-all")
      out = run_report_all(cfg);
    else {
      std::fprintf(stderr, "unknown command '%s'\n", command.c_str());
      return 2;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const AccuracyError& e) {
    std::fprintf(stderr, "accuracy error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "accuracy error: %s\n", e.what());
    return 3;
  }

  Json rep = report_json(command, cfg, out);
  if (cfg.timing) rep["runtime_seconds"] = timer.seconds();

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "report.json");
    f << rep.dump(2) << '\n';
  }
  {
    std::ofstream f(out_dir / "summary.csv");
    f << summary_csv(out);
  }
  return out.any_fail ? 1 : 0;
}

}  // namespace smw

#include "hexabvp/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "hexabvp/conditions.hpp"
#include "hexabvp/solver.hpp"

namespace hexabvp {

namespace {

constexpr double kSlack = 1e-15;
constexpr double kFdStep = 1e-5;
constexpr double kFdTolerance = 1e-8;
constexpr double kSeamExclusion = 1e-3;
constexpr int kSpectralGrid = 64;

void record(PropertyOutcome& p, double violation) {
  ++p.checked;
  if (violation > 0.0) {
    ++p.failures;
    p.worst = std::max(p.worst, violation);
  }
}

}  // namespace

std::vector<PropertyOutcome> kernel_property_sweep(const KernelSet& k, long samples, std::uint64_t seed) {
  std::vector<PropertyOutcome> out{
      {"nonnegativity of G and K"},
      {"t^5 G(1,s) <= G(t,s) <= G(1,s)"},
      {"t^6 K(1,s) <= K(t,s) <= K(1,s)"},
      {"H >= 0 (G increasing in t)"},
      {"dK/dt = G by central differences"},
      {"dG/dt = H by central differences"},
      {"seam continuity at t = s"},
  };
  auto& nonneg = out[0];
  auto& g_sandwich = out[1];
  auto& k_sandwich = out[2];
  auto& mono = out[3];
  auto& fd_k = out[4];
  auto& fd_g = out[5];
  auto& seam = out[6];

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (long i = 0; i < samples; ++i) {
    const double t = unit(rng), s = unit(rng);
    const double g = k.G({t, s}), kk = k.K({t, s}), h = k.H({t, s});
    const double g1 = k.G({1.0, s}), k1 = k.K({1.0, s});

    record(nonneg, std::max(-kSlack - g, -kSlack - kk));
    const double t5 = std::pow(t, 5), t6 = std::pow(t, 6);
    record(g_sandwich, std::max(t5 * g1 - g - kSlack, g - g1 - kSlack));
    record(k_sandwich, std::max(t6 * k1 - kk - kSlack, kk - k1 - kSlack));
    record(mono, -kSlack - h);

    if (std::fabs(t - s) > kSeamExclusion && t - kFdStep >= 0.0 && t + kFdStep <= 1.0) {
      const double dk = (k.K({t + kFdStep, s}) - k.K({t - kFdStep, s})) / (2.0 * kFdStep);
      const double dg = (k.G({t + kFdStep, s}) - k.G({t - kFdStep, s})) / (2.0 * kFdStep);
      record(fd_k, std::fabs(dk - g) - kFdTolerance);
      record(fd_g, std::fabs(dg - h) - kFdTolerance);
    }

    // on the diagonal the kernel must equal both branch formulas exactly
    const double gap = std::max({
        std::fabs(k.G({s, s}) - green_G_branch(Branch::SAboveT, s, s)),
        std::fabs(k.K({s, s}) - green_K_branch(Branch::SAboveT, s, s)),
        std::fabs(k.H({s, s}) - green_H_branch(Branch::SAboveT, s, s)),
        std::fabs(green_G_branch(Branch::SAtOrBelowT, s, s) - green_G_branch(Branch::SAboveT, s, s)),
        std::fabs(green_K_branch(Branch::SAtOrBelowT, s, s) - green_K_branch(Branch::SAboveT, s, s)),
        std::fabs(green_H_branch(Branch::SAtOrBelowT, s, s) - green_H_branch(Branch::SAboveT, s, s)),
    });
    record(seam, gap);
  }
  return out;
}

ProblemConfig example_config(int which) {
  ProblemConfig cfg;
  if (which == 1) {
    cfg.f = "t + 1000*atan(u)";
    cfg.boundary = {{1.0}, {3.0, 4.0}, {1.0 / 4.0, 1.0 / 3.0}};
    cfg.p = 2.0;
    cfg.L = 1000.0;
  } else if (which == 2) {
    cfg.f = "10*t*(1+150*u^3+sin(u))*exp(-t^2)/(1+2*u^2)";
    cfg.boundary = {{1.0, 2.0}, {1.0 / 3.0, 2.0 / 5.0, 1.0 / 4.0}, {1.0 / 2.0, 2.0 / 3.0, 4.0 / 5.0}};
    cfg.factorization = FactorizationConfig{"10*t*exp(-t^2)", "(1+150*u^3+sin(u))/(1+2*u^2)", std::nullopt};
  } else {
    throw std::invalid_argument("unknown example " + std::to_string(which));
  }
  return cfg;
}

Report run_certificates(const LoadedProblem& loaded, std::ostream& err, bool& all_hold) {
  Report report;
  report.mu = loaded.problem.mu();
  all_hold = true;

  if (loaded.L) {
    const UniquenessCertificate cert = check_uniqueness(loaded.problem, loaded.p, *loaded.L);
    report.phi = cert.phi;
    report.L = cert.L;
    report.L_phi = cert.product;
    report.uniqueness_holds = cert.holds;
    all_hold = all_hold && cert.holds;
    const double sampled = probe_lipschitz(loaded.problem.f(), 4000, 7);
    if (sampled > *loaded.L)
      err << "warning: sampled |df/du| ratio " << sampled << " exceeds the supplied L = " << *loaded.L << "\n";
  }

  if (loaded.p_of_t && loaded.g_of_u) {
    try {
      const ExistenceCertificate cert = check_existence(loaded.problem, *loaded.p_of_t, *loaded.g_of_u, loaded.gamma);
      report.gamma = cert.gamma;
      report.p_star = cert.p_star;
      report.M = cert.M;
      report.gamma_M = cert.gamma_M;
      report.existence_holds = cert.holds;
      all_hold = all_hold && cert.holds;
      if (cert.inconclusive) err << "warning: |gamma| M equals 1; the existence certificate is inconclusive\n";

      const SpectralDiagnostic diag =
          spectral_diagnostic(loaded.problem, *loaded.p_of_t, cert.gamma, cert.gamma_M, kSpectralGrid);
      report.spectral_radius_estimate = diag.radius_estimate;
      if (!diag.radius_converged) err << "warning: power iteration did not converge; radius estimate unreliable\n";
      if (diag.one_is_eigenvalue_suspected) err << "warning: 1 may be an eigenvalue of the linearized operator\n";
    } catch (const NoLimitError& e) {
      err << "existence: " << e.what() << "\n";
      report.existence_holds = false;
      all_hold = false;
    } catch (const DegenerateError& e) {
      err << "existence: " << e.what() << "\n";
      report.existence_holds = false;
      all_hold = false;
    }
  }
  return report;
}

namespace {

SolverSummary run_solver(const LoadedProblem& loaded, SolutionGrid* solution_out) {
  auto [u, trace] = picard_solve(loaded.problem, loaded.solver);
  SolverSummary s;
  s.converged = trace.converged;
  s.iterations = trace.iterations;
  s.final_d = trace.d_distance.empty() ? 0.0 : trace.d_distance.back();
  s.final_sigma = trace.sigma_distance.empty() ? 0.0 : trace.sigma_distance.back();
  s.bc_residuals = bc_residuals(loaded.problem, u);
  s.ode_residual = ode_residual(loaded.problem, u).value;
  if (solution_out) *solution_out = std::move(u);
  return s;
}

void print_report(const Report& report, std::ostream& out) { out << to_json(report).dump(2) << "\n"; }

int cmd_check(const std::string& config_path, std::optional<double> p, std::optional<double> L, std::ostream& out,
              std::ostream& err) {
  ProblemConfig cfg = load_problem_config(config_path);
  if (p) {
    if (!(*p > 1.0)) throw ConfigError({"--p: must exceed 1"});
    cfg.p = *p;
  }
  if (L) {
    if (!(*L > 0.0)) throw ConfigError({"--L: must be positive"});
    cfg.L = *L;
  }
  const LoadedProblem loaded = load_problem(cfg);
  bool all_hold = true;
  const Report report = run_certificates(loaded, err, all_hold);
  print_report(report, out);
  return all_hold ? kExitOk : kExitCertificateFails;
}

int cmd_solve(const std::string& config_path, const std::string& csv_path, std::ostream& out, std::ostream& err) {
  const LoadedProblem loaded = load_problem(load_problem_config(config_path));
  bool all_hold = true;
  Report report = run_certificates(loaded, err, all_hold);
  SolutionGrid u = SolutionGrid::zeros(loaded.solver.grid_n);
  report.solver = run_solver(loaded, &u);
  print_report(report, out);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << solution_csv(u);
  }
  if (!report.solver->converged) {
    err << "solver did not converge in " << report.solver->iterations << " iterations (last d = "
        << report.solver->final_d << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_kernel_verify(long samples, std::uint64_t seed, std::ostream& out) {
  if (samples < 1) throw ConfigError({"--samples: must be positive"});
  bool ok = true;
  for (const auto& p : kernel_property_sweep(KernelSet{}, samples, seed)) {
    out << (p.passed() ? "PASS " : "FAIL ") << p.name << " (" << p.checked << " checks";
    if (!p.passed()) out << ", " << p.failures << " failures, worst excess " << p.worst;
    out << ")\n";
    ok = ok && p.passed();
  }
  return ok ? kExitOk : kExitCertificateFails;
}

struct Expectation {
  const char* name;
  double value;
  double expected;
  double tolerance;  // absolute
};

int cmd_reproduce(const std::string& which, std::ostream& out, std::ostream& err) {
  int index = 0;
  if (which == "example1") index = 1;
  else if (which == "example2") index = 2;
  else throw ConfigError({"reproduce: expected example1 or example2, got '" + which + "'"});

  const LoadedProblem loaded = load_problem(example_config(index));
  bool all_hold = true;
  Report report = run_certificates(loaded, err, all_hold);

  std::vector<Expectation> checks;
  std::vector<std::pair<const char*, bool>> verdicts;
  if (index == 1) {
    constexpr double kPhiPublished = 0.000902884;
    checks.push_back({"mu", report.mu, -73.0 / 12.0, 1e-14});
    checks.push_back({"phi", report.phi.value_or(NAN), kPhiPublished, 0.01 * kPhiPublished});
    verdicts.push_back({"L*phi < 1", report.uniqueness_holds.value_or(false)});
    report.solver = run_solver(loaded, nullptr);
    verdicts.push_back({"Picard iteration converged", report.solver->converged});
  } else {
    const double m_closed = 11.0 / 720.0 * std::sqrt(2.0 / std::numbers::e);
    checks.push_back({"mu", report.mu, -5.0 / 12.0, 1e-14});
    checks.push_back({"M", report.M.value_or(NAN), m_closed, 1e-10});
    checks.push_back({"gamma", report.gamma.value_or(NAN), 75.0, 1e-3});
    verdicts.push_back({"|gamma| M <= 1", report.existence_holds.value_or(false)});
    verdicts.push_back({"Nystrom radius < 1", report.spectral_radius_estimate.value_or(INFINITY) < 1.0});
  }
  print_report(report, out);

  bool ok = true;
  for (const auto& c : checks) {
    if (!(std::fabs(c.value - c.expected) <= c.tolerance)) {
      err << "mismatch: " << c.name << " = " << c.value << ", expected " << c.expected << " +- " << c.tolerance << "\n";
      ok = false;
    }
  }
  for (const auto& [name, holds] : verdicts) {
    if (!holds) {
      err << "mismatch: " << name << " does not hold\n";
      ok = false;
    }
  }
  return ok ? kExitOk : kExitCertificateFails;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sixth-order nonlocal BVP certificates and solver", "hexabvp"};
  app.require_subcommand(1);

  std::string config_path, csv_path, example;
  double p_value = 0.0, L_value = 0.0;
  long samples = 100000;
  std::uint64_t seed = 1;

  auto* check = app.add_subcommand("check", "Evaluate the solvability certificates");
  check->add_option("--config", config_path, "Problem config (JSON)")->required();
  auto* p_opt = check->add_option("--p", p_value, "Exponent of the L^p norm in Phi");
  auto* L_opt = check->add_option("--L", L_value, "Lipschitz constant of f in u");

  auto* solve = app.add_subcommand("solve", "Certificates plus Picard iteration");
  solve->add_option("--config", config_path, "Problem config (JSON)")->required();
  solve->add_option("--out", csv_path, "Write the solution as CSV");

  auto* verify = app.add_subcommand("kernel-verify", "Randomized property sweep of the Green's kernels");
  verify->add_option("--samples", samples, "Number of random (t,s) points");
  verify->add_option("--seed", seed, "Random seed");

  auto* reproduce = app.add_subcommand("reproduce", "Run a built-in worked example");
  reproduce->add_option("which", example, "example1 or example2")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitInvalidInput;
  }

  try {
    if (*check)
      return cmd_check(config_path, *p_opt ? std::optional(p_value) : std::nullopt,
                       *L_opt ? std::optional(L_value) : std::nullopt, out, err);
    if (*solve) return cmd_solve(config_path, csv_path, out, err);
    if (*verify) return cmd_kernel_verify(samples, seed, out);
    if (*reproduce) return cmd_reproduce(example, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const ValidationError& e) {
    err << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const DomainError& e) {
    err << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace hexabvp

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hexabvp/cli.hpp"
#include "hexabvp/conditions.hpp"
#include "hexabvp/quadrature.hpp"
#include "hexabvp/solver.hpp"

using namespace hexabvp;

namespace {

const BoundaryData kExample1{{1.0}, {3.0, 4.0}, {0.25, 1.0 / 3.0}};
const BoundaryData kExample2{{1.0, 2.0}, {1.0 / 3.0, 2.0 / 5.0, 1.0 / 4.0}, {0.5, 2.0 / 3.0, 0.8}};
const BoundaryData kTrivial{{0.0}, {0.0, 0.0}, {0.5, 1.0}};
const char* kF1 = "t + 1000*atan(u)";
const char* kF2 = "10*t*(1+150*u^3+sin(u))*exp(-t^2)/(1+2*u^2)";
const char* kP2 = "10*t*exp(-t^2)";
const char* kG2 = "(1+150*u^3+sin(u))/(1+2*u^2)";

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Outcome mu_reproduction() {
  Outcome o;
  const double e1 = std::fabs(compute_mu(kExample1) + 73.0 / 12.0);
  const double e2 = std::fabs(compute_mu(kExample2) + 5.0 / 12.0);
  o.require(e1 <= 1e-14, "|mu1 + 73/12| = " + num(e1) + " <= 1e-14");
  o.require(e2 <= 1e-14, "|mu2 + 5/12| = " + num(e2) + " <= 1e-14");
  return o;
}

Outcome phi_reproduction() {
  Outcome o;
  const auto pb = BvpProblem::create(parse(kF1), kExample1);
  const double phi = compute_phi(pb, 2.0);
  const double rel = std::fabs(phi - 0.000902884) / 0.000902884;
  o.require(rel < 0.01, "Phi = " + num(phi) + ", rel. dev. from 0.000902884 = " + num(rel) + " < 1%");

  // Same sum on a much finer rule, built here from the kernel rows.
  const auto& b = pb.boundary();
  const auto fine = CompositeRule::with_seams(b.etas, 24, 256);
  const double inv_mu = 1.0 / std::fabs(pb.mu());
  double ref = lp_norm([](double s) { return green_G({1.0, s}); }, 2.0, fine);
  ref += inv_mu * std::fabs(b.alphas[0]) *
         lp_norm([&](double s) { return green_K({b.etas[1], s}) - green_K({b.etas[0], s}); }, 2.0, fine);
  for (std::size_t i = 0; i < b.m(); ++i)
    ref += inv_mu * std::fabs(b.betas[i]) * lp_norm([&](double s) { return green_G({b.etas[i], s}); }, 2.0, fine);
  o.require(std::fabs(phi - ref) <= 1e-9, "refinement change " + num(std::fabs(phi - ref)) + " <= 1e-9");

  const auto cert = check_uniqueness(pb, 2.0, 1e3);
  o.require(cert.holds && cert.product < 1.0, "L*Phi = " + num(cert.product) + " < 1");
  return o;
}

Outcome m_reproduction() {
  Outcome o;
  const auto pb = BvpProblem::create(parse(kF2), kExample2);
  const double closed = 11.0 / 720.0 * std::sqrt(2.0 / std::exp(1.0));
  const auto m = compute_M(pb, parse(kP2));
  o.require(std::fabs(m.M - closed) <= 1e-10, "M = " + num(m.M) + ", |M - (11/720)sqrt(2/e)| = " +
                                                   num(std::fabs(m.M - closed)) + " <= 1e-10");
  const double gamma = estimate_gamma(parse(kG2));
  o.require(std::fabs(gamma - 75.0) <= 1e-3, "gamma = " + num(gamma) + " within 1e-3 of 75");
  const auto cert = check_existence(pb, parse(kP2), parse(kG2));
  o.require(cert.holds && cert.gamma_M <= 1.0, "|gamma| M = " + num(cert.gamma_M) + " <= 1");
  return o;
}

Outcome kernel_suite() {
  Outcome o;
  for (const auto& p : kernel_property_sweep(KernelSet{}, 100000, 20240229))
    o.require(p.passed(), p.name + " (" + std::to_string(p.checked) + ")");
  return o;
}

Outcome linear_oracle() {
  Outcome o;
  SolverConfig cfg;
  const auto one = BvpProblem::create(parse("1"), kTrivial);
  const auto [green, trace] = picard_solve(one, cfg);
  const auto closed = linear_solve_closed_form(one, parse("1"), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < green.size(); ++i) {
    const double t = green.node(i);
    const double exact = std::pow(t, 5) / 480.0 - std::pow(t, 6) / 720.0;
    worst = std::max({worst, std::fabs(green[i] - exact), std::fabs(closed[i] - exact)});
  }
  o.require(worst <= 1e-12, "h = 1: max node error " + num(worst) + " <= 1e-12");

  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> c(-2.0, 2.0), w(-1.5, 1.5), pos(0.02, 1.0);
  double spread = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::string h = text(c(rng)) + " + " + text(c(rng)) + "*sin(" + text(3 * c(rng)) + "*t) + " +
                          text(c(rng)) + "*exp(" + text(c(rng)) + "*t)";
    BoundaryData b;
    do {
      const int m = std::uniform_int_distribution<int>(2, 4)(rng);
      b = {};
      for (int i = 0; i < m; ++i) b.etas.push_back(pos(rng));
      std::sort(b.etas.begin(), b.etas.end());
      for (int i = 0; i + 1 < m; ++i) b.alphas.push_back(w(rng));
      for (int i = 0; i < m; ++i) b.betas.push_back(w(rng));
    } while (!validate(parse("t"), b).empty() || std::fabs(compute_mu(b)) <= 0.1);
    const auto pb = BvpProblem::create(parse(h), b);
    const auto [u_green, tr] = picard_solve(pb, cfg);
    spread = std::max(spread, sup_distance(u_green, linear_solve_closed_form(pb, parse(h), cfg)));
  }
  o.require(spread <= 1e-10, "20 random instances: max sup difference " + num(spread) + " <= 1e-10");
  return o;
}

Outcome contraction() {
  Outcome o;
  SolverConfig cfg;
  const auto pb = BvpProblem::create(parse(kF1), kExample1);
  const double bound = check_uniqueness(pb, 2.0, 1e3).product;
  const double ratio = contraction_probe(pb, cfg, 50, 2.0, 1);
  o.require(ratio <= bound + 0.02, "max sigma ratio " + num(ratio) + " <= L*Phi + 0.02 = " + num(bound + 0.02));
  const auto [u, trace] = picard_solve(pb, cfg);
  const double residual = sup_distance(apply_A(pb, u, cfg), u);
  o.require(trace.converged && trace.iterations <= 500,
            "Picard converged in " + std::to_string(trace.iterations) + " iterations");
  o.require(residual <= 1e-8, "d(Au, u) = " + num(residual) + " <= 1e-8");
  double worst = 0.0;
  for (double r : bc_residuals(pb, u)) worst = std::max(worst, r);
  o.require(worst <= 1e-5, "max boundary residual " + num(worst) + " <= 1e-5");
  return o;
}

Outcome spectral() {
  Outcome o;
  const auto pb = BvpProblem::create(parse(kF2), kExample2);
  const auto cert = check_existence(pb, parse(kP2), parse(kG2));
  const auto diag = spectral_diagnostic(pb, parse(kP2), cert.gamma, cert.gamma_M, 64);
  o.require(diag.radius_estimate < 1.0, "radius estimate " + num(diag.radius_estimate) + " < 1");
  o.require(diag.radius_estimate <= cert.gamma_M + 0.01, "<= |gamma| M + 0.01 = " + num(cert.gamma_M + 0.01));
  return o;
}

Outcome quadrature_inequalities() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  auto random_fn = [&] {
    std::vector<double> a(6);
    for (auto& v : a) v = d(rng);
    return [a](double s) {
      return a[0] + a[1] * s + a[2] * s * s + a[3] * std::sin(4 * s) + a[4] * std::cos(7 * s) + a[5] * std::exp(s);
    };
  };
  const CompositeRule rule;
  int minkowski = 0, hoelder = 0;
  for (double p : {1.5, 2.0, 3.0}) {
    const double q = p / (p - 1.0);
    for (int i = 0; i < 100; ++i) {
      const auto f = random_fn();
      const auto g = random_fn();
      if (lp_norm([&](double s) { return f(s) + g(s); }, p, rule) <= lp_norm(f, p, rule) + lp_norm(g, p, rule) + 1e-12)
        ++minkowski;
      if (integrate([&](double s) { return std::fabs(f(s) * g(s)); }, rule) <=
          lp_norm(f, p, rule) * lp_norm(g, q, rule) + 1e-12)
        ++hoelder;
    }
  }
  o.require(minkowski == 300, "Minkowski " + std::to_string(minkowski) + "/300");
  o.require(hoelder == 300, "Hoelder " + std::to_string(hoelder) + "/300");
  return o;
}

double run_unit_suites(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  for (const char* name : {"test_expr", "test_kernels", "test_quadrature", "test_problem", "test_conditions",
                           "test_solver", "test_cli"}) {
    const std::string cmd = std::string("\"") + HEXABVP_TEST_BIN_DIR + "/" + name + "\" > /dev/null 2>&1";
    o.require(std::system(cmd.c_str()) == 0, name);
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome end_to_end(double elapsed_so_far) {
  Outcome o;
  for (const char* which : {"example1", "example2"}) {
    std::ostringstream out, err;
    const int code = run_cli({"reproduce", which}, out, err);
    o.require(code == 0, std::string("reproduce ") + which + " exit " + std::to_string(code));
  }
  const double suites = run_unit_suites(o);
  const double total = elapsed_so_far + suites;
  o.require(total < 60.0, "unit suites + acceptance " + num(total) + " s < 60 s");
  return o;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"mu reproduction", mu_reproduction},
      {"Phi reproduction", phi_reproduction},
      {"M reproduction", m_reproduction},
      {"kernel property suite", kernel_suite},
      {"linear oracle equivalence", linear_oracle},
      {"contraction property", contraction},
      {"spectral diagnostic", spectral},
      {"quadrature inequality suite", quadrature_inequalities},
      {"end-to-end",
       [&] { return end_to_end(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

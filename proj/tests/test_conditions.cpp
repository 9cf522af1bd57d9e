#include <doctest.h>

#include <cmath>
#include <random>

#include "hexabvp/conditions.hpp"
#include "hexabvp/quadrature.hpp"

using namespace hexabvp;

namespace {

const double kGRowL2 = std::sqrt(8.0 / 693.0) / 120.0;

BvpProblem example1() { return BvpProblem::create(parse("t + 1000*atan(u)"), {{1.0}, {3.0, 4.0}, {0.25, 1.0 / 3.0}}); }

BvpProblem example2() {
  return BvpProblem::create(parse("10*t*(1+150*u^3+sin(u))*exp(-t^2)/(1+2*u^2)"),
                            {{1.0, 2.0}, {1.0 / 3.0, 2.0 / 5.0, 1.0 / 4.0}, {0.5, 2.0 / 3.0, 0.8}});
}

BvpProblem trivial(const char* f = "u") { return BvpProblem::create(parse(f), {{0.0}, {0.0, 0.0}, {0.5, 1.0}}); }

// Phi assembled directly from the kernel rows on a fixed fine rule.
double phi_reference(const BvpProblem& pb, double p) {
  const auto& b = pb.boundary();
  const auto rule = CompositeRule::with_seams(b.etas, 20, 64);
  const double inv_mu = 1.0 / std::fabs(pb.mu());
  double phi = lp_norm([](double s) { return green_G({1.0, s}); }, p, rule);
  for (std::size_t i = 0; i + 1 < b.m(); ++i)
    phi += inv_mu * std::fabs(b.alphas[i]) *
           lp_norm([&](double s) { return green_K({b.etas[i + 1], s}) - green_K({b.etas[i], s}); }, p, rule);
  for (std::size_t i = 0; i < b.m(); ++i)
    phi += inv_mu * std::fabs(b.betas[i]) * lp_norm([&](double s) { return green_G({b.etas[i], s}); }, p, rule);
  return phi;
}

}  // namespace

TEST_CASE("Phi") {
  const double phi = compute_phi(example1(), 2.0);
  CHECK(std::fabs(phi - 0.000902884) / 0.000902884 < 0.01);
  CHECK(std::fabs(phi - phi_reference(example1(), 2.0)) < 1e-9);
  CHECK(compute_phi(trivial(), 2.0) == doctest::Approx(kGRowL2).epsilon(1e-12));

  const auto half = BvpProblem::create(parse("u"), {{0.0}, {0.0, 0.5}, {0.5, 1.0}});
  CHECK(compute_phi(half, 2.0) == doctest::Approx(2.0 * kGRowL2).epsilon(1e-12));

  for (double p : {1.5, 3.0}) {
    CHECK(compute_phi(example1(), p) == doctest::Approx(phi_reference(example1(), p)).epsilon(1e-9));
    CHECK(compute_phi(example2(), p) == doctest::Approx(phi_reference(example2(), p)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(compute_phi(example1(), 1.0), std::invalid_argument);
}

TEST_CASE("Phi grows with every nonzero beta") {
  const Expr f = parse("u");
  const BoundaryData base{{0.5}, {0.1, 0.0}, {0.3, 0.7}};
  const BoundaryData more{{0.5}, {0.1, 0.2}, {0.3, 0.7}};
  const auto a = BvpProblem::create(f, base), b = BvpProblem::create(f, more);
  // Same mu would isolate the new summand; here mu also shrinks, which only helps.
  CHECK(compute_phi(b, 2.0) > compute_phi(a, 2.0));
  CHECK(compute_phi(a, 2.0) >= lp_norm([](double s) { return green_G({1.0, s}); }, 2.0, CompositeRule()));
}

TEST_CASE("p* and M") {
  const auto pm = max_abs_on_unit_interval(parse("10*t*exp(-t^2)"));
  CHECK(pm.value == doctest::Approx(5.0 * std::sqrt(2.0 / std::exp(1.0))).epsilon(1e-13));
  CHECK(pm.argmax == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(max_abs_on_unit_interval(parse("-3 + t")).value == 3.0);
  CHECK(max_abs_on_unit_interval(parse("t^2")).value == 1.0);

  const auto m = compute_M(example2(), parse("10*t*exp(-t^2)"));
  CHECK(std::fabs(m.M - 11.0 / 720.0 * std::sqrt(2.0 / std::exp(1.0))) <= 1e-10);
  CHECK(compute_M(example2(), parse("0")).M == 0.0);
  CHECK(compute_M(trivial(), parse("1")).M == doctest::Approx(1.0 / 1440.0).epsilon(1e-15));
}

TEST_CASE("gamma probe") {
  CHECK(std::fabs(estimate_gamma(parse("(1+150*u^3+sin(u))/(1+2*u^2)")) - 75.0) <= 1e-3);
  CHECK(estimate_gamma(parse("u")) == doctest::Approx(1.0));
  CHECK(std::fabs(estimate_gamma(parse("atan(u)"))) <= 1e-6);
  CHECK_THROWS_AS(estimate_gamma(parse("u^2")), NoLimitError);
  CHECK_THROWS_AS(estimate_gamma(parse("abs(u)")), NoLimitError);
  CHECK_THROWS_AS(estimate_gamma(parse("u*sin(u)")), NoLimitError);
}

TEST_CASE("uniqueness certificate") {
  const auto ok = check_uniqueness(example1(), 2.0, 1e3);
  CHECK(ok.holds);
  CHECK(ok.product == doctest::Approx(0.903).epsilon(1e-3));
  CHECK(ok.product == ok.L * ok.phi);
  const auto bad = check_uniqueness(example1(), 2.0, 1e4);
  CHECK_FALSE(bad.holds);
  CHECK(bad.product > 1.0);
  CHECK(check_uniqueness(example2(), 2.0, 1e-9).holds);
  CHECK_THROWS(check_uniqueness(example1(), 2.0, 0.0));
}

TEST_CASE("existence certificate") {
  const Expr p = parse("10*t*exp(-t^2)"), g = parse("(1+150*u^3+sin(u))/(1+2*u^2)");
  const auto cert = check_existence(example2(), p, g);
  CHECK(cert.holds);
  CHECK(cert.strict);
  CHECK_FALSE(cert.inconclusive);
  CHECK(cert.gamma_from_probe);
  CHECK(cert.g_at_zero == 1.0);
  CHECK(cert.gamma_M == doctest::Approx(0.9829).epsilon(1e-4));

  const auto over = check_existence(example2(), p, g, 80.0);
  CHECK_FALSE(over.holds);
  CHECK_FALSE(over.gamma_from_probe);

  const auto zero = check_existence(example2(), p, g, 0.0);
  CHECK(zero.holds);
  CHECK(zero.gamma_M == 0.0);

  // gamma exactly 1/M.
  const auto edge = check_existence(trivial(), parse("1"), parse("1 + 1440*u"));
  CHECK(edge.holds);
  CHECK_FALSE(edge.strict);
  CHECK(edge.inconclusive);

  CHECK_THROWS_AS(check_existence(example2(), p, parse("u")), DegenerateError);
  CHECK_THROWS_AS(check_existence(example2(), parse("0"), g), DegenerateError);
  CHECK_THROWS_AS(check_existence(example2(), p, parse("1+u^2")), NoLimitError);
}

TEST_CASE("Nystrom matrix") {
  const Expr p = parse("10*t*exp(-t^2)");
  const auto zero = nystrom_matrix(example2(), p, 0.0, 16);
  CHECK(zero.max_row_sum() == 0.0);

  const auto plain = nystrom_matrix(trivial(), parse("1"), 1.0, 32);
  CHECK(plain.max_row_sum() <= 1.0 / 1440.0 + 1e-12);
  for (std::size_t i = 0; i < plain.size(); ++i)
    for (std::size_t j = 0; j < plain.size(); ++j) CHECK(plain(i, j) >= 0.0);
  CHECK_THROWS(nystrom_matrix(trivial(), parse("1"), 1.0, 7));
}

TEST_CASE("power iteration") {
  CHECK(spectral_radius(DenseMatrix(5)).estimate == 0.0);
  DenseMatrix d(2);
  d(0, 0) = 0.5;
  d(1, 1) = 0.25;
  const auto r = spectral_radius(d);
  CHECK(r.converged);
  CHECK(r.estimate == doctest::Approx(0.5).epsilon(1e-8));

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    DenseMatrix a(12);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) a(i, j) = u(rng);
    CHECK(spectral_radius(a, 200, k).estimate <= a.max_row_sum() + 1e-10);
  }
}

TEST_CASE("spectral diagnostic for the second example") {
  const Expr p = parse("10*t*exp(-t^2)");
  const auto cert = check_existence(example2(), p, parse("(1+150*u^3+sin(u))/(1+2*u^2)"));
  const auto diag = spectral_diagnostic(example2(), p, cert.gamma, cert.gamma_M, 64);
  CHECK(diag.grid_n == 64);
  CHECK(diag.radius_estimate < 1.0);
  CHECK(diag.radius_estimate <= diag.norm_bound + 0.01);
  CHECK_FALSE(diag.one_is_eigenvalue_suspected);

  // Rescale gamma so the dominant eigenvalue of the discrete operator is 1.
  const auto probe = spectral_diagnostic(trivial(), parse("1"), 1.0, 1.0 / 1440.0, 32);
  const double lambda = probe.radius_estimate;
  REQUIRE(lambda > 0.0);
  const auto at_one = spectral_diagnostic(trivial(), parse("1"), 1.0 / lambda, 1.0, 32);
  CHECK(at_one.radius_estimate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(at_one.one_is_eigenvalue_suspected);
}

TEST_CASE("Lipschitz probe is a lower bound") {
  const double est = probe_lipschitz(parse("t + 1000*atan(u)"), 2000, 1);
  CHECK(est <= 1000.0 + 1e-9);
  CHECK(est > 100.0);
  CHECK(probe_lipschitz(parse("t"), 100, 1) == 0.0);
  CHECK(probe_lipschitz(parse("t"), 100, 1) == probe_lipschitz(parse("t"), 100, 1));
}

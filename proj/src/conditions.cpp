#include "hexabvp/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "hexabvp/kernels.hpp"
#include "hexabvp/quadrature.hpp"

namespace hexabvp {

namespace {

template <class F>
double row_norm(F&& row, double p, std::vector<double> seams) {
  const auto rule = CompositeRule::with_seams(seams);
  const RefineResult r = refine_until(row, p, rule, kPhiTolerance);
  if (!r.converged)
    throw QuadratureError("L^p norm of a kernel row did not converge (last change " +
                          std::to_string(r.achieved) + ")");
  return r.value;
}

void require_vars_within(const Expr& e, const std::string& allowed, const char* what) {
  for (const auto& v : free_vars(e))
    if (v != allowed)
      throw std::invalid_argument(std::string(what) + " may only depend on " + allowed + ", found '" + v + "'");
}

bool close_relative(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

double DenseMatrix::max_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j) row += std::fabs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

std::vector<double> DenseMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

double compute_phi(const BvpProblem& problem, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("compute_phi requires p > 1");
  const auto& bd = problem.boundary();
  const double inv_mu = 1.0 / std::fabs(problem.mu());

  double phi = row_norm([](double s) { return green_G({1.0, s}); }, p, {});
  for (std::size_t i = 0; i < bd.alphas.size(); ++i) {
    if (bd.alphas[i] == 0.0) continue;
    const double lo = bd.etas[i], hi = bd.etas[i + 1];
    phi += inv_mu * std::fabs(bd.alphas[i]) *
           row_norm([=](double s) { return green_K({hi, s}) - green_K({lo, s}); }, p, {lo, hi});
  }
  for (std::size_t i = 0; i < bd.betas.size(); ++i) {
    if (bd.betas[i] == 0.0) continue;
    const double eta = bd.etas[i];
    phi += inv_mu * std::fabs(bd.betas[i]) * row_norm([=](double s) { return green_G({eta, s}); }, p, {eta});
  }
  return phi;
}

MaxAbs max_abs_on_unit_interval(const Expr& p_expr, int grid) {
  if (grid < 2) throw std::invalid_argument("max_abs_on_unit_interval needs at least 2 intervals");
  auto magnitude = [&](double t) { return std::fabs(p_expr.evaluate(t, 0.0)); };

  MaxAbs best{magnitude(0.0), 0.0};
  int best_index = 0;
  for (int i = 1; i <= grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    const double v = magnitude(t);
    if (v > best.value) {
      best = {v, t};
      best_index = i;
    }
  }

  // golden-section refinement on the bracket around the grid maximizer
  double lo = static_cast<double>(std::max(best_index - 1, 0)) / grid;
  double hi = static_cast<double>(std::min(best_index + 1, grid)) / grid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = magnitude(x1), f2 = magnitude(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = magnitude(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = magnitude(x1);
    }
  }
  if (f1 > best.value) best = {f1, x1};
  if (f2 > best.value) best = {f2, x2};
  return best;
}

MResult compute_M(const BvpProblem& problem, const Expr& p_expr) {
  require_vars_within(p_expr, "t", "p(t)");
  const auto& bd = problem.boundary();
  const double inv_mu = 1.0 / std::fabs(problem.mu());
  double bracket = 1.0;
  for (std::size_t i = 0; i < bd.alphas.size(); ++i)
    bracket += inv_mu * std::fabs(bd.alphas[i]) * (bd.etas[i + 1] - bd.etas[i]);
  for (double b : bd.betas) bracket += inv_mu * std::fabs(b);

  const double p_star = max_abs_on_unit_interval(p_expr).value;
  return {p_star * bracket * integral_G_row_one(), p_star};
}

double estimate_gamma(const Expr& g_expr) {
  require_vars_within(g_expr, "u", "g(u)");
  constexpr double kAgreement = 1e-4;
  std::array<double, 6> pos{}, neg{};
  for (int k = 3; k <= 8; ++k) {
    const double u = std::pow(10.0, k);
    pos[k - 3] = g_expr.evaluate(0.0, u) / u;
    neg[k - 3] = g_expr.evaluate(0.0, -u) / -u;
  }
  for (const auto* side : {&pos, &neg}) {
    const auto& v = *side;
    if (!close_relative(v[3], v[4], kAgreement) || !close_relative(v[4], v[5], kAgreement) ||
        !close_relative(v[3], v[5], kAgreement))
      throw NoLimitError("g(u)/u does not settle as |u| grows (last probe " + std::to_string(v[5]) + ")");
  }
  if (!close_relative(pos[5], neg[5], kAgreement))
    throw NoLimitError("g(u)/u tends to different limits as u -> +inf (" + std::to_string(pos[5]) +
                       ") and u -> -inf (" + std::to_string(neg[5]) + ")");
  return 0.5 * (pos[5] + neg[5]);
}

UniquenessCertificate check_uniqueness(const BvpProblem& problem, double p, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("Lipschitz constant must be positive");
  UniquenessCertificate cert;
  cert.p = p;
  cert.L = L;
  cert.phi = compute_phi(problem, p);
  cert.product = L * cert.phi;
  cert.holds = cert.product < 1.0;
  return cert;
}

ExistenceCertificate check_existence(const BvpProblem& problem, const Expr& p_expr, const Expr& g_expr,
                                     std::optional<double> gamma_override) {
  require_vars_within(p_expr, "t", "p(t)");
  require_vars_within(g_expr, "u", "g(u)");

  ExistenceCertificate cert;
  cert.g_at_zero = g_expr.evaluate(0.0, 0.0);
  const MResult m = compute_M(problem, p_expr);
  cert.M = m.M;
  cert.p_star = m.p_star;
  if (cert.g_at_zero == 0.0) throw DegenerateError("g(0) = 0: the zero function is a solution");
  if (cert.p_star == 0.0) throw DegenerateError("p vanishes on [0,1]: the zero function is a solution");

  if (gamma_override) {
    cert.gamma = *gamma_override;
  } else {
    cert.gamma = estimate_gamma(g_expr);
    cert.gamma_from_probe = true;
  }
  cert.gamma_M = std::fabs(cert.gamma) * cert.M;
  cert.holds = cert.gamma_M <= 1.0;
  cert.strict = cert.gamma_M < 1.0;
  cert.inconclusive = std::fabs(cert.gamma_M - 1.0) <= 1e-12;
  return cert;
}

DenseMatrix nystrom_matrix(const BvpProblem& problem, const Expr& p_expr, double gamma, int n) {
  if (n < 8) throw std::invalid_argument("nystrom_matrix requires n >= 8");
  require_vars_within(p_expr, "t", "p(t)");
  const GaussLegendre& gl = gauss_legendre(n);
  std::vector<double> s(n), w(n), row_weight(n), nonlocal(n);
  for (int j = 0; j < n; ++j) {
    s[j] = 0.5 * (gl.nodes[j] + 1.0);
    w[j] = 0.5 * gl.weights[j];
    row_weight[j] = w[j] * gamma * p_expr.evaluate(s[j], 0.0);
    nonlocal[j] = problem.nonlocal_row(s[j]);
  }
  DenseMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = row_weight[j] * (green_G({s[i], s[j]}) + nonlocal[j]);
  return a;
}

PowerIteration spectral_radius(const DenseMatrix& a, int iters, std::uint64_t seed) {
  const std::size_t n = a.size();
  PowerIteration result;
  if (n == 0) {
    result.converged = true;
    return result;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = dist(rng);
  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::fabs(e));
    return m;
  };
  const double x0 = inf_norm(x);
  for (auto& v : x) v /= x0;

  double previous = -1.0;
  for (int k = 1; k <= iters; ++k) {
    std::vector<double> y = a.multiply(x);
    const double norm = inf_norm(y);
    result.iterations = k;
    result.estimate = norm;
    if (norm == 0.0) {
      result.converged = true;
      return result;
    }
    if (previous >= 0.0 && std::fabs(norm - previous) <= 1e-8 * norm) {
      result.converged = true;
      return result;
    }
    previous = norm;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return result;
}

namespace {

constexpr double kNearOne = 1e-6;

// Ratio of smallest to largest pivot magnitude of I - A under partial pivoting.
double pivot_ratio_of_identity_minus(const DenseMatrix& a) {
  const std::size_t n = a.size();
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - a(i, j);
  double min_pivot = std::numeric_limits<double>::infinity(), max_pivot = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(piv, k))) piv = i;
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
    const double pivot = m(k, k);
    min_pivot = std::min(min_pivot, std::fabs(pivot));
    max_pivot = std::max(max_pivot, std::fabs(pivot));
    if (pivot == 0.0) continue;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = m(i, k) / pivot;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= factor * m(k, j);
    }
  }
  return max_pivot == 0.0 ? 0.0 : min_pivot / max_pivot;
}

}  // namespace

SpectralDiagnostic spectral_diagnostic(const BvpProblem& problem, const Expr& p_expr, double gamma,
                                       double norm_bound, int n, std::uint64_t seed) {
  const DenseMatrix a = nystrom_matrix(problem, p_expr, gamma, n);
  const PowerIteration pi = spectral_radius(a, 1000, seed);
  SpectralDiagnostic diag;
  diag.grid_n = n;
  diag.norm_bound = norm_bound;
  diag.radius_estimate = pi.estimate;
  diag.radius_converged = pi.converged;
  // A dominant eigenvalue at 1 (to the iteration's accuracy) is flagged
  // directly; a radius above 1 may hide 1 among the smaller eigenvalues.
  if (std::fabs(pi.estimate - 1.0) <= kNearOne) diag.one_is_eigenvalue_suspected = true;
  else if (!(pi.converged && pi.estimate < 1.0))
    diag.one_is_eigenvalue_suspected = pivot_ratio_of_identity_minus(a) < 1e-10;
  return diag;
}

double probe_lipschitz(const Expr& f, int samples, std::uint64_t seed, double u_box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t_dist(0.0, 1.0);
  std::uniform_real_distribution<double> u_dist(-u_box, u_box);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = t_dist(rng);
    const double u1 = u_dist(rng);
    const double u2 = u_dist(rng);
    if (u1 == u2) continue;
    try {
      best = std::max(best, std::fabs(f.evaluate(t, u1) - f.evaluate(t, u2)) / std::fabs(u1 - u2));
    } catch (const DomainError&) {
      // points outside f's domain carry no Lipschitz information
    }
  }
  return best;
}

}  // namespace hexabvp

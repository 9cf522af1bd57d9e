#include "hexabvp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "hexabvp/kernels.hpp"

namespace hexabvp {

void SolverConfig::validate() const {
  if (grid_n < 33) throw std::invalid_argument("solver.grid_n must be at least 33");
  if (quad.gauss_order < 2) throw std::invalid_argument("quadrature order must be at least 2");
  if (quad.panels_per_segment < 1) throw std::invalid_argument("panels per segment must be at least 1");
  if (!(tol_sup > 0.0)) throw std::invalid_argument("solver.tol_sup must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver.max_iter must be at least 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw std::invalid_argument("solver.relaxation must lie in (0, 1]");
  if (!(sigma_p > 1.0)) throw std::invalid_argument("metric exponent must exceed 1");
}

// ---------------------------------------------------------------------------
// SolutionGrid

SolutionGrid::SolutionGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 4) throw std::invalid_argument("a solution grid needs at least 4 nodes");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("solution values must be finite");
}

SolutionGrid SolutionGrid::zeros(int n) { return SolutionGrid(std::vector<double>(n, 0.0)); }

double SolutionGrid::operator()(double t) const {
  const std::size_t n = values_.size();
  const double pos = std::clamp(t, 0.0, 1.0) * static_cast<double>(n - 1);
  const double nearest = std::round(pos);
  if (std::fabs(pos - nearest) <= 1e-13) return values_[static_cast<std::size_t>(nearest)];

  const std::size_t k = std::min(static_cast<std::size_t>(pos), n - 2);
  const std::size_t j0 = std::min(k == 0 ? 0 : k - 1, n - 4);
  const double x = pos - static_cast<double>(j0);
  const double x1 = x - 1.0, x2 = x - 2.0, x3 = x - 3.0;
  return -values_[j0] * x1 * x2 * x3 / 6.0 + values_[j0 + 1] * x * x2 * x3 / 2.0 -
         values_[j0 + 2] * x * x1 * x3 / 2.0 + values_[j0 + 3] * x * x1 * x2 / 6.0;
}

double SolutionGrid::integral(double a, double b) const {
  if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw std::invalid_argument("integral bounds must satisfy 0 <= a <= b <= 1");
  const std::size_t n = values_.size();
  // two-point Gauss is exact for the cubic on each grid interval
  const double g = 0.5 / std::sqrt(3.0);
  double sum = 0.0;
  std::size_t k = std::min(static_cast<std::size_t>(a * (n - 1)), n - 2);
  for (; k + 1 < n; ++k) {
    const double lo = std::max(a, node(k));
    const double hi = std::min(b, node(k + 1));
    if (hi > lo) {
      const double mid = 0.5 * (lo + hi), len = hi - lo;
      sum += 0.5 * len * ((*this)(mid - g * len) + (*this)(mid + g * len));
    }
    if (node(k + 1) >= b) break;
  }
  return sum;
}

namespace {

// Four Gauss points inside every grid interval.
template <class F>
void for_each_metric_point(std::size_t n, F&& visit) {
  const GaussLegendre& gl = gauss_legendre(4);
  const double h = 1.0 / static_cast<double>(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) * h;
    for (int q = 0; q < 4; ++q) visit(mid + 0.5 * h * gl.nodes[q], 0.5 * h * gl.weights[q]);
  }
}

void require_same_grid(const SolutionGrid& a, const SolutionGrid& b) {
  if (a.size() != b.size()) throw std::invalid_argument("solution grids differ in size");
}

}  // namespace

double sup_distance(const SolutionGrid& a, const SolutionGrid& b) {
  require_same_grid(a, b);
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::fabs(a[i] - b[i]));
  for_each_metric_point(a.size(), [&](double t, double) { best = std::max(best, std::fabs(a(t) - b(t))); });
  return best;
}

double lp_distance(const SolutionGrid& a, const SolutionGrid& b, double p) {
  require_same_grid(a, b);
  if (!(p > 1.0)) throw std::invalid_argument("lp_distance requires p > 1");
  double total = 0.0;
  for_each_metric_point(a.size(), [&](double t, double w) { total += w * std::pow(std::fabs(a(t) - b(t)), p); });
  return std::pow(total, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Fixed-point operator

SolutionGrid apply_A(const BvpProblem& problem, const SolutionGrid& u, const SolverConfig& config) {
  const std::size_t n = u.size();
  const Expr& f = problem.f();
  std::vector<double> seams = problem.seams();

  // Gamma(t,s) = G(t,s) + nonlocal_row(s). The second part does not depend on
  // t, so it is integrated once and shared by every node; per-node quadrature
  // noise in it would otherwise swamp the derivative checks at t = 0.
  const auto fixed_rule = CompositeRule::with_seams(seams, config.quad.gauss_order, config.quad.panels_per_segment);
  const double shared =
      integrate([&](double s) { return problem.nonlocal_row(s) * f.evaluate(s, u(s)); }, fixed_rule);

  seams.push_back(0.0);  // slot for the t-seam
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u.node(i);
    seams.back() = t;
    const auto rule = CompositeRule::with_seams(seams, config.quad.gauss_order, config.quad.panels_per_segment);
    out[i] = integrate([&](double s) { return green_G({t, s}) * f.evaluate(s, u(s)); }, rule) + shared;
  }
  return SolutionGrid(std::move(out));
}

std::pair<SolutionGrid, IterationTrace> picard_solve(const BvpProblem& problem, const SolverConfig& config,
                                                     const std::optional<SolutionGrid>& initial) {
  config.validate();
  SolutionGrid u = initial ? *initial : SolutionGrid::zeros(config.grid_n);
  if (static_cast<int>(u.size()) != config.grid_n) throw std::invalid_argument("initial guess has the wrong grid size");

  IterationTrace trace;
  if (free_vars(problem.f()).count("u") == 0) {
    // A is a constant map: its single image is the fixed point, and applying
    // A again reproduces it bit for bit.
    SolutionGrid fixed = apply_A(problem, u, config);
    trace.iterations = 1;
    trace.d_distance.push_back(0.0);
    trace.sigma_distance.push_back(0.0);
    trace.converged = true;
    return {std::move(fixed), std::move(trace)};
  }

  const double w = config.relaxation;
  for (int k = 1; k <= config.max_iter; ++k) {
    const SolutionGrid au = apply_A(problem, u, config);
    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) next[i] = (1.0 - w) * u[i] + w * au[i];
    SolutionGrid updated(std::move(next));
    const double d = sup_distance(updated, u);
    trace.d_distance.push_back(d);
    trace.sigma_distance.push_back(lp_distance(updated, u, config.sigma_p));
    trace.iterations = k;
    u = std::move(updated);
    if (d <= config.tol_sup) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(u), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Closed-form linear solution

SolutionGrid linear_solve_closed_form(const BvpProblem& problem, const Expr& h_expr, const SolverConfig& config) {
  for (const auto& v : free_vars(h_expr))
    if (v != "t") throw std::invalid_argument("h(t) may only depend on t, found '" + v + "'");
  if (config.grid_n < 4) throw std::invalid_argument("grid_n too small");

  const CompositeRule unit(std::vector<double>{0.0, 1.0}, config.quad.gauss_order, config.quad.panels_per_segment);
  auto h = [&](double s) { return h_expr.evaluate(s, 0.0); };
  // int_a^b g via the unit rule mapped onto [a, b]
  auto integrate_on = [&](auto&& g, double a, double b) {
    const double len = b - a;
    if (len == 0.0) return 0.0;
    return len * integrate([&](double x) { return g(a + len * x); }, unit);
  };

  const double kappa1 = integrate([&](double s) { return std::pow(1.0 - s, 3) * h(s); }, unit);
  auto base = [&](double t) {
    const double memory = integrate_on([&](double s) { return std::pow(t - s, 5) * h(s); }, 0.0, t);
    return (-memory + kappa1 * std::pow(t, 5)) / 120.0;
  };

  const auto& bd = problem.boundary();
  double weighted = 0.0;
  for (std::size_t i = 0; i < bd.alphas.size(); ++i)
    if (bd.alphas[i] != 0.0) weighted += bd.alphas[i] * integrate_on(base, bd.etas[i], bd.etas[i + 1]);
  for (std::size_t i = 0; i < bd.betas.size(); ++i)
    if (bd.betas[i] != 0.0) weighted += bd.betas[i] * base(bd.etas[i]);
  const double kappa6 = weighted / problem.mu();

  return SolutionGrid::sample([&](double t) { return base(t) + kappa6; }, config.grid_n);
}

// ---------------------------------------------------------------------------
// Diagnostics

std::vector<double> finite_difference_weights(double x0, std::span<const double> x, int k) {
  const int n = static_cast<int>(x.size()) - 1;
  if (k < 0 || k > n) throw std::invalid_argument("stencil too small for the requested derivative");
  // delta[m][j]: weight of x_j for derivative m on the current node prefix
  std::vector<std::vector<double>> delta(k + 1, std::vector<double>(n + 1, 0.0));
  delta[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0] - x0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, k);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int m = mn; m >= 1; --m) delta[m][i] = c1 * (m * delta[m - 1][i - 1] - c5 * delta[m][i - 1]) / c2;
        delta[0][i] = -c1 * c5 * delta[0][i - 1] / c2;
      }
      for (int m = mn; m >= 1; --m) delta[m][j] = (c4 * delta[m][j] - m * delta[m - 1][j]) / c3;
      delta[0][j] = c4 * delta[0][j] / c3;
    }
    c1 = c2;
  }
  return delta[k];
}

std::array<double, 6> bc_residuals(const BvpProblem& problem, const SolutionGrid& u) {
  const std::size_t n = u.size();
  if (n < 33) throw std::invalid_argument("grid too coarse for boundary stencils (need at least 33 nodes)");

  // one-sided 7-node stencils
  auto one_sided = [&](int k, bool at_right) {
    constexpr std::size_t width = 7;
    const std::size_t first = at_right ? n - width : 0;
    std::vector<double> x(width);
    for (std::size_t j = 0; j < width; ++j) x[j] = u.node(first + j);
    const auto w = finite_difference_weights(at_right ? 1.0 : 0.0, x, k);
    double acc = 0.0;
    for (std::size_t j = 0; j < width; ++j) acc += w[j] * u[first + j];
    return std::fabs(acc);
  };

  std::array<double, 6> r{};
  for (int k = 1; k <= 4; ++k) r[k - 1] = one_sided(k, false);
  r[4] = one_sided(2, true);

  const auto& bd = problem.boundary();
  double rhs = 0.0;
  for (std::size_t i = 0; i < bd.alphas.size(); ++i) rhs += bd.alphas[i] * u.integral(bd.etas[i], bd.etas[i + 1]);
  for (std::size_t i = 0; i < bd.betas.size(); ++i) rhs += bd.betas[i] * u(bd.etas[i]);
  r[5] = std::fabs(u[0] - rhs);
  return r;
}

namespace {

// Least squares min ||A c - y|| by Householder QR; A is rows x cols, row-major.
std::vector<double> least_squares(std::vector<double> a, std::vector<double> y, std::size_t rows, std::size_t cols) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * cols + j]; };
  for (std::size_t k = 0; k < cols; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm += at(i, k) * at(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = at(k, k) > 0.0 ? -norm : norm;
    std::vector<double> v(rows - k);
    for (std::size_t i = k; i < rows; ++i) v[i - k] = at(i, k);
    v[0] -= alpha;
    double vv = 0.0;
    for (double e : v) vv += e * e;
    if (vv == 0.0) continue;
    for (std::size_t j = k; j < cols; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * at(i, j);
      const double scale = 2.0 * dot / vv;
      for (std::size_t i = k; i < rows; ++i) at(i, j) -= scale * v[i - k];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * y[i];
    const double scale = 2.0 * dot / vv;
    for (std::size_t i = k; i < rows; ++i) y[i] -= scale * v[i - k];
  }
  std::vector<double> c(cols, 0.0);
  for (std::size_t kk = cols; kk-- > 0;) {
    double acc = y[kk];
    for (std::size_t j = kk + 1; j < cols; ++j) acc -= at(kk, j) * c[j];
    c[kk] = at(kk, kk) == 0.0 ? 0.0 : acc / at(kk, kk);
  }
  return c;
}

// Coefficients of d/dx of sum c_k T_k(x).
std::vector<double> chebyshev_derivative(const std::vector<double>& c) {
  const std::size_t n = c.size();
  if (n <= 1) return {0.0};
  std::vector<double> d(n + 1, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) d[k - 1] = d[k + 1] + 2.0 * static_cast<double>(k) * c[k];
  d[0] *= 0.5;
  d.resize(n - 1);
  return d;
}

double chebyshev_eval(const std::vector<double>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

}  // namespace

OdeResidual ode_residual(const BvpProblem& problem, const SolutionGrid& u, int sample_n, int degree) {
  if (sample_n < 1) throw std::invalid_argument("ode_residual needs at least one sample point");
  if (degree < 6) throw std::invalid_argument("fit degree must be at least 6");
  const std::size_t rows = u.size();
  const std::size_t cols = static_cast<std::size_t>(degree) + 1;
  if (rows < cols) throw std::invalid_argument("grid too coarse for the requested fit degree");

  std::vector<double> a(rows * cols), y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double x = 2.0 * u.node(i) - 1.0;
    double tkm1 = 1.0, tk = x;
    a[i * cols] = 1.0;
    if (cols > 1) a[i * cols + 1] = x;
    for (std::size_t k = 2; k < cols; ++k) {
      const double next = 2.0 * x * tk - tkm1;
      a[i * cols + k] = next;
      tkm1 = tk;
      tk = next;
    }
    y[i] = u[i];
  }
  std::vector<double> c = least_squares(std::move(a), std::move(y), rows, cols);
  for (int d = 0; d < 6; ++d) c = chebyshev_derivative(c);

  OdeResidual result;
  result.degree = degree;
  result.ill_conditioned = degree > 20;
  constexpr double kChain = 64.0;  // (dx/dt)^6 for x = 2t - 1
  for (int k = 0; k < sample_n; ++k) {
    const double t = (k + 1.0) / (sample_n + 1.0);
    const double u6 = kChain * chebyshev_eval(c, 2.0 * t - 1.0);
    result.value = std::max(result.value, std::fabs(u6 + problem.f().evaluate(t, u(t))));
  }
  return result;
}

double contraction_probe(const BvpProblem& problem, const SolverConfig& config, int pairs, double p,
                         std::uint64_t seed) {
  if (pairs < 1) throw std::invalid_argument("contraction_probe needs at least one pair");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto random_cubic = [&] {
    const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
    return SolutionGrid::sample([=](double t) { return c0 + t * (c1 + t * (c2 + t * c3)); }, config.grid_n);
  };
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const SolutionGrid u1 = random_cubic();
    const SolutionGrid u2 = random_cubic();
    const double before = lp_distance(u1, u2, p);
    if (before == 0.0) continue;
    const double after = lp_distance(apply_A(problem, u1, config), apply_A(problem, u2, config), p);
    worst = std::max(worst, after / before);
  }
  return worst;
}

}  // namespace hexabvp

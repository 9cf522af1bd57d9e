#pragma once

// Fixed-point solution of u = A u with
//   (A u)(t) = int_0^1 Gamma(t,s) f(s, u(s)) ds
// on a uniform output grid, plus the diagnostics used to check a solution:
// boundary residuals, an ODE residual, and an independent closed-form route
// for right-hand sides that do not depend on u.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hexabvp/expr.hpp"
#include "hexabvp/problem.hpp"
#include "hexabvp/quadrature.hpp"

namespace hexabvp {

struct QuadratureParams {
  int gauss_order = kDefaultGaussOrder;
  int panels_per_segment = kDefaultPanelsPerSegment;
};

struct SolverConfig {
  int grid_n = 257;
  QuadratureParams quad;
  double tol_sup = 1e-10;
  int max_iter = 500;
  double relaxation = 1.0;
  double sigma_p = 2.0;  // exponent of the L^p metric in the trace

  /// Throws std::invalid_argument on the first violated bound.
  void validate() const;
};

/// Values of u on n uniform nodes t_i = i / (n - 1), with a piecewise cubic
/// interpolant: on [t_k, t_{k+1}] the cubic through the four nearest nodes.
class SolutionGrid {
 public:
  explicit SolutionGrid(std::vector<double> values);

  static SolutionGrid zeros(int n);

  template <class F>
  static SolutionGrid sample(F&& f, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = f(node_at(i, n));
    return SolutionGrid(std::move(v));
  }

  std::size_t size() const noexcept { return values_.size(); }
  double step() const noexcept { return 1.0 / static_cast<double>(values_.size() - 1); }
  double node(std::size_t i) const noexcept { return node_at(i, values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Interpolant at t in [0,1]; reproduces node values exactly.
  double operator()(double t) const;

  /// Exact integral of the interpolant over [a, b], 0 <= a <= b <= 1.
  double integral(double a, double b) const;

 private:
  static double node_at(std::size_t i, std::size_t n) {
    return i + 1 == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
  }

  std::vector<double> values_;
};

/// d(u1, u2): max |u1 - u2| over the grid nodes and the interior sample
/// points used by lp_distance.
double sup_distance(const SolutionGrid& a, const SolutionGrid& b);

/// sigma(u1, u2) = (int_0^1 |u1 - u2|^p)^(1/p) on the interpolants.
double lp_distance(const SolutionGrid& a, const SolutionGrid& b, double p);

struct IterationTrace {
  std::vector<double> d_distance;      // d(u_k, u_{k-1}) per iteration
  std::vector<double> sigma_distance;  // sigma(u_k, u_{k-1}) per iteration
  int iterations = 0;
  bool converged = false;
};

SolutionGrid apply_A(const BvpProblem& problem, const SolutionGrid& u, const SolverConfig& config);

/// Relaxed Picard iteration u <- (1 - w) u + w A u from `initial` (default
/// u = 0) until d(u_new, u_old) <= tol_sup or max_iter. Non-convergence is
/// reported in the trace, not thrown.
std::pair<SolutionGrid, IterationTrace> picard_solve(const BvpProblem& problem, const SolverConfig& config,
                                                     const std::optional<SolutionGrid>& initial = std::nullopt);

/// Solution of u^(6) + h(t) = 0 under the problem's boundary conditions by
///   u(t) = -(1/120) int_0^t (t-s)^5 h(s) ds + kappa_1 t^5 / 120 + kappa_6,
/// with kappa_1 = int_0^1 (1-s)^3 h(s) ds and kappa_6 fixed by the nonlocal
/// condition. Never touches the combined kernel.
SolutionGrid linear_solve_closed_form(const BvpProblem& problem, const Expr& h_expr, const SolverConfig& config);

/// |u'(0)|, |u''(0)|, |u'''(0)|, |u''''(0)|, |u''(1)| from one-sided 7-point
/// stencils, and |u(0) - sum alpha_i int_{eta_i}^{eta_{i+1}} u - sum beta_i u(eta_i)|.
std::array<double, 6> bc_residuals(const BvpProblem& problem, const SolutionGrid& u);

struct OdeResidual {
  double value = 0.0;
  int degree = 0;
  bool ill_conditioned = false;  // degree above 20
};

/// max over `sample_n` interior points of |u^(6) + f(t, u)|, with u^(6) taken
/// from a least-squares Chebyshev fit of the given degree.
OdeResidual ode_residual(const BvpProblem& problem, const SolutionGrid& u, int sample_n = 101, int degree = 12);

/// Largest sigma(A u1, A u2) / sigma(u1, u2) over `pairs` seeded random
/// cubic polynomials u1, u2 with coefficients in [-1, 1].
double contraction_probe(const BvpProblem& problem, const SolverConfig& config, int pairs, double p,
                         std::uint64_t seed);

/// Weights w_j with f^(k)(x0) ~ sum w_j f(x_j) (Fornberg's recursion).
std::vector<double> finite_difference_weights(double x0, std::span<const double> x, int k);

}  // namespace hexabvp

#pragma once

// Solvability certificates.
//
// Uniqueness: with |f(t,u1) - f(t,u2)| < L |u1 - u2| and
//   Phi = ||G(1,.)||_p + (1/|mu|) sum |alpha_i| ||K(eta_{i+1},.) - K(eta_i,.)||_p
//                      + (1/|mu|) sum |beta_i|  ||G(eta_i,.)||_p,
// L * Phi < 1 makes the fixed-point operator a contraction in the L^p metric.
//
// Existence: with f = p(t) g(u), g(u)/u -> gamma and
//   M = p* (1 + (1/|mu|) sum |alpha_i| (eta_{i+1} - eta_i) + (1/|mu|) sum |beta_i|) / 1440,
// |gamma| M <= 1 gives at least one nontrivial solution, and 1 is not an
// eigenvalue of the linearization (checked numerically by a Nystrom matrix).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hexabvp/expr.hpp"
#include "hexabvp/problem.hpp"

namespace hexabvp {

/// The g(u)/u probe did not settle on a common limit.
class NoLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The nontriviality side condition p(t0) g(0) != 0 fails.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quadrature refinement hit its panel cap before reaching tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UniquenessCertificate {
  double p = 2.0;
  double L = 0.0;
  double phi = 0.0;
  double product = 0.0;  // L * phi
  bool holds = false;    // product < 1
};

struct ExistenceCertificate {
  double gamma = 0.0;
  bool gamma_from_probe = false;
  double g_at_zero = 0.0;
  double p_star = 0.0;
  double M = 0.0;
  double gamma_M = 0.0;       // |gamma| * M
  bool holds = false;         // gamma_M <= 1
  bool strict = false;        // gamma_M < 1
  bool inconclusive = false;  // gamma_M == 1 to within 1e-12
};

struct SpectralDiagnostic {
  int grid_n = 0;
  double norm_bound = 0.0;  // |gamma| * M
  double radius_estimate = 0.0;
  bool radius_converged = false;
  bool one_is_eigenvalue_suspected = false;
};

/// Row-major square matrix.
class DenseMatrix {
 public:
  explicit DenseMatrix(std::size_t n = 0) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  /// Induced infinity norm.
  double max_row_sum() const;
  std::vector<double> multiply(const std::vector<double>& x) const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

inline constexpr double kPhiTolerance = 1e-12;

double compute_phi(const BvpProblem& problem, double p);

struct MaxAbs {
  double value = 0.0;
  double argmax = 0.0;
};

/// max over [0,1] of |p(t)|: a uniform grid of `grid` intervals, then a
/// golden-section search around the best grid node.
MaxAbs max_abs_on_unit_interval(const Expr& p_expr, int grid = 10000);

struct MResult {
  double M = 0.0;
  double p_star = 0.0;
};

MResult compute_M(const BvpProblem& problem, const Expr& p_expr);

/// Limit of g(u)/u as |u| -> infinity, probed at u = +-10^k, k = 3..8.
/// Throws NoLimitError unless the last three values on each side agree, and
/// the two sides agree with each other, to 1e-4 * max(1, |value|).
double estimate_gamma(const Expr& g_expr);

UniquenessCertificate check_uniqueness(const BvpProblem& problem, double p, double L);

ExistenceCertificate check_existence(const BvpProblem& problem, const Expr& p_expr, const Expr& g_expr,
                                     std::optional<double> gamma_override = std::nullopt);

/// Nystrom discretization of (Lu)(t) = int Gamma(t,s) gamma p(s) u(s) ds on
/// the n-point Gauss-Legendre rule of [0,1], collocated at the nodes.
DenseMatrix nystrom_matrix(const BvpProblem& problem, const Expr& p_expr, double gamma, int n);

struct PowerIteration {
  double estimate = 0.0;
  bool converged = false;  // relative change below 1e-8
  int iterations = 0;
};

/// Dominant-eigenvalue magnitude by power iteration from a seeded random
/// start. The estimate is ||A x||_inf for the inf-normalized iterate, so it
/// never exceeds max_row_sum().
PowerIteration spectral_radius(const DenseMatrix& a, int iters = 1000, std::uint64_t seed = 1);

SpectralDiagnostic spectral_diagnostic(const BvpProblem& problem, const Expr& p_expr, double gamma,
                                       double norm_bound, int n = 64, std::uint64_t seed = 1);

/// Empirical max of |f(t,u1) - f(t,u2)| / |u1 - u2| over random points with
/// t in [0,1], u in [-u_box, u_box]. Only a lower bound on the true constant.
double probe_lipschitz(const Expr& f, int samples, std::uint64_t seed, double u_box = 10.0);

}  // namespace hexabvp

#pragma once

// Boundary data and problem model for
//
//   u^(6)(t) + f(t, u(t)) = 0,  t in (0,1),
//   u'(0) = u''(0) = u'''(0) = u''''(0) = u''(1) = 0,
//   u(0) = sum_{i<m} alpha_i * int_{eta_i}^{eta_{i+1}} u + sum_{i<=m} beta_i * u(eta_i).

#include <stdexcept>
#include <string>
#include <vector>

#include "hexabvp/expr.hpp"
#include "hexabvp/kernels.hpp"

namespace hexabvp {

inline constexpr double kMuFloor = 1e-12;

struct BoundaryData {
  std::vector<double> alphas;  // m - 1 integral weights
  std::vector<double> betas;   // m point weights
  std::vector<double> etas;    // 0 < eta_1 < ... < eta_m <= 1

  std::size_t m() const noexcept { return etas.size(); }
};

/// One violated invariant, naming the offending field.
struct ValidationIssue {
  std::string field;
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

/// mu = 1 - (sum_i alpha_i (eta_{i+1} - eta_i) + sum_i beta_i).
double compute_mu(const BoundaryData& boundary);

/// All invariant violations of the boundary data and nonlinearity; empty when valid.
std::vector<ValidationIssue> validate(const Expr& f, const BoundaryData& boundary,
                                      double mu_floor = kMuFloor);

/// A validated problem. Immutable; mu is always recomputed from the boundary data.
class BvpProblem {
 public:
  /// Throws ValidationError listing every violated invariant.
  static BvpProblem create(Expr f, BoundaryData boundary, double mu_floor = kMuFloor);

  const Expr& f() const noexcept { return f_; }
  const BoundaryData& boundary() const noexcept { return boundary_; }
  double mu() const noexcept { return mu_; }

  /// s-dependent part of the combined kernel, already scaled by 1/mu:
  /// (1/mu) [sum alpha_i (K(eta_{i+1},s) - K(eta_i,s)) + sum beta_i G(eta_i,s)].
  double nonlocal_row(double s) const;

  /// Kink locations of the kernel rows in s (the eta_i).
  const std::vector<double>& seams() const noexcept { return boundary_.etas; }

 private:
  BvpProblem(Expr f, BoundaryData boundary, double mu)
      : f_(std::move(f)), boundary_(std::move(boundary)), mu_(mu) {}

  Expr f_;
  BoundaryData boundary_;
  double mu_;
};

/// Gamma(t,s) = G(t,s) + (1/mu) sum alpha_i (K(eta_{i+1},s) - K(eta_i,s))
///                     + (1/mu) sum beta_i G(eta_i,s).
double combined_kernel(const BvpProblem& problem, KernelPoint pt);

}  // namespace hexabvp

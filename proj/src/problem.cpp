#include "hexabvp/problem.hpp"

#include <cmath>

namespace hexabvp {

namespace {

std::string summarize(const std::vector<ValidationIssue>& issues) {
  std::string out = "invalid problem:";
  for (const auto& issue : issues) out += " [" + issue.field + "] " + issue.message + ";";
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

double compute_mu(const BoundaryData& boundary) {
  if (boundary.alphas.size() + 1 != boundary.etas.size())
    throw std::invalid_argument("compute_mu: need exactly one alpha per consecutive eta pair");
  double weighted = 0.0;
  for (std::size_t i = 0; i < boundary.alphas.size(); ++i)
    weighted += boundary.alphas[i] * (boundary.etas[i + 1] - boundary.etas[i]);
  for (double b : boundary.betas) weighted += b;
  return 1.0 - weighted;
}

std::vector<ValidationIssue> validate(const Expr& f, const BoundaryData& boundary, double mu_floor) {
  std::vector<ValidationIssue> issues;
  const std::size_t m = boundary.m();

  if (f.empty()) {
    issues.push_back({"f", "missing nonlinearity"});
  } else {
    for (const auto& v : free_vars(f))
      if (v != "t" && v != "u") issues.push_back({"f", "unexpected variable '" + v + "'"});
  }

  bool shapes_ok = true;
  if (m < 2) {
    issues.push_back({"etas", "m >= 2 interior points required, got " + std::to_string(m)});
    shapes_ok = false;
  }
  if (boundary.betas.size() != m) {
    issues.push_back({"betas", "expected " + std::to_string(m) + " entries, got " +
                                   std::to_string(boundary.betas.size())});
    shapes_ok = false;
  }
  if (boundary.alphas.size() + 1 != m) {
    issues.push_back({"alphas", "expected " + std::to_string(m == 0 ? 0 : m - 1) + " entries, got " +
                                    std::to_string(boundary.alphas.size())});
    shapes_ok = false;
  }

  auto check_finite = [&](const std::vector<double>& values, const char* field) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i])) {
        issues.push_back({field, "entry " + std::to_string(i) + " is not finite"});
        shapes_ok = false;
      }
  };
  check_finite(boundary.alphas, "alphas");
  check_finite(boundary.betas, "betas");
  check_finite(boundary.etas, "etas");

  bool order_ok = true;
  for (std::size_t i = 0; i < m; ++i) {
    const double lower = i == 0 ? 0.0 : boundary.etas[i - 1];
    if (!(boundary.etas[i] > lower)) {
      issues.push_back({"etas", "entry " + std::to_string(i) + " must exceed " +
                                    (i == 0 ? std::string("0") : "the previous entry")});
      order_ok = false;
    }
  }
  if (m > 0 && !(boundary.etas.back() <= 1.0)) {
    issues.push_back({"etas", "last entry must be <= 1"});
    order_ok = false;
  }

  if (shapes_ok && order_ok) {
    const double mu = compute_mu(boundary);
    if (!(std::fabs(mu) > mu_floor))
      issues.push_back({"mu", "degenerate boundary data: |mu| = " + std::to_string(std::fabs(mu)) +
                                  " does not exceed the floor"});
  }
  return issues;
}

BvpProblem BvpProblem::create(Expr f, BoundaryData boundary, double mu_floor) {
  auto issues = validate(f, boundary, mu_floor);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  const double mu = compute_mu(boundary);
  return BvpProblem(std::move(f), std::move(boundary), mu);
}

double BvpProblem::nonlocal_row(double s) const {
  const auto& a = boundary_.alphas;
  const auto& b = boundary_.betas;
  const auto& eta = boundary_.etas;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += a[i] * (green_K({eta[i + 1], s}) - green_K({eta[i], s}));
  for (std::size_t i = 0; i < b.size(); ++i) sum += b[i] * green_G({eta[i], s});
  return sum / mu_;
}

double combined_kernel(const BvpProblem& problem, KernelPoint pt) {
  return green_G(pt) + problem.nonlocal_row(pt.s);
}

}  // namespace hexabvp

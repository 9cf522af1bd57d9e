#pragma once

// Problem configuration and report documents (JSON).
//
// Config:
//   {
//     "problem":       { "f": "...", "alphas": [...], "betas": [...], "etas": [...] },
//     "factorization": { "p_of_t": "...", "g_of_u": "...", "gamma": 75 },       // optional; gamma optional
//     "conditions":    { "p": 2, "L": 1000 },                                   // optional
//     "solver":        { "grid_n": 257, "tol_sup": 1e-10, "max_iter": 500, "relaxation": 1 }  // optional
//   }
// Unknown keys anywhere are rejected.

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexabvp/expr.hpp"
#include "hexabvp/problem.hpp"
#include "hexabvp/solver.hpp"

namespace hexabvp {

/// Schema violations, each prefixed with its key path (e.g. "problem.etas[1]").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct FactorizationConfig {
  std::string p_of_t;
  std::string g_of_u;
  std::optional<double> gamma;
};

struct ProblemConfig {
  std::string f;
  BoundaryData boundary;
  std::optional<FactorizationConfig> factorization;
  double p = 2.0;
  std::optional<double> L;
  SolverConfig solver;
};

ProblemConfig parse_problem_config(const nlohmann::json& doc);
ProblemConfig load_problem_config(const std::filesystem::path& path);

/// Config after parsing every expression and validating the problem.
struct LoadedProblem {
  BvpProblem problem;
  std::optional<Expr> p_of_t;
  std::optional<Expr> g_of_u;
  std::optional<double> gamma;
  double p;
  std::optional<double> L;
  SolverConfig solver;
};

/// Throws ConfigError (expression syntax, problem invariants, a factorization
/// that does not reproduce f).
LoadedProblem load_problem(const ProblemConfig& config);

struct SolverSummary {
  bool converged = false;
  int iterations = 0;
  double final_d = 0.0;
  double final_sigma = 0.0;
  std::array<double, 6> bc_residuals{};
  double ode_residual = 0.0;
};

/// Unset optionals serialize as null.
struct Report {
  double mu = 0.0;
  std::optional<double> phi;
  std::optional<double> L;
  std::optional<double> L_phi;
  std::optional<bool> uniqueness_holds;
  std::optional<double> gamma;
  std::optional<double> p_star;
  std::optional<double> M;
  std::optional<double> gamma_M;
  std::optional<bool> existence_holds;
  std::optional<double> spectral_radius_estimate;
  std::optional<SolverSummary> solver;
};

nlohmann::ordered_json to_json(const Report& report);

/// `t,u` header then one row per node, 17 significant digits.
std::string solution_csv(const SolutionGrid& u);

}  // namespace hexabvp

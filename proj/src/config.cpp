#include "hexabvp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

namespace hexabvp {

namespace {

using nlohmann::json;

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid config:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

// Collects schema violations while walking the document.
class SchemaReader {
 public:
  std::vector<std::string> problems;

  const json* object(const json& parent, const std::string& path, const std::string& key, bool required,
                     std::initializer_list<const char*> allowed) {
    const std::string here = path.empty() ? key : path + "." + key;
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) problems.push_back(here + ": missing required object");
      return nullptr;
    }
    if (!it->is_object()) {
      problems.push_back(here + ": expected an object");
      return nullptr;
    }
    reject_unknown(*it, here, allowed);
    return &*it;
  }

  void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
      if (!keys.count(key)) problems.push_back((path.empty() ? key : path + "." + key) + ": unknown key");
  }

  std::optional<double> real(const json& obj, const std::string& path, const char* key, bool required) {
    const std::string here = path + "." + key;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) problems.push_back(here + ": missing required number");
      return std::nullopt;
    }
    if (!it->is_number() || !std::isfinite(it->get<double>())) {
      problems.push_back(here + ": expected a finite number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<long long> integer(const json& obj, const std::string& path, const char* key) {
    const std::string here = path + "." + key;
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_number_integer()) {
      problems.push_back(here + ": expected an integer");
      return std::nullopt;
    }
    return it->get<long long>();
  }

  std::optional<std::string> text(const json& obj, const std::string& path, const char* key, bool required) {
    const std::string here = path + "." + key;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) problems.push_back(here + ": missing required expression");
      return std::nullopt;
    }
    if (!it->is_string() || it->get<std::string>().empty()) {
      problems.push_back(here + ": expected a non-empty expression string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::vector<double> reals(const json& obj, const std::string& path, const char* key) {
    const std::string here = path + "." + key;
    std::vector<double> out;
    auto it = obj.find(key);
    if (it == obj.end()) {
      problems.push_back(here + ": missing required array");
      return out;
    }
    if (!it->is_array()) {
      problems.push_back(here + ": expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& v = (*it)[i];
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        problems.push_back(here + "[" + std::to_string(i) + "]: expected a finite number");
        continue;
      }
      out.push_back(v.get<double>());
    }
    return out;
  }
};

std::optional<Expr> parse_field(const std::string& source, const std::string& path, std::vector<std::string>& problems) {
  try {
    return parse(source);
  } catch (const ParseError& e) {
    problems.push_back(path + ": " + e.what());
    return std::nullopt;
  }
}

void require_only(const Expr& e, const std::string& var, const std::string& path, std::vector<std::string>& problems) {
  for (const auto& v : free_vars(e))
    if (v != var) problems.push_back(path + ": may only depend on " + var + ", found '" + v + "'");
}

// The factors must reproduce f wherever all three evaluate.
bool factorization_matches(const Expr& f, const Expr& p, const Expr& g) {
  std::mt19937_64 rng(20240229);
  std::uniform_real_distribution<double> t_dist(0.0, 1.0), u_dist(-5.0, 5.0);
  for (int i = 0; i < 64; ++i) {
    const double t = t_dist(rng), u = u_dist(rng);
    double lhs, rhs;
    try {
      lhs = f.evaluate(t, u);
      rhs = p.evaluate(t, 0.0) * g.evaluate(0.0, u);
    } catch (const DomainError&) {
      continue;
    }
    if (std::fabs(lhs - rhs) > 1e-9 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)})) return false;
  }
  return true;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json nullable(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

ProblemConfig parse_problem_config(const nlohmann::json& doc) {
  SchemaReader r;
  ProblemConfig cfg;
  if (!doc.is_object()) throw ConfigError({"(root): expected an object"});
  r.reject_unknown(doc, "", {"problem", "factorization", "conditions", "solver"});

  if (const json* problem = r.object(doc, "", "problem", true, {"f", "alphas", "betas", "etas"})) {
    if (auto f = r.text(*problem, "problem", "f", true)) cfg.f = *f;
    cfg.boundary.alphas = r.reals(*problem, "problem", "alphas");
    cfg.boundary.betas = r.reals(*problem, "problem", "betas");
    cfg.boundary.etas = r.reals(*problem, "problem", "etas");
  }

  if (const json* fac = r.object(doc, "", "factorization", false, {"p_of_t", "g_of_u", "gamma"})) {
    FactorizationConfig fc;
    if (auto p = r.text(*fac, "factorization", "p_of_t", true)) fc.p_of_t = *p;
    if (auto g = r.text(*fac, "factorization", "g_of_u", true)) fc.g_of_u = *g;
    fc.gamma = r.real(*fac, "factorization", "gamma", false);
    cfg.factorization = fc;
  }

  if (const json* cond = r.object(doc, "", "conditions", false, {"p", "L"})) {
    if (auto p = r.real(*cond, "conditions", "p", false)) {
      if (*p > 1.0) cfg.p = *p;
      else r.problems.push_back("conditions.p: must exceed 1");
    }
    if (auto L = r.real(*cond, "conditions", "L", false)) {
      if (*L > 0.0) cfg.L = *L;
      else r.problems.push_back("conditions.L: must be positive");
    }
  }

  if (const json* sol = r.object(doc, "", "solver", false, {"grid_n", "tol_sup", "max_iter", "relaxation"})) {
    if (auto n = r.integer(*sol, "solver", "grid_n")) {
      if (*n >= 33 && *n <= 1000000) cfg.solver.grid_n = static_cast<int>(*n);
      else r.problems.push_back("solver.grid_n: must lie in [33, 1000000]");
    }
    if (auto tol = r.real(*sol, "solver", "tol_sup", false)) {
      if (*tol > 0.0) cfg.solver.tol_sup = *tol;
      else r.problems.push_back("solver.tol_sup: must be positive");
    }
    if (auto it = r.integer(*sol, "solver", "max_iter")) {
      if (*it >= 1 && *it <= 100000000) cfg.solver.max_iter = static_cast<int>(*it);
      else r.problems.push_back("solver.max_iter: must lie in [1, 100000000]");
    }
    if (auto w = r.real(*sol, "solver", "relaxation", false)) {
      if (*w > 0.0 && *w <= 1.0) cfg.solver.relaxation = *w;
      else r.problems.push_back("solver.relaxation: must lie in (0, 1]");
    }
  }

  if (!r.problems.empty()) throw ConfigError(std::move(r.problems));
  return cfg;
}

ProblemConfig load_problem_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open file"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return parse_problem_config(doc);
}

LoadedProblem load_problem(const ProblemConfig& config) {
  std::vector<std::string> problems;
  auto f = parse_field(config.f, "problem.f", problems);
  std::optional<Expr> p_expr, g_expr;
  if (config.factorization) {
    p_expr = parse_field(config.factorization->p_of_t, "factorization.p_of_t", problems);
    g_expr = parse_field(config.factorization->g_of_u, "factorization.g_of_u", problems);
    if (p_expr) require_only(*p_expr, "t", "factorization.p_of_t", problems);
    if (g_expr) require_only(*g_expr, "u", "factorization.g_of_u", problems);
  }
  if (!f) throw ConfigError(std::move(problems));

  for (const auto& issue : validate(*f, config.boundary))
    problems.push_back((issue.field == "f" ? "problem.f" : "problem." + issue.field) + ": " + issue.message);
  if (!problems.empty()) throw ConfigError(std::move(problems));

  if (p_expr && g_expr && !factorization_matches(*f, *p_expr, *g_expr))
    throw ConfigError({"factorization: p_of_t * g_of_u does not reproduce problem.f"});

  std::optional<double> gamma = config.factorization ? config.factorization->gamma : std::nullopt;
  return LoadedProblem{BvpProblem::create(*f, config.boundary), p_expr, g_expr, gamma, config.p, config.L,
                       config.solver};
}

nlohmann::ordered_json to_json(const Report& report) {
  nlohmann::ordered_json doc;
  doc["mu"] = report.mu;
  doc["phi"] = nullable(report.phi);
  doc["L"] = nullable(report.L);
  doc["L_phi"] = nullable(report.L_phi);
  doc["uniqueness_holds"] = nullable(report.uniqueness_holds);
  doc["gamma"] = nullable(report.gamma);
  doc["p_star"] = nullable(report.p_star);
  doc["M"] = nullable(report.M);
  doc["gamma_M"] = nullable(report.gamma_M);
  doc["existence_holds"] = nullable(report.existence_holds);
  doc["spectral_radius_estimate"] = nullable(report.spectral_radius_estimate);
  if (report.solver) {
    const SolverSummary& s = *report.solver;
    nlohmann::ordered_json sol;
    sol["converged"] = s.converged;
    sol["iterations"] = s.iterations;
    sol["final_d"] = s.final_d;
    sol["final_sigma"] = s.final_sigma;
    sol["bc_residuals"] = s.bc_residuals;
    sol["ode_residual"] = s.ode_residual;
    doc["solver"] = sol;
  } else {
    doc["solver"] = nullptr;
  }
  return doc;
}

std::string solution_csv(const SolutionGrid& u) {
  std::string out = "t,u\n";
  char line[96];
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::snprintf(line, sizeof line, "%.16e,%.16e\n", u.node(i), u[i]);
    out += line;
  }
  return out;
}

}  // namespace hexabvp

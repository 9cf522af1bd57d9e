#pragma once

// Composite Gauss-Legendre rules on [0,1].
//
// A rule is a list of breakpoints 0 = b_0 < b_1 < ... < b_k = 1. Each
// segment [b_i, b_{i+1}] is split into `panels_per_segment` equal panels and
// each panel carries a `gauss_order`-point Gauss-Legendre rule. Placing
// breakpoints on the kinks of a piecewise-smooth integrand restores the
// spectral convergence of the per-panel rule.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hexabvp {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes ascending; computed once per order by Newton iteration on P_n and
/// cached. Safe to call concurrently.
const GaussLegendre& gauss_legendre(int order);

inline constexpr int kDefaultGaussOrder = 16;
inline constexpr int kDefaultPanelsPerSegment = 4;
inline constexpr int kDefaultPanelCap = 1024;

class CompositeRule {
 public:
  CompositeRule() : CompositeRule({0.0, 1.0}) {}
  explicit CompositeRule(std::vector<double> breakpoints, int gauss_order = kDefaultGaussOrder,
                         int panels_per_segment = kDefaultPanelsPerSegment);

  /// Rule on [0,1] with breakpoints at every seam inside (0,1). Seams outside
  /// the open interval are ignored and near-duplicates (closer than 1e-14)
  /// are merged.
  static CompositeRule with_seams(std::span<const double> seams, int gauss_order = kDefaultGaussOrder,
                                  int panels_per_segment = kDefaultPanelsPerSegment);

  std::span<const double> breakpoints() const { return breakpoints_; }
  int gauss_order() const { return gauss_order_; }
  int panels_per_segment() const { return panels_per_segment_; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// Same breakpoints with twice the panels per segment.
  CompositeRule refined() const;

 private:
  std::vector<double> breakpoints_;
  int gauss_order_;
  int panels_per_segment_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

template <class F>
double integrate(F&& f, const CompositeRule& rule) {
  const auto x = rule.nodes();
  const auto w = rule.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * f(x[i]);
  return sum;
}

/// (integral of |f|^p)^(1/p), p > 1.
template <class F>
double lp_norm(F&& f, double p, const CompositeRule& rule) {
  if (!(p > 1.0)) throw std::invalid_argument("lp_norm requires p > 1");
  const double total = integrate([&](double s) { return std::pow(std::fabs(f(s)), p); }, rule);
  return std::pow(total, 1.0 / p);
}

struct RefineResult {
  double value = 0.0;
  double achieved = 0.0;  // last |difference| between successive refinements
  bool converged = false;
  int panels_per_segment = 0;
};

/// Doubles panels per segment until two successive values differ by less
/// than `tol`, or the per-segment panel count would exceed `panel_cap`.
/// With `p` set the quantity refined is lp_norm(f, *p), otherwise the plain
/// integral. Non-convergence is reported through `converged == false`.
template <class F>
RefineResult refine_until(F&& f, std::optional<double> p, const CompositeRule& rule, double tol,
                          int panel_cap = kDefaultPanelCap) {
  if (!(tol > 0.0)) throw std::invalid_argument("refine_until requires tol > 0");
  auto measure = [&](const CompositeRule& r) { return p ? lp_norm(f, *p, r) : integrate(f, r); };

  CompositeRule current = rule;
  RefineResult result;
  result.value = measure(current);
  result.achieved = std::numeric_limits<double>::infinity();
  result.panels_per_segment = current.panels_per_segment();
  while (current.panels_per_segment() * 2 <= panel_cap) {
    current = current.refined();
    const double next = measure(current);
    result.achieved = std::fabs(next - result.value);
    result.value = next;
    result.panels_per_segment = current.panels_per_segment();
    if (result.achieved < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace hexabvp

#include "hexabvp/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace hexabvp {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's initial guess for the i-th largest root
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) <= 1e-16) break;
    }
    // recompute the derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(order));
  return *slot;
}

CompositeRule::CompositeRule(std::vector<double> breakpoints, int gauss_order, int panels_per_segment)
    : breakpoints_(std::move(breakpoints)),
      gauss_order_(gauss_order),
      panels_per_segment_(panels_per_segment) {
  if (gauss_order_ < 2) throw std::invalid_argument("gauss_order must be at least 2");
  if (panels_per_segment_ < 1) throw std::invalid_argument("panels_per_segment must be at least 1");
  if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
    throw std::invalid_argument("breakpoints must start at 0 and end at 1");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i] > breakpoints_[i - 1]))
      throw std::invalid_argument("breakpoints must be strictly increasing");

  const GaussLegendre& gl = gauss_legendre(gauss_order_);
  const std::size_t total = (breakpoints_.size() - 1) * panels_per_segment_ * gauss_order_;
  nodes_.reserve(total);
  weights_.reserve(total);
  for (std::size_t seg = 0; seg + 1 < breakpoints_.size(); ++seg) {
    const double a = breakpoints_[seg];
    const double b = breakpoints_[seg + 1];
    const double h = (b - a) / panels_per_segment_;
    for (int p = 0; p < panels_per_segment_; ++p) {
      const double lo = a + p * h;
      const double hi = p + 1 == panels_per_segment_ ? b : a + (p + 1) * h;
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      for (int k = 0; k < gauss_order_; ++k) {
        nodes_.push_back(mid + half * gl.nodes[k]);
        weights_.push_back(half * gl.weights[k]);
      }
    }
  }
}

CompositeRule CompositeRule::with_seams(std::span<const double> seams, int gauss_order,
                                        int panels_per_segment) {
  std::vector<double> points;
  points.reserve(seams.size() + 2);
  for (double s : seams)
    if (s > 0.0 && s < 1.0) points.push_back(s);
  std::sort(points.begin(), points.end());

  constexpr double kMerge = 1e-14;
  std::vector<double> breakpoints{0.0};
  for (double s : points)
    if (s - breakpoints.back() > kMerge) breakpoints.push_back(s);
  if (1.0 - breakpoints.back() <= kMerge && breakpoints.size() > 1) breakpoints.pop_back();
  breakpoints.push_back(1.0);
  return CompositeRule(std::move(breakpoints), gauss_order, panels_per_segment);
}

CompositeRule CompositeRule::refined() const {
  return CompositeRule(breakpoints_, gauss_order_, panels_per_segment_ * 2);
}

}  // namespace hexabvp

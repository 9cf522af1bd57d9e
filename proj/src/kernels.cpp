#include "hexabvp/kernels.hpp"

namespace hexabvp {

namespace {

constexpr double kInv24 = 1.0 / 24.0;
constexpr double kInv120 = 1.0 / 120.0;
constexpr double kInv720 = 1.0 / 720.0;

inline double cube(double x) { return x * x * x; }

inline Branch branch_of(KernelPoint pt) { return pt.s <= pt.t ? Branch::SAtOrBelowT : Branch::SAboveT; }

}  // namespace

double green_G_branch(Branch branch, double t, double s) {
  const double t2 = t * t;
  const double lead = t2 * t2 * t * cube(1.0 - s);
  if (branch == Branch::SAtOrBelowT) {
    const double d = t - s;
    const double d2 = d * d;
    return kInv120 * (lead - d2 * d2 * d);
  }
  return kInv120 * lead;
}

double green_K_branch(Branch branch, double t, double s) {
  const double t3 = t * t * t;
  const double lead = t3 * t3 * cube(1.0 - s);
  if (branch == Branch::SAtOrBelowT) {
    const double d3 = cube(t - s);
    return kInv720 * (lead - d3 * d3);
  }
  return kInv720 * lead;
}

double green_H_branch(Branch branch, double t, double s) {
  const double t2 = t * t;
  const double lead = t2 * t2 * cube(1.0 - s);
  if (branch == Branch::SAtOrBelowT) {
    const double d = t - s;
    const double d2 = d * d;
    return kInv24 * (lead - d2 * d2);
  }
  return kInv24 * lead;
}

double green_G(KernelPoint pt) { return green_G_branch(branch_of(pt), pt.t, pt.s); }
double green_K(KernelPoint pt) { return green_K_branch(branch_of(pt), pt.t, pt.s); }
double green_H(KernelPoint pt) { return green_H_branch(branch_of(pt), pt.t, pt.s); }

double integral_G_over_t(double a, double b, double s) {
  if (a > b) throw std::invalid_argument("integral_G_over_t: lower limit exceeds upper limit");
  return green_K({b, s}) - green_K({a, s});
}

}  // namespace hexabvp

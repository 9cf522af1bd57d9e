#pragma once

// Green's kernels of u^(6) + h = 0 under
//   u'(0) = u''(0) = u'''(0) = u''''(0) = u''(1) = 0
// on J = [0,1]. All three are piecewise polynomials with a seam on t = s;
// the tie t == s is evaluated on the s <= t branch.

#include <stdexcept>

namespace hexabvp {

/// A point (t, s) of the unit square.
struct KernelPoint {
  double t;
  double s;

  constexpr KernelPoint(double t_, double s_) : t(t_), s(s_) {
    if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0))
      throw std::domain_error("kernel point outside [0,1]^2");
  }
};

/// Which piece of a kernel to evaluate, regardless of where (t, s) lies.
enum class Branch { SAtOrBelowT, SAboveT };

double green_G_branch(Branch branch, double t, double s);
double green_K_branch(Branch branch, double t, double s);
double green_H_branch(Branch branch, double t, double s);

/// G(t,s) = (t^5 (1-s)^3 - (t-s)^5) / 5!   for s <= t
///        =  t^5 (1-s)^3 / 5!              for t <  s
double green_G(KernelPoint pt);

/// K(t,s), the antiderivative of G in t with K(0,s) = 0; denominators 6!.
double green_K(KernelPoint pt);

/// H(t,s) = dG/dt; denominators 4!.
double green_H(KernelPoint pt);

/// Integral of G(tau, s) over tau in [a, b], i.e. K(b,s) - K(a,s).
double integral_G_over_t(double a, double b, double s);

/// Integral of G(1, s) over s in [0,1]; exactly 1/1440.
constexpr double integral_G_row_one() { return 1.0 / 1440.0; }

}  // namespace hexabvp

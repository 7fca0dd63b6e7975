#pragma once

#include <stdexcept>

namespace vgfit {

/// Strictly positive, finite real. Used for shape/scale parameters and the
/// arguments of the special functions below.
class RealPos {
 public:
  explicit RealPos(double value);
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

namespace special {

/// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

/// psi(x) = d/dx ln Gamma(x) for x > 0.
double digamma(double x);

/// ln K_nu(x), the log of the modified Bessel function of the second kind.
/// Only |nu| matters. Stays finite where K_nu itself would overflow (x -> 0,
/// large nu) or underflow (large x).
double log_bessel_k(double nu, double x);

/// ln Gamma(a + 1/2) - ln Gamma(a) - ln(a)/2, accurate for large a where the
/// direct difference cancels.
double log_gamma_half_ratio_excess(double a);

/// Derivative of log_gamma_half_ratio_excess with respect to a.
double log_gamma_half_ratio_excess_prime(double a);

// Per-order state for repeated evaluation of K_nu at many arguments with the
// same order (the likelihood loop). Precomputes the nu-only parts of Temme's
// series.
class BesselKOrder {
 public:
  explicit BesselKOrder(double nu);
  double nu() const { return nu_; }
  double log_k(double x) const;

 private:
  double nu_;
  double mu_;
  int shift_;
  double gam1_;
  double gam2_;
  double gampl_;
  double gammi_;
  double pimu_fact_;
};

}  // namespace special
}  // namespace vgfit

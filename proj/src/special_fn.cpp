#include "vgfit/special_fn.hpp"

#include <array>
#include <cmath>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <numbers>
#include <string>

namespace vgfit {

RealPos::RealPos(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw std::domain_error("expected a finite positive value, got " + std::to_string(value));
  }
}

namespace special {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;

// Stirling remainder R(z) = ln Gamma(z) - (z - 1/2) ln z + z - ln(2 pi)/2, z >= 8.
double stirling_remainder(double z) {
  const double r = 1.0 / z;
  const double r2 = r * r;
  return r * (1.0 / 12 + r2 * (-1.0 / 360 + r2 * (1.0 / 1260 + r2 * (-1.0 / 1680 + r2 * (1.0 / 1188 + r2 * (-691.0 / 360360 + r2 * (1.0 / 156)))))));
}

double stirling_remainder_prime(double z) {
  const double r = 1.0 / z;
  const double r2 = r * r;
  return r2 * (-1.0 / 12 + r2 * (3.0 / 360 + r2 * (-5.0 / 1260 + r2 * (7.0 / 1680 + r2 * (-9.0 / 1188 + r2 * (11.0 * 691.0 / 360360 + r2 * (-13.0 / 156)))))));
}

constexpr double kStirlingCutoff = 8.0;
constexpr double kDebyeOrder = 50.0;

void require_positive(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error(std::string(what) + ": argument must be finite and > 0, got " + std::to_string(x));
  }
}

// Taylor coefficients of 1/Gamma(1 + z) around z = 0.
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// Even and odd parts of 1/Gamma(1 + mu): gam2 = even part, gam1 = -(odd part)/mu.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  const double mu2 = mu * mu;
  double even = 0.0;
  double odd = 0.0;
  for (std::size_t j = kRecipGamma.size(); j-- > 0;) {
    if (j % 2 == 0) {
      even = even * mu2 + kRecipGamma[j];
    } else {
      odd = odd * mu2 + kRecipGamma[j];
    }
  }
  gam1 = -odd;
  gam2 = even;
  gampl = even + mu * odd;
  gammi = even - mu * odd;
}

// Uniform asymptotic expansion in the order, terms through u_6.
double log_k_debye(double nu, double x) {
  const double z = x / nu;
  const double t = std::sqrt(1.0 + z * z);
  const double p = 1.0 / t;
  const double eta = t + std::log(z / (1.0 + t));
  const double p2 = p * p;
  auto poly = [p2](std::initializer_list<double> c) {
    double acc = 0.0;
    for (auto it = std::rbegin(c); it != std::rend(c); ++it) acc = acc * p2 + *it;
    return acc;
  };
  const double u1 = p * poly({3.0, -5.0}) / 24.0;
  const double u2 = p2 * poly({81.0, -462.0, 385.0}) / 1152.0;
  const double u3 = p2 * p * poly({30375.0, -369603.0, 765765.0, -425425.0}) / 414720.0;
  const double u4 = p2 * p2 * poly({4465125.0, -94121676.0, 349922430.0, -446185740.0, 185910725.0}) / 39813120.0;
  const double u5 = p2 * p2 * p *
                    poly({1519035525.0, -49286948607.0, 284499769554.0, -614135872350.0, 566098157625.0,
                          -188699385875.0}) /
                    6688604160.0;
  const double u6 = p2 * p2 * p2 *
                    poly({2757049477875.0, -127577298354750.0, 1050760774457901.0, -3369032068261860.0,
                          5104696716244125.0, -3685299006138750.0, 1023694168371875.0}) /
                    4815794995200.0;
  const double r = 1.0 / nu;
  const double series = 1.0 + r * (-u1 + r * (u2 + r * (-u3 + r * (u4 + r * (-u5 + r * u6)))));
  return 0.5 * std::log(std::numbers::pi / (2.0 * nu)) - nu * eta - 0.25 * std::log1p(z * z) + std::log(series);
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x >= kStirlingCutoff) {
    return (x - 0.5) * std::log(x) - x + kHalfLogTwoPi + stirling_remainder(x);
  }
  // Shift up into the Stirling range; the product stays well inside double range.
  double prod = 1.0;
  double z = x;
  while (z < kStirlingCutoff) {
    prod *= z;
    z += 1.0;
  }
  return (z - 0.5) * std::log(z) - z + kHalfLogTwoPi + stirling_remainder(z) - std::log(prod);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < 6.0) {
    shift += 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / x;
  const double r2 = r * r;
  const double series =
      r2 * (1.0 / 12 - r2 * (1.0 / 120 - r2 * (1.0 / 252 - r2 * (1.0 / 240 - r2 * (1.0 / 132 - r2 * (691.0 / 32760 - r2 * (1.0 / 12 - r2 * 3617.0 / 8160)))))));
  return std::log(x) - 0.5 * r - series - shift;
}

double log_gamma_half_ratio_excess(double a) {
  require_positive(a, "log_gamma_half_ratio_excess");
  if (a < kStirlingCutoff) {
    return log_gamma(a + 0.5) - log_gamma(a) - 0.5 * std::log(a);
  }
  // a ln(1 + x) - 1/2 with x = 1/(2a), expanded to avoid cancellation.
  const double x = 0.5 / a;
  double term = 0.0;
  for (int k = 16; k >= 2; --k) {
    term = term * x + ((k % 2 == 0) ? -1.0 : 1.0) / (2.0 * k);
  }
  return term * x + stirling_remainder(a + 0.5) - stirling_remainder(a);
}

double log_gamma_half_ratio_excess_prime(double a) {
  require_positive(a, "log_gamma_half_ratio_excess_prime");
  if (a < kStirlingCutoff) {
    return digamma(a + 0.5) - digamma(a) - 0.5 / a;
  }
  // d/da [a ln(1 + x) - 1/2] = ln(1 + x) - x/(1 + x) = sum_{k>=2} (-1)^k (k-1)/k x^k.
  const double x = 0.5 / a;
  double term = 0.0;
  for (int k = 18; k >= 2; --k) {
    term = term * x + ((k % 2 == 0) ? 1.0 : -1.0) * (k - 1.0) / k;
  }
  return term * x * x + stirling_remainder_prime(a + 0.5) - stirling_remainder_prime(a);
}

BesselKOrder::BesselKOrder(double nu) : nu_(std::fabs(nu)) {
  if (!std::isfinite(nu)) {
    throw std::domain_error("log_bessel_k: order must be finite");
  }
  shift_ = static_cast<int>(nu_ + 0.5);
  mu_ = nu_ - shift_;
  temme_gammas(mu_, gam1_, gam2_, gampl_, gammi_);
  const double pimu = std::numbers::pi * mu_;
  pimu_fact_ = std::fabs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
}

double BesselKOrder::log_k(double x) const {
  require_positive(x, "log_bessel_k");
  if (nu_ >= kDebyeOrder) return log_k_debye(nu_, x);
  constexpr int kMaxIter = 100000;
  const double mu = mu_;
  double log_kmu = 0.0;
  double ratio = 0.0;  // K_{mu+1}(x) / K_mu(x)

  if (x < 2.0) {
    // Temme's series.
    const double x2 = 0.5 * x;
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::fabs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double ff = pimu_fact_ * (gam1_ * std::cosh(e) + gam2_ * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl_;
    double q = 0.5 / (e * gammi_);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
      const double di = i;
      ff = (di * ff + p + q) / (di * di - mu * mu);
      c *= d / di;
      p /= (di - mu);
      q /= (di + mu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - di * ff);
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    log_kmu = std::log(sum);
    ratio = sum1 * (2.0 / x) / sum;
  } else {
    // Steed's continued fraction CF2.
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu * mu;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= kMaxIter; ++i) {
      a -= 2.0 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::fabs(dels / s) < kEps) break;
    }
    h *= a1;
    log_kmu = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x - std::log(s);
    ratio = (mu + x + 0.5 - h) / x;
  }

  // Upward recurrence on ratios (all >= 1); the product is folded into the
  // log before it can overflow.
  double log_k = log_kmu;
  double prod = 1.0;
  for (int i = 1; i <= shift_; ++i) {
    prod *= ratio;
    if (prod > 1e250) {
      log_k += std::log(prod);
      prod = 1.0;
    }
    ratio = 2.0 * (mu + i) / x + 1.0 / ratio;
  }
  return log_k + std::log(prod);
}

double log_bessel_k(double nu, double x) {
  require_positive(x, "log_bessel_k");
  return BesselKOrder(nu).log_k(x);
}

}  // namespace special
}  // namespace vgfit

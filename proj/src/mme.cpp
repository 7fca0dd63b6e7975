#include "vgfit/mme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vgfit {

namespace {

constexpr double kEllLowerCap = 1e-300;

}  // namespace

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::domain_error("sample needs at least 2 observations");
  for (double x : values_) {
    if (!std::isfinite(x)) throw std::domain_error("sample contains a non-finite value");
  }
}

MomentSummary summarize(std::span<const double> xs, std::optional<double> known_m) {
  if (xs.size() < 2) throw std::domain_error("summarize: need at least 2 observations");
  MomentSummary ms;
  ms.n = xs.size();
  const double inv_n = 1.0 / static_cast<double>(xs.size());

  double sum = 0.0;
  for (double x : xs) sum += x;
  ms.mean = sum * inv_n;

  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - ms.mean;
    const double d2 = d * d;
    s1 += std::fabs(d);
    s2 += d2;
    s4 += d2 * d2;
  }
  ms.a_hat_abs = s1 * inv_n;
  ms.v_hat = s2 * inv_n;
  ms.k_hat = s4 * inv_n;

  if (known_m) {
    ms.known_m = known_m;
    double p1 = 0.0, p2 = 0.0, p4 = 0.0;
    for (double x : xs) {
      const double d = x - *known_m;
      const double d2 = d * d;
      p1 += std::fabs(d);
      p2 += d2;
      p4 += d2 * d2;
    }
    ms.a_prime_abs = p1 * inv_n;
    ms.v_prime = p2 * inv_n;
    ms.k_prime = p4 * inv_n;
  }
  return ms;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ClassicMme:
      return "classic-mme";
    case Method::ModifiedMme:
      return "modified-mme";
    case Method::Mle:
      return "mle";
  }
  return "unknown";
}

double L_infinity() { return 0.5 * std::log(std::numbers::pi / 2.0); }

double L(double a) {
  if (!std::isfinite(a) || a <= 0.0) throw std::domain_error("L: a must be finite and > 0");
  return L_infinity() - special::log_gamma_half_ratio_excess(a);
}

double L_prime(double a) {
  if (!std::isfinite(a) || a <= 0.0) throw std::domain_error("L_prime: a must be finite and > 0");
  return -special::log_gamma_half_ratio_excess_prime(a);
}

EllResult ell_checked(double u) {
  EllResult res;
  if (!(u > L_infinity() + kEllBoundaryTol)) {
    res.status = EllStatus::Infeasible;
    return res;
  }
  // Bracket the root: L(lo) > u > L(hi).
  double lo = 1.0, hi = 1.0;
  if (L(1.0) > u) {
    while (L(hi) > u) {
      lo = hi;
      hi *= 2.0;
      if (hi > kEllUpperCap) {
        res.status = EllStatus::Boundary;
        res.value = kEllUpperCap;
        return res;
      }
    }
  } else {
    while (L(lo) <= u) {
      hi = lo;
      lo *= 0.5;
      if (lo < kEllLowerCap) {
        res.status = EllStatus::Boundary;
        res.value = kEllLowerCap;
        return res;
      }
    }
  }

  // Safeguarded Newton: fall back to bisection whenever a step leaves the bracket.
  const double tol = 1e-12 * std::max(1.0, std::fabs(u));
  double a = 0.5 * (lo + hi);
  for (int it = 1; it <= 500; ++it) {
    res.iterations = it;
    const double f = L(a) - u;
    if (std::fabs(f) < tol) break;
    if (f > 0.0) {
      lo = a;
    } else {
      hi = a;
    }
    double next = a - f / L_prime(a);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      a = next;
      break;
    }
    a = next;
  }
  res.value = a;
  return res;
}

double ell(double u) {
  const EllResult r = ell_checked(u);
  switch (r.status) {
    case EllStatus::Ok:
      return r.value;
    case EllStatus::Infeasible:
      throw EllError(r.status, r.value, "ell: argument at or below the normal-limit boundary ln(pi/2)/2");
    case EllStatus::Boundary:
      throw EllError(r.status, r.value, "ell: root lies beyond the bracket cap");
  }
  return r.value;
}

bool feasibility_classic(const MomentSummary& ms) {
  const double v = ms.V();
  return v > 0.0 && ms.K() > 3.0 * v * v;
}

bool feasibility_modified(const MomentSummary& ms) {
  const double v = ms.V();
  const double a = ms.A();
  if (!(v > 0.0 && a > 0.0)) return false;
  return 0.5 * std::log(v) - std::log(a) > L_infinity();
}

FitResult classic_mme(const MomentSummary& ms) {
  FitResult fr;
  fr.method = Method::ClassicMme;
  const double v = ms.V();
  const double k = ms.K();
  fr.diagnostics["V"] = v;
  fr.diagnostics["K"] = k;
  if (!feasibility_classic(ms)) {
    fr.message = "K_hat <= 3*V_hat^2";
    return fr;
  }
  const double excess = k - 3.0 * v * v;
  const double a = 3.0 * v * v / excess;
  const double b = k / (3.0 * v) - v;
  if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
    fr.message = "K_hat <= 3*V_hat^2";
    return fr;
  }
  fr.params = Params(a, b, ms.location());
  fr.feasible = true;
  return fr;
}

FitResult modified_mme(const MomentSummary& ms) {
  FitResult fr;
  fr.method = Method::ModifiedMme;
  const double v = ms.V();
  const double abs_moment = ms.A();
  fr.diagnostics["V"] = v;
  fr.diagnostics["A"] = abs_moment;
  if (!feasibility_modified(ms)) {
    fr.message = "L-boundary: 0.5*ln(V_hat) - ln(A_hat) <= 0.5*ln(pi/2)";
    return fr;
  }
  const double u = 0.5 * std::log(v) - std::log(abs_moment);
  fr.diagnostics["L_target"] = u;
  const EllResult r = ell_checked(u);
  fr.diagnostics["ell_iterations"] = r.iterations;
  double a = r.value;
  if (r.status != EllStatus::Ok) {
    // Inside the feasible region but too close to the boundary for the
    // bracket: keep the capped estimate and flag it.
    a = (r.status == EllStatus::Infeasible) ? kEllUpperCap : r.value;
    fr.diagnostics["ell_cap_hit"] = 1.0;
    fr.message = "ell bracket cap reached";
  }
  fr.params = Params(a, v / a, ms.location());
  fr.feasible = true;
  return fr;
}

}  // namespace vgfit

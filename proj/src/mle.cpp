#include "vgfit/mle.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "nelder_mead.hpp"

namespace vgfit {

namespace {

constexpr double kMinDistance = 1e-12;
// MME starting points beyond this shape are treated as unusable.
constexpr double kMaxInitShape = 1e4;

}  // namespace

double neg_log_likelihood(const Params& p, std::span<const double> xs) {
  const double nu = p.a - 0.5;
  const special::BesselKOrder order(nu);
  const double arg_scale = std::sqrt(2.0 / p.b);
  const double inv_pow_scale = 1.0 / std::sqrt(2.0 * p.b);
  double acc = 0.0;
  for (double x : xs) {
    const double r = std::max(std::fabs(x - p.m), kMinDistance);
    acc += nu * std::log(r * inv_pow_scale) + order.log_k(r * arg_scale);
  }
  const double n = static_cast<double>(xs.size());
  const double constant = -0.5 * std::log(std::numbers::pi * p.b / 2.0) - special::log_gamma(p.a);
  return -(n * constant + acc);
}

Params clamp_proposal(double a, double b, double m, const MleConfig& cfg, bool* clamped) {
  bool hit = false;
  if (!(a > 0.0)) {
    a = cfg.clamp_param;
    hit = true;
  }
  if (!(b > 0.0)) {
    b = cfg.clamp_param;
    hit = true;
  }
  // Floors on the (sigma, nu) parameterisation: sigma = sqrt(a b), nu = 1/a.
  double sigma = std::sqrt(a * b);
  double nu = 1.0 / a;
  bool floored = false;
  if (sigma < cfg.clamp_sigma_nu) {
    sigma = cfg.clamp_sigma_nu;
    floored = true;
  }
  if (nu < cfg.clamp_sigma_nu) {
    nu = cfg.clamp_sigma_nu;
    floored = true;
  }
  if (floored) {
    a = 1.0 / nu;
    b = sigma * sigma / a;
    hit = true;
  }
  if (clamped) *clamped = hit;
  return Params(a, b, m);
}

FitResult fit_mle(std::span<const double> xs, const MleConfig& cfg, std::optional<double> known_m) {
  FitResult fr;
  fr.method = Method::Mle;
  const MomentSummary ms = summarize(xs, known_m);
  if (!(ms.V() > 0.0)) {
    fr.message = "degenerate sample (zero spread)";
    return fr;
  }

  Params init(1.0, ms.V(), ms.location());
  if (cfg.init) {
    init = *cfg.init;
  } else {
    for (const FitResult& start : {modified_mme(ms), classic_mme(ms)}) {
      if (start.feasible && start.params->a < kMaxInitShape) {
        init = *start.params;
        break;
      }
    }
  }
  if (known_m) init.m = *known_m;

  const bool fit_m = !known_m.has_value();
  const bool logp = cfg.log_parameterized;
  auto to_params = [&](const std::vector<double>& x, bool* clamped) {
    const double a = logp ? std::exp(x[0]) : x[0];
    const double b = logp ? std::exp(x[1]) : x[1];
    const double m = fit_m ? x[2] : *known_m;
    return clamp_proposal(a, b, m, cfg, clamped);
  };
  auto objective = [&](const std::vector<double>& x) { return neg_log_likelihood(to_params(x, nullptr), xs); };

  std::vector<double> x0 = {logp ? std::log(init.a) : init.a, logp ? std::log(init.b) : init.b};
  std::vector<double> steps = {logp ? cfg.initial_step : cfg.initial_step * init.a,
                               logp ? cfg.initial_step : cfg.initial_step * init.b};
  if (fit_m) {
    x0.push_back(init.m);
    steps.push_back(cfg.initial_step * std::sqrt(init.a * init.b));
  }

  detail::NelderMeadOptions opt;
  opt.max_iter = cfg.max_iter;
  opt.tol_value = cfg.tol_value;
  opt.tol_diameter = cfg.tol_diameter;
  const detail::NelderMeadResult nm = detail::nelder_mead(objective, x0, steps, opt);

  bool clamped = false;
  fr.params = to_params(nm.x, &clamped);
  fr.diagnostics["iterations"] = nm.iterations;
  fr.diagnostics["evaluations"] = nm.evaluations;
  fr.diagnostics["simplex_diameter"] = nm.diameter;
  fr.diagnostics["value_spread"] = nm.value_spread;
  fr.diagnostics["neg_log_likelihood"] = nm.value;
  fr.diagnostics["clamped"] = clamped ? 1.0 : 0.0;
  if (!nm.converged) {
    fr.message = "Nelder-Mead did not converge within max_iter";
  } else if (clamped) {
    fr.message = "minimiser sits on a parameter clamp";
  } else {
    fr.feasible = true;
  }
  return fr;
}

}  // namespace vgfit

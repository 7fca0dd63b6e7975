#pragma once

#include <optional>
#include <span>

#include "vgfit/gen_laplace.hpp"
#include "vgfit/mme.hpp"

namespace vgfit {

struct MleConfig {
  // Proposals with a <= 0 or b <= 0 are replaced by this value.
  double clamp_param = 1e-5;
  // Floor for sigma = sqrt(a b) and nu = 1/a.
  double clamp_sigma_nu = 1e-4;
  int max_iter = 5000;
  double tol_value = 1e-10;
  double tol_diameter = 1e-8;
  // Relative size of the initial simplex.
  double initial_step = 0.1;
  std::optional<Params> init;
  // Search over (ln a, ln b, m) instead of (a, b, m).
  bool log_parameterized = false;
};

/// -sum log p(x_i). |x - m| is floored at 1e-12 so the value stays finite
/// for a <= 1/2.
double neg_log_likelihood(const Params& p, std::span<const double> xs);

/// The parameters the likelihood is actually evaluated at after the
/// clamping rules in `cfg` are applied to a raw proposal.
Params clamp_proposal(double a, double b, double m, const MleConfig& cfg, bool* clamped = nullptr);

/// Nelder-Mead maximum likelihood. With known_m the search is over (a, b)
/// only. Non-convergence, a degenerate sample or a minimiser sitting on a
/// clamp gives feasible = false with the best point attached.
FitResult fit_mle(std::span<const double> xs, const MleConfig& cfg = {},
                  std::optional<double> known_m = std::nullopt);
inline FitResult fit_mle(const Sample& s, const MleConfig& cfg = {}, std::optional<double> known_m = std::nullopt) {
  return fit_mle(s.values(), cfg, known_m);
}

}  // namespace vgfit

#include "vgfit/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "vgfit/gen_laplace.hpp"
#include "vgfit/mme.hpp"

namespace vgfit {

namespace {

using Mat2 = std::array<std::array<double, 2>, 2>;

void require_params(double a, double b) {
  if (!(a > 0.0 && std::isfinite(a))) throw std::domain_error("shape a must be finite and > 0");
  if (!(b > 0.0 && std::isfinite(b))) throw std::domain_error("scale b must be finite and > 0");
}

Cov2 sandwich(const Mat2& j, const Mat2& c) {
  Mat2 jc{};
  for (int r = 0; r < 2; ++r) {
    for (int k = 0; k < 2; ++k) jc[r][k] = j[r][0] * c[0][k] + j[r][1] * c[1][k];
  }
  auto entry = [&](int r, int s) { return jc[r][0] * j[s][0] + jc[r][1] * j[s][1]; };
  return Cov2{entry(0, 0), 0.5 * (entry(0, 1) + entry(1, 0)), entry(1, 1)};
}

}  // namespace

double Cov2::correlation() const { return ab / std::sqrt(aa * bb); }

Cov2 classic_cov(double a, double b) {
  require_params(a, b);
  const double a2 = a * a;
  const double b2 = b * b;
  Cov2 s;
  s.aa = 2.0 * (4.0 * a2 * a2 + 36.0 * a2 * a + 95.0 * a2 + 63.0 * a) / 3.0;
  s.ab = -2.0 * (4.0 * a2 * a + 36.0 * a2 + 101.0 * a + 69.0) * b / 3.0;
  s.bb = (8.0 * a2 + 72.0 * a + 220.0 + 159.0 / a) * b2 / 3.0;
  return s;
}

Mat2 classic_moment_cov(double a, double b) {
  require_params(a, b);
  const PopulationMoments pm = population_moments(Params(a, b));
  const double v = pm.V, k = pm.K;
  return Mat2{{{k - v * v, pm.M6 - v * k}, {pm.M6 - v * k, pm.M8 - k * k}}};
}

Mat2 classic_jacobian(double a, double b) {
  require_params(a, b);
  const double v = a * b;
  const double k = 3.0 * a * (a + 1.0) * b * b;
  const double excess = k - 3.0 * v * v;
  const double e2 = excess * excess;
  return Mat2{{{6.0 * k * v / e2, -3.0 * v * v / e2}, {-k / (3.0 * v * v) - 1.0, 1.0 / (3.0 * v)}}};
}

Cov2 classic_cov_delta(double a, double b) { return sandwich(classic_jacobian(a, b), classic_moment_cov(a, b)); }

Mat2 modified_jacobian(double a, double b) {
  require_params(a, b);
  const PopulationMoments pm = population_moments(Params(a, b));
  // a = ell(u), u = ln(y)/2 - ln(x) at (x, y) = (A, V); ell'(u) = 1 / L'(a).
  const double dell = 1.0 / L_prime(a);
  const double da_dx = dell * (-1.0 / pm.A);
  const double da_dy = dell * (0.5 / pm.V);
  // b = y / a.
  const double db_dx = -pm.V / (a * a) * da_dx;
  const double db_dy = 1.0 / a - pm.V / (a * a) * da_dy;
  return Mat2{{{da_dx, da_dy}, {db_dx, db_dy}}};
}

Cov2 modified_cov(double a, double b, CovMode mode) {
  const PopulationMoments pm = population_moments(Params(a, b));
  Mat2 c{};
  if (mode == CovMode::Paper) {
    c = Mat2{{{pm.V, pm.T}, {pm.T, pm.K}}};
  } else {
    const double cross = pm.T - pm.A * pm.V;
    c = Mat2{{{pm.V - pm.A * pm.A, cross}, {cross, pm.K - pm.V * pm.V}}};
  }
  return sandwich(modified_jacobian(a, b), c);
}

Cov3 full_cov(double a, double b, Estimator est, CovMode mode) {
  const Cov2 s = (est == Estimator::Classic) ? classic_cov(a, b) : modified_cov(a, b, mode);
  Cov3 out;
  out.m[0][0] = a * b;
  out.m[1][1] = s.aa;
  out.m[1][2] = out.m[2][1] = s.ab;
  out.m[2][2] = s.bb;
  return out;
}

}  // namespace vgfit

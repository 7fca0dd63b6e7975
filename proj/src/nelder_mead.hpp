#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace vgfit::detail {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double tol_value = 1e-10;
  double tol_diameter = 1e-8;
  int max_iter = 5000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double value_spread = 0.0;
  double diameter = 0.0;
  bool converged = false;
};

// Derivative-free simplex minimisation. `steps[i]` is the offset of the i-th
// initial vertex along coordinate i.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const std::vector<double>& steps,
                             const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += steps[i];
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto combine = [&](std::vector<double>& out, double t, const std::vector<double>& toward) {
    // out = centroid + t * (toward - centroid)
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (toward[j] - centroid[j]);
  };

  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return fv[i] < fv[j]; });
    {
      std::vector<std::vector<double>> p2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        p2[i] = std::move(pts[order[i]]);
        f2[i] = fv[order[i]];
      }
      pts = std::move(p2);
      fv = std::move(f2);
    }

    res.value_spread = fv[n] - fv[0];
    res.diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) res.diameter = std::max(res.diameter, std::fabs(pts[i][j] - pts[0][j]));
    }
    if (res.value_spread <= opt.tol_value && res.diameter <= opt.tol_diameter) {
      res.converged = true;
      break;
    }
    if (res.iterations >= opt.max_iter) break;
    ++res.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    combine(xr, -opt.reflection, pts[n]);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      combine(xe, -opt.reflection * opt.expansion, pts[n]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < fv[n]) {
      combine(xc, opt.reflection * opt.contraction * -1.0, pts[n]);
      const double fc = eval(xc);
      if (fc <= fr) {
        pts[n] = xc;
        fv[n] = fc;
        accepted = true;
      }
    } else {
      combine(xc, opt.contraction, pts[n]);
      const double fc = eval(xc);
      if (fc < fv[n]) {
        pts[n] = xc;
        fv[n] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[0][j] + opt.shrink * (pts[i][j] - pts[0][j]);
        fv[i] = eval(pts[i]);
      }
    }
  }
  res.x = pts[0];
  res.value = fv[0];
  return res;
}

}  // namespace vgfit::detail

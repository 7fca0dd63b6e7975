#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vgfit/mle.hpp"

using namespace vgfit;

TEST_CASE("neg_log_likelihood Laplace closed form") {
  const std::vector<double> xs{0.5, -0.5};
  const double want = -2.0 * (std::log(std::numbers::sqrt2 / 2) - std::numbers::sqrt2 / 2);
  CHECK(std::fabs(neg_log_likelihood(Params(1.0, 1.0), xs) - want) < 1e-12);
  CHECK(want == doctest::Approx(2.10737).epsilon(1e-5));
}

TEST_CASE("neg_log_likelihood matches the sum of log_pdf") {
  const auto xs = sample(Params(0.4, 2.0, 1.0), 300, 4);
  for (const Params& p : {Params(0.4, 2.0, 1.0), Params(3.0, 0.2, 0.9), Params(0.05, 10.0, 1.2)}) {
    double s = 0.0;
    for (double x : xs) s -= log_pdf(p, x);
    CHECK(neg_log_likelihood(p, xs) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("neg_log_likelihood permutation invariance and outliers") {
  auto xs = sample(Params(1.0, 1.0), 64, 12);
  const Params p(1.2, 0.9, 0.1);
  const double base = neg_log_likelihood(p, xs);
  // Dyadic values make the sum order-independent.
  for (double& x : xs) x = std::round(x * 1024) / 1024;
  const double d0 = neg_log_likelihood(p, xs);
  auto ys = xs;
  std::reverse(ys.begin(), ys.end());
  std::rotate(ys.begin(), ys.begin() + 17, ys.end());
  CHECK(std::fabs(neg_log_likelihood(p, ys) - d0) <= 1e-12 * std::fabs(d0));
  CHECK(std::isfinite(base));

  auto zs = xs;
  zs.push_back(50.0);
  auto ws = xs;
  ws.push_back(100.0);
  CHECK(neg_log_likelihood(p, ws) > neg_log_likelihood(p, zs));
  CHECK(neg_log_likelihood(p, zs) > neg_log_likelihood(p, xs));
}

TEST_CASE("neg_log_likelihood is finite at the location for singular shapes") {
  const std::vector<double> xs{0.0, 0.0, 1.0};
  CHECK(std::isfinite(neg_log_likelihood(Params(0.2, 1.0), xs)));
}

TEST_CASE("clamp_proposal rules") {
  const MleConfig cfg;
  bool hit = false;
  Params p = clamp_proposal(-1.0, 2.0, 0.0, cfg, &hit);
  CHECK(hit);
  // a = 1e-5 gives nu = 1e5, untouched; sigma = sqrt(2e-5) > 1e-4.
  CHECK(p.a == 1e-5);
  CHECK(p.b == 2.0);

  p = clamp_proposal(2.0, 0.0, 0.5, cfg, &hit);
  CHECK(hit);
  // b clamped to 1e-5, sigma = sqrt(2e-5) > 1e-4 stays.
  CHECK(p.b == 1e-5);
  CHECK(p.m == 0.5);

  p = clamp_proposal(1e-6, 1e-6, 0.0, cfg, &hit);
  CHECK(hit);
  CHECK(std::sqrt(p.a * p.b) == doctest::Approx(1e-4).epsilon(1e-12));

  p = clamp_proposal(1e6, 1.0, 0.0, cfg, &hit);
  CHECK(hit);
  CHECK(p.a == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(p.a * p.b == doctest::Approx(1e6).epsilon(1e-12));

  p = clamp_proposal(1.5, 0.7, -2.0, cfg, &hit);
  CHECK(!hit);
  CHECK(p.a == 1.5);
  CHECK(p.b == 0.7);
}

TEST_CASE("fit_mle recovers parameters at large N") {
  const auto xs = sample(Params(1.0, 1.0, 0.0), 100000, 7);
  const FitResult fr = fit_mle(xs, {}, 0.0);
  REQUIRE(fr.feasible);
  CHECK(fr.method == Method::Mle);
  CHECK(std::fabs(fr.params->a - 1.0) < 0.05);
  CHECK(std::fabs(fr.params->b - 1.0) < 0.05);
  CHECK(fr.params->m == 0.0);
  CHECK(fr.diagnostics.count("iterations") == 1);
  CHECK(fr.diagnostics.at("simplex_diameter") <= 1e-8);
}

TEST_CASE("fit_mle with unknown location and in log space") {
  const auto xs = sample(Params(2.0, 0.5, 3.0), 20000, 17);
  const FitResult fr = fit_mle(xs);
  REQUIRE(fr.feasible);
  CHECK(std::fabs(fr.params->a - 2.0) < 0.2);
  CHECK(std::fabs(fr.params->b - 0.5) < 0.05);
  CHECK(std::fabs(fr.params->m - 3.0) < 0.03);

  MleConfig cfg;
  cfg.log_parameterized = true;
  const FitResult lg = fit_mle(xs, cfg);
  REQUIRE(lg.feasible);
  CHECK(std::fabs(lg.params->a - fr.params->a) < 1e-3);
  CHECK(std::fabs(lg.diagnostics.at("neg_log_likelihood") - fr.diagnostics.at("neg_log_likelihood")) < 1e-6);
}

TEST_CASE("fit_mle is a local minimum and deterministic") {
  const auto xs = sample(Params(0.5, 1.0), 1000, 99);
  const FitResult a = fit_mle(xs, {}, 0.0);
  const FitResult b = fit_mle(xs, {}, 0.0);
  REQUIRE(a.feasible);
  CHECK(a.params->a == b.params->a);
  CHECK(a.params->b == b.params->b);
  const double best = neg_log_likelihood(*a.params, xs);
  for (double f : {0.999, 1.001}) {
    CHECK(neg_log_likelihood(Params(a.params->a * f, a.params->b), xs) > best);
    CHECK(neg_log_likelihood(Params(a.params->a, a.params->b * f), xs) > best);
  }
}

TEST_CASE("fit_mle with an explicit starting point") {
  const auto xs = sample(Params(1.0, 2.0), 2000, 5);
  MleConfig cfg;
  cfg.init = Params(3.0, 0.3);
  const FitResult fr = fit_mle(xs, cfg, 0.0);
  REQUIRE(fr.feasible);
  const FitResult def = fit_mle(xs, {}, 0.0);
  CHECK(std::fabs(fr.params->a - def.params->a) < 1e-3);
}

TEST_CASE("fit_mle flags degenerate and non-converged runs") {
  const std::vector<double> flat(20, 1.5);
  const FitResult fr = fit_mle(flat);
  CHECK(!fr.feasible);
  CHECK(!fr.message.empty());

  MleConfig cfg;
  cfg.max_iter = 3;
  const auto xs = sample(Params(1.0, 1.0), 500, 2);
  const FitResult capped = fit_mle(xs, cfg, 0.0);
  CHECK(!capped.feasible);
  REQUIRE(capped.params);
  CHECK(capped.message.find("converge") != std::string::npos);
}

TEST_CASE("true parameters are a local optimum on average") {
  const Params truth(1.0, 1.0, 0.0);
  double up[6] = {};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto xs = sample(truth, 100000, 500 + seed);
    const double base = neg_log_likelihood(truth, xs);
    int j = 0;
    for (double f : {0.9, 1.1}) {
      up[j++] += neg_log_likelihood(Params(f, 1.0, 0.0), xs) - base;
      up[j++] += neg_log_likelihood(Params(1.0, f, 0.0), xs) - base;
      up[j++] += neg_log_likelihood(Params(1.0, 1.0, f - 1.0), xs) - base;
    }
  }
  for (double d : up) CHECK(d > 0.0);
}

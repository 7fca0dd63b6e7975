#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "support/quadrature.hpp"
#include "vgfit/mme.hpp"

using namespace vgfit;

namespace {

MomentSummary from_va(double v, double k, double a_abs) {
  MomentSummary ms;
  ms.n = 1000;
  ms.v_hat = v;
  ms.k_hat = k;
  ms.a_hat_abs = a_abs;
  return ms;
}

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

}  // namespace

TEST_CASE("Sample validation") {
  CHECK_THROWS_AS(Sample({1.0}), std::domain_error);
  CHECK_THROWS_AS(Sample({1.0, std::nan("")}), std::domain_error);
  CHECK(Sample({1.0, 2.0}).size() == 2);
}

TEST_CASE("summarize direct averages") {
  const MomentSummary a = summarize(Sample({-1.0, 1.0}), 0.0);
  CHECK(a.v_prime == 1.0);
  CHECK(a.k_prime == 1.0);
  CHECK(a.a_prime_abs == 1.0);

  const MomentSummary b = summarize(Sample({0.0, 2.0}));
  CHECK(b.mean == 1.0);
  CHECK(b.v_hat == 1.0);
  CHECK(b.a_hat_abs == 1.0);
  CHECK(!b.known_m);
  CHECK(b.V() == 1.0);
  CHECK(b.location() == 1.0);

  const MomentSummary c = summarize(Sample({-2.0, -1.0, 1.0, 2.0}), 0.0);
  CHECK(c.v_prime == 2.5);
  CHECK(c.k_prime == 8.5);
  CHECK(c.V() == 2.5);
  CHECK(c.location() == 0.0);
}

TEST_CASE("summary inequalities") {
  const auto xs = sample(Params(0.7, 2.0, 1.3), 5000, 11);
  const MomentSummary ms = summarize(xs, 0.0);
  CHECK(ms.v_hat <= ms.v_prime);
  CHECK(ms.k_hat >= ms.v_hat * ms.v_hat);
  CHECK(ms.a_hat_abs * ms.a_hat_abs <= ms.v_hat);
  CHECK(ms.a_hat_abs >= 0.0);
}

TEST_CASE("classic_mme examples") {
  auto fr = classic_mme(from_va(1.0, 6.0, 0.0));
  REQUIRE(fr.feasible);
  CHECK(fr.params->a == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fr.params->b == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fr.method == Method::ClassicMme);

  fr = classic_mme(from_va(6.0, 162.0, 0.0));
  REQUIRE(fr.feasible);
  CHECK(fr.params->a == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(fr.params->b == doctest::Approx(3.0).epsilon(1e-15));

  fr = classic_mme(from_va(1.0, 3.0, 0.0));
  CHECK(!fr.feasible);
  CHECK(!fr.params);
  CHECK(fr.message == "K_hat <= 3*V_hat^2");
  CHECK(!classic_mme(from_va(0.0, 0.0, 0.0)).feasible);
}

TEST_CASE("feasibility predicates") {
  CHECK(feasibility_classic(from_va(1.0, 6.0, 0.0)));
  CHECK(!feasibility_classic(from_va(1.0, 2.9, 0.0)));
  CHECK(!feasibility_classic(from_va(1.0, 3.0, 0.0)));
  CHECK(feasibility_modified(from_va(1.0, 0.0, 1.0 / std::numbers::sqrt2)));
  CHECK(!feasibility_modified(from_va(1.0, 0.0, std::sqrt(2.0 / std::numbers::pi))));
  CHECK(!feasibility_modified(from_va(1.0, 0.0, 0.0)));
}

TEST_CASE("L values and limits") {
  CHECK(std::fabs(L(1.0) - std::log(std::numbers::sqrt2)) < 1e-14);
  CHECK(std::fabs(L(1e6) - 0.5 * std::log(std::numbers::pi / 2)) < 1e-6);
  CHECK(L(1e-8) > 8.0);
  CHECK(L_infinity() == 0.5 * std::log(std::numbers::pi / 2));
  // Agreement with the direct formula where it does not cancel.
  for (double a : {1e-3, 0.2, 1.0, 4.0, 30.0}) {
    const double direct = 0.5 * std::log(std::numbers::pi / 2) + 0.5 * std::log(a) + std::lgamma(a) - std::lgamma(a + 0.5);
    CHECK(std::fabs(L(a) - direct) < 1e-13);
  }
  CHECK_THROWS_AS(L(0.0), std::domain_error);
}

TEST_CASE("L_prime") {
  CHECK(std::fabs(L_prime(1.0) + 0.1137) < 1e-4);
  const double fd = (L(1.0 + 1e-6) - L(1.0 - 1e-6)) / 2e-6;
  CHECK(std::fabs(L_prime(1.0) - fd) < 1e-8);
  for (double a = 0.01; a <= 100.0; a *= 1.25) {
    INFO("a = " << a);
    CHECK(L_prime(a) < 0.0);
    const double h = a * 1e-3;
    CHECK(rel(L_prime(a), testing::derivative([](double t) { return L(t); }, a, h)) < 1e-7);
  }
}

TEST_CASE("L is strictly decreasing and bounded below") {
  double prev = L(1e-6);
  const double lo = L_infinity();
  const int n = 10000;
  for (int i = 1; i < n; ++i) {
    const double a = std::pow(10.0, -6.0 + 12.0 * i / (n - 1));
    const double cur = L(a);
    if (!(cur < prev) || !(cur > lo)) {
      INFO("a = " << a);
      CHECK(cur < prev);
      CHECK(cur > lo);
    }
    prev = cur;
  }
}

TEST_CASE("ell inverts L") {
  CHECK(std::fabs(ell(std::log(std::numbers::sqrt2)) - 1.0) < 1e-12);
  for (double a : {0.25, 0.5, 2.0, 7.0, 1e-4, 55.0, 3e4}) {
    const double u = L(a);
    const double got = ell(u);
    INFO("a = " << a);
    CHECK(rel(got, a) < 1e-10);
    CHECK(std::fabs(L(got) - u) < 1e-12 * std::max(1.0, std::fabs(u)));
  }
  CHECK_THROWS_AS(ell(L_infinity()), EllError);
  CHECK_THROWS_AS(ell(0.0), EllError);
  CHECK(ell_checked(L_infinity() + 0.5e-10).status == EllStatus::Infeasible);
  try {
    ell(L_infinity());
  } catch (const EllError& e) {
    CHECK(e.status() == EllStatus::Infeasible);
  }
  // Just above the boundary the root lies beyond the cap.
  const EllResult r = ell_checked(L_infinity() + 2e-10);
  CHECK(r.status == EllStatus::Boundary);
  CHECK(r.value == kEllUpperCap);
  CHECK_THROWS_AS(ell(L_infinity() + 2e-10), EllError);
}

TEST_CASE("modified_mme examples") {
  auto fr = modified_mme(from_va(1.0, 0.0, 1.0 / std::numbers::sqrt2));
  REQUIRE(fr.feasible);
  CHECK(fr.params->a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fr.params->b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fr.method == Method::ModifiedMme);

  fr = modified_mme(from_va(1.0, 0.0, std::sqrt(2.0 / std::numbers::pi)));
  CHECK(!fr.feasible);
  CHECK(fr.message.rfind("L-boundary", 0) == 0);

  fr = modified_mme(from_va(2.0, 0.0, 1.0606602));
  REQUIRE(fr.feasible);
  CHECK(std::fabs(fr.params->a - 2.0) < 1e-5);
  CHECK(std::fabs(fr.params->b - 1.0) < 1e-5);
  fr = modified_mme(from_va(2.0, 0.0, 1.0606601717798213));
  CHECK(std::fabs(fr.params->a - 2.0) < 1e-10);
}

TEST_CASE("modified_mme flags a cap hit but keeps the estimate") {
  const double u = L_infinity() + 3e-10;
  const double v = 1.0;
  const FitResult fr = modified_mme(from_va(v, 0.0, std::exp(0.5 * std::log(v) - u)));
  REQUIRE(fr.feasible);
  CHECK(fr.diagnostics.at("ell_cap_hit") == 1.0);
  CHECK(fr.params->a == kEllUpperCap);
}

TEST_CASE("round trip on population moments") {
  for (double a : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    for (double b : {0.01, 0.1, 1.0, 5.0}) {
      const PopulationMoments pm = population_moments(Params(a, b));
      INFO("a = " << a << ", b = " << b);
      const FitResult c = classic_mme(from_va(pm.V, pm.K, pm.A));
      REQUIRE(c.feasible);
      CHECK(rel(c.params->a, a) < 1e-10);
      CHECK(rel(c.params->b, b) < 1e-10);
      const FitResult m = modified_mme(from_va(pm.V, pm.K, pm.A));
      REQUIRE(m.feasible);
      CHECK(rel(m.params->a, a) < 1e-8);
      CHECK(rel(m.params->b, b) < 1e-8);
    }
  }
}

TEST_CASE("known-m mode uses moments about m") {
  const auto xs = sample(Params(1.0, 1.0, 3.0), 2000, 3);
  const MomentSummary known = summarize(xs, 3.0);
  const MomentSummary unknown = summarize(xs);
  const FitResult k = modified_mme(known);
  const FitResult u = modified_mme(unknown);
  REQUIRE(k.feasible);
  REQUIRE(u.feasible);
  CHECK(k.params->m == 3.0);
  CHECK(u.params->m == unknown.mean);
  CHECK(k.diagnostics.at("V") == known.v_prime);
  CHECK(k.diagnostics.at("A") == known.a_prime_abs);
  CHECK(k.params->a != u.params->a);
}

TEST_CASE("shift invariance in unknown-m mode") {
  // Dyadic data and shift: every operation is exact, so results are bit-identical.
  const auto raw = sample(Params(1.3, 0.8), 512, 21);
  std::vector<double> xs(raw.size()), ys(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    xs[i] = std::round(raw[i] * 64.0) / 64.0;
    ys[i] = xs[i] + 4.0;
  }
  const MomentSummary sx = summarize(xs), sy = summarize(ys);
  for (auto est : {classic_mme, modified_mme}) {
    const FitResult fx = est(sx), fy = est(sy);
    REQUIRE(fx.feasible);
    REQUIRE(fy.feasible);
    CHECK(fx.params->a == fy.params->a);
    CHECK(fx.params->b == fy.params->b);
    CHECK(fy.params->m - fx.params->m == 4.0);
  }
  // General data and shifts agree to rounding.
  std::vector<double> zs(raw.size());
  for (double c : {-17.3, 0.01, 1e3}) {
    for (std::size_t i = 0; i < raw.size(); ++i) zs[i] = raw[i] + c;
    for (auto est : {classic_mme, modified_mme}) {
      const FitResult fr = est(summarize(raw)), fz = est(summarize(zs));
      CHECK(rel(fz.params->a, fr.params->a) < 1e-9);
      CHECK(rel(fz.params->b, fr.params->b) < 1e-9);
    }
  }
}

TEST_CASE("scale covariance") {
  const auto xs = sample(Params(0.9, 1.7), 3000, 8);
  const MomentSummary s1 = summarize(xs, 0.0);
  for (double t : {2.0, 0.25, 3.7}) {
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = t * xs[i];
    const MomentSummary st = summarize(ys, 0.0);
    const FitResult c1 = classic_mme(s1), ct = classic_mme(st);
    const FitResult m1 = modified_mme(s1), mt = modified_mme(st);
    INFO("t = " << t);
    if (t == 2.0 || t == 0.25) {
      // Powers of two scale every moment exactly.
      CHECK(ct.params->a == c1.params->a);
      CHECK(ct.params->b == c1.params->b * t * t);
    }
    CHECK(rel(ct.params->a, c1.params->a) < 1e-12);
    CHECK(rel(ct.params->b, c1.params->b * t * t) < 1e-12);
    CHECK(rel(mt.params->a, m1.params->a) < 1e-10);
    CHECK(rel(mt.params->b, m1.params->b * t * t) < 1e-10);
  }
}

TEST_CASE("consistency as N grows") {
  for (auto est : {classic_mme, modified_mme}) {
    std::vector<double> medians;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
      std::vector<double> err;
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto xs = sample(Params(1.0, 1.0), n, 1000 + seed);
        const FitResult fr = est(summarize(xs, 0.0));
        err.push_back(fr.feasible ? std::fabs(fr.params->a - 1.0) : 1e9);
      }
      std::nth_element(err.begin(), err.begin() + 25, err.end());
      medians.push_back(err[25]);
    }
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
    CHECK(medians[2] < 0.05);
  }
}

#include "vgfit/simlab.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "json.hpp"

namespace vgfit {

namespace {

constexpr std::uint64_t kGridStreamTag = 0x67726964;         // "grid"
constexpr std::uint64_t kFeasibilityStreamTag = 0x66656173;  // "feas"

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

// Runs body(i) for i in [0, count) on `threads` workers. Work assignment
// varies with scheduling; callers write results into slot i only.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t, unsigned)>& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = next++; i < count; i = next++) body(i, t);
    });
  }
  for (auto& th : pool) th.join();
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

// Estimates are NaN for excluded replications.
ParamStats summarize_estimates(const std::vector<double>& est, double truth) {
  std::vector<double> kept;
  kept.reserve(est.size());
  for (double e : est) {
    if (!std::isnan(e)) kept.push_back(e);
  }
  ParamStats st;
  const std::size_t n = kept.size();
  if (n == 0) {
    st.bias = st.mse = st.se = st.mse_se = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  const double mean = pairwise_sum(kept.data(), n) / n;
  std::vector<double> sq(n), dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = (kept[i] - truth) * (kept[i] - truth);
    dev[i] = (kept[i] - mean) * (kept[i] - mean);
  }
  st.bias = mean - truth;
  st.mse = pairwise_sum(sq.data(), n) / n;
  if (n < 2) {
    st.se = st.mse_se = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  st.se = std::sqrt(pairwise_sum(dev.data(), n) / (n - 1) / n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (sq[i] - st.mse) * (sq[i] - st.mse);
  st.mse_se = std::sqrt(pairwise_sum(dev.data(), n) / (n - 1) / n);
  return st;
}

struct Replication {
  double a = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
  double m = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
  bool failure = false;
};

Replication run_estimator(SimEstimator est, std::span<const double> xs, const MomentSummary& ms, const SimGrid& grid) {
  FitResult fr;
  Replication rep;
  switch (est) {
    case SimEstimator::Classic:
      fr = classic_mme(ms);
      break;
    case SimEstimator::Modified:
      fr = modified_mme(ms);
      rep.failure = fr.diagnostics.count("ell_cap_hit") > 0;
      break;
    case SimEstimator::Mle: {
      std::optional<double> known;
      if (grid.m_known) known = grid.m_true;
      fr = fit_mle(xs, grid.mle, known);
      rep.failure = !fr.feasible;
      break;
    }
  }
  rep.feasible = fr.feasible;
  if (fr.feasible) {
    rep.a = fr.params->a;
    rep.b = fr.params->b;
    rep.m = fr.params->m;
  }
  return rep;
}

}  // namespace

std::string_view to_string(SimEstimator e) {
  switch (e) {
    case SimEstimator::Classic:
      return "classic";
    case SimEstimator::Modified:
      return "modified";
    case SimEstimator::Mle:
      return "mle";
  }
  return "unknown";
}

SimEstimator sim_estimator_from_string(std::string_view s) {
  if (s == "classic" || s == "classic-mme") return SimEstimator::Classic;
  if (s == "modified" || s == "modified-mme") return SimEstimator::Modified;
  if (s == "mle") return SimEstimator::Mle;
  throw std::invalid_argument("unknown estimator '" + std::string(s) + "'");
}

void SimGrid::validate() const {
  if (k < 1) throw std::invalid_argument("grid: k must be >= 1");
  if (N < 2) throw std::invalid_argument("grid: N must be >= 2");
  if (a_values.empty() || b_values.empty()) throw std::invalid_argument("grid: empty a or b list");
  for (double a : a_values) {
    if (!(a > 0.0 && std::isfinite(a))) throw std::invalid_argument("grid: a values must be > 0");
  }
  for (double b : b_values) {
    if (!(b > 0.0 && std::isfinite(b))) throw std::invalid_argument("grid: b values must be > 0");
  }
  if (!std::isfinite(m_true)) throw std::invalid_argument("grid: m_true must be finite");
}

std::vector<SimRow> run_grid(const SimGrid& grid, SimEstimator estimator) {
  const SimEstimator one[] = {estimator};
  return run_grid(grid, one);
}

std::vector<SimRow> run_grid(const SimGrid& grid, std::span<const SimEstimator> estimators) {
  grid.validate();
  std::vector<SimRow> rows;
  const std::size_t ne = estimators.size();
  const unsigned workers = std::max(1u, grid.threads);
  std::vector<std::vector<double>> buffers(workers, std::vector<double>(grid.N));

  for (double a : grid.a_values) {
    for (double b : grid.b_values) {
      const Params truth(a, b, grid.m_true);
      std::vector<Replication> reps(grid.k * ne);
      parallel_for(grid.k, workers, [&](std::size_t r, unsigned worker) {
        Xoshiro256 rng(derive_stream_key(grid.seed, {kGridStreamTag, bits(a), bits(b), grid.N, r}));
        std::span<double> xs(buffers[worker]);
        sample_into(truth, rng, xs);
        std::optional<double> known;
        if (grid.m_known) known = grid.m_true;
        const MomentSummary ms = summarize(xs, known);
        for (std::size_t e = 0; e < ne; ++e) reps[r * ne + e] = run_estimator(estimators[e], xs, ms, grid);
      });

      for (std::size_t e = 0; e < ne; ++e) {
        SimRow row;
        row.a = a;
        row.b = b;
        row.N = grid.N;
        row.k = grid.k;
        row.estimator = estimators[e];
        std::vector<double> ea(grid.k), eb(grid.k), em(grid.k);
        for (std::size_t r = 0; r < grid.k; ++r) {
          const Replication& rep = reps[r * ne + e];
          ea[r] = rep.a;
          eb[r] = rep.b;
          em[r] = rep.m;
          if (rep.feasible) {
            ++row.feasible_count;
          } else {
            ++row.infeasible_count;
          }
          if (rep.failure) ++row.failure_count;
        }
        row.a_hat = summarize_estimates(ea, a);
        row.b_hat = summarize_estimates(eb, b);
        row.m_hat = summarize_estimates(em, grid.m_true);
        row.feasibility_rate = static_cast<double>(row.feasible_count) / static_cast<double>(grid.k);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<FeasibilityRow> feasibility_table(double a, double b, std::span<const std::size_t> N_values,
                                              std::size_t k, std::uint64_t seed, unsigned threads) {
  if (k < 1) throw std::invalid_argument("feasibility_table: k must be >= 1");
  const Params truth(a, b, 0.0);
  std::vector<FeasibilityRow> rows;
  for (std::size_t n : N_values) {
    if (n < 2) throw std::invalid_argument("feasibility_table: N must be >= 2");
    std::vector<unsigned char> mod(k), cls(k);
    std::vector<std::vector<double>> buffers(std::max(1u, threads), std::vector<double>(n));
    parallel_for(k, threads, [&](std::size_t r, unsigned worker) {
      Xoshiro256 rng(derive_stream_key(seed, {kFeasibilityStreamTag, bits(a), bits(b), n, r}));
      std::span<double> xs(buffers[worker]);
      sample_into(truth, rng, xs);
      const MomentSummary ms = summarize(xs);
      mod[r] = feasibility_modified(ms);
      cls[r] = feasibility_classic(ms);
    });
    std::size_t cm = 0, cc = 0;
    for (std::size_t r = 0; r < k; ++r) {
      cm += mod[r];
      cc += cls[r];
    }
    rows.push_back({a, b, n, k, static_cast<double>(cm) / k, static_cast<double>(cc) / k});
  }
  return rows;
}

std::vector<LocationRow> location_table(const SimGrid& grid) {
  grid.validate();
  std::vector<LocationRow> rows;
  const unsigned workers = std::max(1u, grid.threads);
  std::vector<std::vector<double>> buffers(workers, std::vector<double>(grid.N));
  for (double a : grid.a_values) {
    for (double b : grid.b_values) {
      const Params truth(a, b, grid.m_true);
      std::vector<double> means(grid.k);
      parallel_for(grid.k, workers, [&](std::size_t r, unsigned worker) {
        Xoshiro256 rng(derive_stream_key(grid.seed, {kGridStreamTag, bits(a), bits(b), grid.N, r}));
        std::span<double> xs(buffers[worker]);
        sample_into(truth, rng, xs);
        means[r] = summarize(xs).mean;
      });
      rows.push_back({a, b, grid.N, grid.k, summarize_estimates(means, grid.m_true)});
    }
  }
  return rows;
}

void write_sim_csv(std::ostream& os, std::span<const SimRow> rows) {
  os << "a,b,N,k,estimator,bias_a,mse_a,se_a,bias_b,mse_b,se_b,bias_m,mse_m,se_m,feasibility_rate,failure_count\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const SimRow& r : rows) {
    os << num(r.a) << ',' << num(r.b) << ',' << r.N << ',' << r.k << ',' << to_string(r.estimator) << ','
       << num(r.a_hat.bias) << ',' << num(r.a_hat.mse) << ',' << num(r.a_hat.se) << ',' << num(r.b_hat.bias) << ','
       << num(r.b_hat.mse) << ',' << num(r.b_hat.se) << ',' << num(r.m_hat.bias) << ',' << num(r.m_hat.mse) << ','
       << num(r.m_hat.se) << ',' << num(r.feasibility_rate) << ',' << r.failure_count << '\n';
  }
}

void write_sim_json(std::ostream& os, std::span<const SimRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SimRow& r : rows) {
    arr.push_back({{"a", r.a},
                   {"b", r.b},
                   {"N", r.N},
                   {"k", r.k},
                   {"estimator", std::string(to_string(r.estimator))},
                   {"bias_a", r.a_hat.bias},
                   {"mse_a", r.a_hat.mse},
                   {"se_a", r.a_hat.se},
                   {"bias_b", r.b_hat.bias},
                   {"mse_b", r.b_hat.mse},
                   {"se_b", r.b_hat.se},
                   {"bias_m", r.m_hat.bias},
                   {"mse_m", r.m_hat.mse},
                   {"se_m", r.m_hat.se},
                   {"feasibility_rate", r.feasibility_rate},
                   {"failure_count", r.failure_count}});
  }
  os << arr.dump(2) << '\n';
}

}  // namespace vgfit

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "vgfit/mle.hpp"

namespace vgfit {

enum class SimEstimator { Classic, Modified, Mle };
std::string_view to_string(SimEstimator e);
SimEstimator sim_estimator_from_string(std::string_view s);

/// Monte Carlo design. Each (a, b) pair is one cell; each cell runs k
/// replications of size N.
struct SimGrid {
  std::vector<double> a_values{0.25, 0.5, 1.0, 2.0, 3.0};
  std::vector<double> b_values{0.01, 0.1, 1.0, 5.0};
  std::size_t N = 1000;
  std::size_t k = 10000;
  double m_true = 0.0;
  bool m_known = true;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  MleConfig mle;

  void validate() const;
};

struct ParamStats {
  double bias = 0.0;
  double mse = 0.0;
  double se = 0.0;      // sample std of the estimates / sqrt(feasible count)
  double mse_se = 0.0;  // standard error of mse
};

struct SimRow {
  double a = 0.0;
  double b = 0.0;
  std::size_t N = 0;
  std::size_t k = 0;
  SimEstimator estimator = SimEstimator::Classic;
  ParamStats a_hat;
  ParamStats b_hat;
  ParamStats m_hat;
  std::size_t feasible_count = 0;
  std::size_t infeasible_count = 0;
  // ell cap hits (modified) or optimiser failures (mle).
  std::size_t failure_count = 0;
  double feasibility_rate = 0.0;
};

/// Rows in cell order (a outer, b inner).
std::vector<SimRow> run_grid(const SimGrid& grid, SimEstimator estimator);

/// Several estimators evaluated on the same replications; rows are grouped
/// by cell, then in the order of `estimators`.
std::vector<SimRow> run_grid(const SimGrid& grid, std::span<const SimEstimator> estimators);

struct FeasibilityRow {
  double a = 0.0;
  double b = 0.0;
  std::size_t N = 0;
  std::size_t k = 0;
  double p_modified = 0.0;
  double p_classic = 0.0;
};

/// Probabilities that the centered-moment estimators exist.
std::vector<FeasibilityRow> feasibility_table(double a, double b, std::span<const std::size_t> N_values,
                                              std::size_t k, std::uint64_t seed, unsigned threads = 1);

struct LocationRow {
  double a = 0.0;
  double b = 0.0;
  std::size_t N = 0;
  std::size_t k = 0;
  ParamStats m_hat;
};

/// Accuracy of the sample mean as location estimate. Uses the same
/// replication streams as run_grid for the same seed.
std::vector<LocationRow> location_table(const SimGrid& grid);

void write_sim_csv(std::ostream& os, std::span<const SimRow> rows);
void write_sim_json(std::ostream& os, std::span<const SimRow> rows);

}  // namespace vgfit

#pragma once

#include <array>

namespace vgfit {

/// Symmetric 2x2 covariance in estimator order (a_hat, b_hat).
struct Cov2 {
  double aa = 0.0;
  double ab = 0.0;
  double bb = 0.0;

  double det() const { return aa * bb - ab * ab; }
  double correlation() const;
};

/// 3x3 covariance in order (m_hat, a_hat, b_hat).
struct Cov3 {
  std::array<std::array<double, 3>, 3> m{};
};

enum class CovMode { Paper, Centered };
enum class Estimator { Classic, Modified };

/// Closed-form limiting covariance of sqrt(N)((a_hat, b_hat) - (a, b)) for the
/// classic moment estimator.
Cov2 classic_cov(double a, double b);

/// The same matrix rebuilt as J C J^T from the raw-moment covariance C of
/// (X^2, X^4) and the Jacobian of (V, K) -> (a, b).
Cov2 classic_cov_delta(double a, double b);

// Building blocks of classic_cov_delta, exposed for tests.
std::array<std::array<double, 2>, 2> classic_moment_cov(double a, double b);
std::array<std::array<double, 2>, 2> classic_jacobian(double a, double b);

/// Delta-method covariance for the absolute-moment estimator. Paper mode uses
/// the raw second-moment matrix [[V, T], [T, K]] of (|X|, X^2); centered mode
/// uses their covariance [[V - A^2, T - A V], [T - A V, K - V^2]].
Cov2 modified_cov(double a, double b, CovMode mode = CovMode::Centered);

std::array<std::array<double, 2>, 2> modified_jacobian(double a, double b);

/// Block-diagonal diag(a b, Sigma) including the location estimate.
Cov3 full_cov(double a, double b, Estimator est, CovMode mode = CovMode::Centered);

}  // namespace vgfit

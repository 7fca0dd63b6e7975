#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vgfit/gen_laplace.hpp"

namespace vgfit {

/// Observations for fitting: at least two finite values.
class Sample {
 public:
  explicit Sample(std::vector<double> values);
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// Empirical moments with 1/N denominators. Centered fields subtract the
/// sample mean; primed fields are taken about `known_m` when it is set.
struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double v_hat = 0.0;
  double k_hat = 0.0;
  double a_hat_abs = 0.0;
  std::optional<double> known_m;
  double v_prime = 0.0;
  double k_prime = 0.0;
  double a_prime_abs = 0.0;

  // The (V, K, A, location) set the estimators act on.
  double V() const { return known_m ? v_prime : v_hat; }
  double K() const { return known_m ? k_prime : k_hat; }
  double A() const { return known_m ? a_prime_abs : a_hat_abs; }
  double location() const { return known_m ? *known_m : mean; }
};

MomentSummary summarize(std::span<const double> xs, std::optional<double> known_m = std::nullopt);
inline MomentSummary summarize(const Sample& s, std::optional<double> known_m = std::nullopt) {
  return summarize(s.values(), known_m);
}

enum class Method { ClassicMme, ModifiedMme, Mle };
std::string_view to_string(Method m);

struct FitResult {
  std::optional<Params> params;
  Method method = Method::ClassicMme;
  bool feasible = false;
  // Human-readable reason when infeasible or flagged.
  std::string message;
  std::map<std::string, double> diagnostics;
};

/// Moment ratio function L(a) = ln(pi/2)/2 + ln(a)/2 + ln Gamma(a) - ln Gamma(a + 1/2).
/// Strictly decreasing from +inf to ln(pi/2)/2.
double L(double a);
double L_prime(double a);

/// Lower end of the range of L.
double L_infinity();

enum class EllStatus { Ok, Infeasible, Boundary };

struct EllResult {
  EllStatus status = EllStatus::Ok;
  double value = 0.0;  // root, or the bracket end reached on Boundary
  int iterations = 0;
};

inline constexpr double kEllBoundaryTol = 1e-10;
inline constexpr double kEllUpperCap = 1e8;

// Inverse of L. Never throws; see EllStatus.
EllResult ell_checked(double u);

class EllError : public std::domain_error {
 public:
  EllError(EllStatus status, double reached, const std::string& what)
      : std::domain_error(what), status_(status), reached_(reached) {}
  EllStatus status() const { return status_; }
  double reached() const { return reached_; }

 private:
  EllStatus status_;
  double reached_;
};

/// Inverse of L; throws EllError at or below the normal-limit boundary and
/// when the bracket runs past its cap.
double ell(double u);

bool feasibility_classic(const MomentSummary& ms);
bool feasibility_modified(const MomentSummary& ms);

FitResult classic_mme(const MomentSummary& ms);
FitResult modified_mme(const MomentSummary& ms);

}  // namespace vgfit

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vgfit/rng.hpp"
#include "vgfit/special_fn.hpp"

namespace vgfit {

/// Parameters of the symmetric variance-gamma (generalized Laplace) law:
/// shape a > 0, scale b > 0, location m. Variance is a*b.
struct Params {
  Params(double a_, double b_, double m_ = 0.0);

  double a;
  double b;
  double m;
};

/// Population moments about the location m.
struct PopulationMoments {
  double V;   // variance
  double K;   // fourth central moment
  double A;   // E|X - m|
  double T;   // E|X - m|^3
  double M6;  // sixth central moment
  double M8;  // eighth central moment
};

/// Log density. Returns +inf at x == m when a <= 1/2; for a > 1/2 the value at
/// x == m is taken at |x - m| = 1e-12.
double log_pdf(const Params& p, double x);
double pdf(const Params& p, double x);

/// Characteristic function exp(i m w) (1 + b w^2 / 2)^(-a).
std::complex<double> cf(const Params& p, double w);

PopulationMoments population_moments(const Params& p);

/// n independent draws m + sqrt(b G) Z, G ~ Gamma(a, 1), Z ~ N(0, 1).
/// Draws are generated in fixed-size blocks with one stream per block, so
/// the output depends only on (p, n, seed) and not on `threads`.
std::vector<double> sample(const Params& p, std::size_t n, std::uint64_t seed, unsigned threads = 1);

/// Fills `out` from an already-positioned generator (used per replication).
void sample_into(const Params& p, Xoshiro256& rng, std::span<double> out);

/// Single-column CSV with header `x`, 17 significant digits.
void write_sample_csv(std::ostream& os, std::span<const double> xs);
/// Parses the format written by write_sample_csv. Throws std::runtime_error
/// with a line number on malformed input.
std::vector<double> read_sample_csv(std::istream& is);

}  // namespace vgfit

#include "vgfit/gen_laplace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace vgfit {

namespace {

constexpr std::size_t kSampleBlock = 4096;
constexpr double kMinDistance = 1e-12;

}  // namespace

Params::Params(double a_, double b_, double m_) : a(a_), b(b_), m(m_) {
  if (!std::isfinite(a) || a <= 0.0) throw std::domain_error("shape a must be finite and > 0");
  if (!std::isfinite(b) || b <= 0.0) throw std::domain_error("scale b must be finite and > 0");
  if (!std::isfinite(m)) throw std::domain_error("location m must be finite");
}

double log_pdf(const Params& p, double x) {
  double r = std::fabs(x - p.m);
  if (r == 0.0) {
    if (p.a <= 0.5) return std::numeric_limits<double>::infinity();
    r = kMinDistance;
  }
  const double nu = p.a - 0.5;
  return -0.5 * std::log(std::numbers::pi * p.b / 2.0) - special::log_gamma(p.a) +
         nu * std::log(r / std::sqrt(2.0 * p.b)) + special::log_bessel_k(nu, r * std::sqrt(2.0 / p.b));
}

double pdf(const Params& p, double x) { return std::exp(log_pdf(p, x)); }

std::complex<double> cf(const Params& p, double w) {
  const double modulus = std::pow(1.0 + 0.5 * p.b * w * w, -p.a);
  return std::polar(modulus, p.m * w);
}

PopulationMoments population_moments(const Params& p) {
  const double a = p.a;
  const double b = p.b;
  PopulationMoments pm{};
  pm.V = a * b;
  pm.K = 3.0 * a * (a + 1.0) * b * b;
  pm.A = std::sqrt(2.0 * b / std::numbers::pi) * std::exp(special::log_gamma(a + 0.5) - special::log_gamma(a));
  // E|X|^3 = b^(3/2) E[G^(3/2)] E|Z|^3 with E|Z|^3 = 2 sqrt(2/pi).
  pm.T = std::pow(b, 1.5) * std::exp(special::log_gamma(a + 1.5) - special::log_gamma(a)) * 2.0 *
         std::numbers::sqrt2 / std::sqrt(std::numbers::pi);
  pm.M6 = 15.0 * a * (a + 1.0) * (a + 2.0) * b * b * b;
  pm.M8 = 105.0 * a * (a + 1.0) * (a + 2.0) * (a + 3.0) * b * b * b * b;
  return pm;
}

void sample_into(const Params& p, Xoshiro256& rng, std::span<double> out) {
  for (double& x : out) {
    const double g = rng.gamma(p.a);
    x = p.m + std::sqrt(p.b * g) * rng.normal();
  }
}

std::vector<double> sample(const Params& p, std::size_t n, std::uint64_t seed, unsigned threads) {
  if (n == 0) throw std::domain_error("sample: n must be >= 1");
  std::vector<double> out(n);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  auto fill_block = [&](std::size_t blk) {
    Xoshiro256 rng(derive_stream_key(seed, {blk}));
    const std::size_t lo = blk * kSampleBlock;
    const std::size_t hi = std::min(n, lo + kSampleBlock);
    sample_into(p, rng, std::span<double>(out).subspan(lo, hi - lo));
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::size_t blk = 0; blk < blocks; ++blk) fill_block(blk);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t blk = t; blk < blocks; blk += threads) fill_block(blk);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

void write_sample_csv(std::ostream& os, std::span<const double> xs) {
  os << "x\n";
  char buf[64];
  for (double x : xs) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    os.write(buf, len);
    os.put('\n');
  }
}

std::vector<double> read_sample_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    s.erase(0, i);
  };
  if (!std::getline(is, line)) throw std::runtime_error("empty input: expected header 'x'");
  ++lineno;
  trim(line);
  if (line != "x") throw std::runtime_error("line 1: expected header 'x', got '" + line + "'");
  std::vector<double> xs;
  while (std::getline(is, line)) {
    ++lineno;
    trim(line);
    if (line.empty()) continue;
    double v = 0.0;
    const char* first = line.data();
    if (*first == '+') ++first;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": not a finite number: '" + line + "'");
    }
    xs.push_back(v);
  }
  return xs;
}

}  // namespace vgfit

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "vgfit/asymptotics.hpp"
#include "vgfit/gen_laplace.hpp"
#include "vgfit/mle.hpp"
#include "vgfit/mme.hpp"
#include "vgfit/simlab.hpp"

namespace vgfit::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("VGFIT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t s = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [p, ec] = std::from_chars(env, end, s);
  if (ec != std::errc() || p != end) throw UsageError("VGFIT_SEED is not an unsigned integer: " + std::string(env));
  return s;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// key=value lines; '#' starts a comment. Each entry becomes --key=value and
// is appended after the command line so it takes precedence.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(lineno) + ": bad key");
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> base;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& t = args[i];
    if (t == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a path");
      path = args[++i];
    } else if (t.rfind("--config=", 0) == 0) {
      path = t.substr(9);
    } else {
      base.push_back(t);
    }
  }
  if (path) {
    auto extra = read_config(*path);
    base.insert(base.end(), extra.begin(), extra.end());
  }
  return base;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

void finish_out(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

json matrix_json(const std::vector<std::vector<double>>& m) {
  json rows = json::array();
  for (const auto& r : m) rows.push_back(r);
  return rows;
}

void print_matrix(std::ostream& out, const std::vector<std::vector<double>>& m) {
  for (const auto& r : m) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? " " : "  ") << std::setw(14) << std::setprecision(8) << r[j];
    out << '\n';
  }
}

struct SampleOpts {
  double a = 1.0, b = 1.0, m = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

int cmd_sample(const SampleOpts& o, std::ostream& out) {
  const Params p(o.a, o.b, o.m);
  const auto xs = sample(p, o.n, o.seed, o.threads);
  if (o.out.empty() || o.out == "-") {
    write_sample_csv(out, xs);
  } else {
    auto f = open_out(o.out);
    write_sample_csv(f, xs);
    finish_out(f, o.out);
  }
  return kOk;
}

struct FitOpts {
  std::string in;
  std::string method = "modified-mme";
  std::optional<double> known_m;
  std::string format = "json";
  bool log_param = false;
  int max_iter = 5000;
};

int cmd_fit(const FitOpts& o, std::ostream& out, std::ostream& err) {
  std::vector<double> xs;
  {
    std::ifstream f(o.in);
    if (!f) throw IoError("cannot open '" + o.in + "'");
    try {
      xs = read_sample_csv(f);
    } catch (const std::runtime_error& e) {
      throw UsageError(o.in + ": " + e.what());
    }
  }
  if (xs.size() < 2) throw UsageError(o.in + ": need at least 2 observations");
  const Sample s(std::move(xs));
  FitResult fr;
  if (o.method == "classic-mme") {
    fr = classic_mme(summarize(s, o.known_m));
  } else if (o.method == "modified-mme") {
    fr = modified_mme(summarize(s, o.known_m));
  } else {
    MleConfig cfg;
    cfg.log_parameterized = o.log_param;
    cfg.max_iter = o.max_iter;
    fr = fit_mle(s, cfg, o.known_m);
  }

  json j;
  j["method"] = std::string(to_string(fr.method));
  j["feasible"] = fr.feasible;
  j["a_hat"] = fr.params ? json(fr.params->a) : json(nullptr);
  j["b_hat"] = fr.params ? json(fr.params->b) : json(nullptr);
  j["m_hat"] = fr.params ? json(fr.params->m) : json(nullptr);
  j["n"] = s.size();
  if (o.known_m) j["known_m"] = *o.known_m;
  if (!fr.message.empty()) j["message"] = fr.message;
  j["diagnostics"] = fr.diagnostics;

  if (o.format == "json") {
    out << j.dump(2) << '\n';
  } else {
    out << "method    " << j["method"].get<std::string>() << '\n';
    out << "feasible  " << (fr.feasible ? "yes" : "no") << '\n';
    if (fr.params) {
      out << "a_hat     " << num(fr.params->a) << '\n';
      out << "b_hat     " << num(fr.params->b) << '\n';
      out << "m_hat     " << num(fr.params->m) << '\n';
    }
    if (!fr.message.empty()) out << "message   " << fr.message << '\n';
    for (const auto& [k, v] : fr.diagnostics) out << "  " << std::left << std::setw(20) << k << num(v) << '\n';
  }
  if (!fr.feasible) {
    err << "infeasible: " << fr.message << '\n';
    return kInfeasible;
  }
  return kOk;
}

struct AsymOpts {
  double a = 1.0, b = 1.0;
  std::string estimator = "classic";
  std::string mode = "centered";
  std::string format = "json";
  bool full = false;
};

int cmd_asymptotics(const AsymOpts& o, std::ostream& out) {
  const Estimator est = o.estimator == "classic" ? Estimator::Classic : Estimator::Modified;
  const CovMode mode = o.mode == "paper" ? CovMode::Paper : CovMode::Centered;
  std::vector<std::vector<double>> m;
  double corr = 0.0, det = 0.0;
  const Cov2 c = est == Estimator::Classic ? classic_cov(o.a, o.b) : modified_cov(o.a, o.b, mode);
  corr = c.correlation();
  det = c.det();
  if (o.full) {
    const Cov3 f = full_cov(o.a, o.b, est, mode);
    for (const auto& r : f.m) m.emplace_back(r.begin(), r.end());
  } else {
    m = {{c.aa, c.ab}, {c.ab, c.bb}};
  }
  if (o.format == "json") {
    json j;
    j["a"] = o.a;
    j["b"] = o.b;
    j["estimator"] = o.estimator;
    if (est == Estimator::Modified) j["mode"] = o.mode;
    j["order"] = o.full ? json({"m", "a", "b"}) : json({"a", "b"});
    j["cov"] = matrix_json(m);
    j["correlation"] = corr;
    j["det"] = det;
    out << j.dump(2) << '\n';
  } else {
    out << o.estimator << " covariance at a=" << num(o.a) << " b=" << num(o.b);
    if (est == Estimator::Modified) out << " (" << o.mode << ")";
    out << '\n';
    print_matrix(out, m);
    out << "correlation " << std::setprecision(8) << corr << '\n';
  }
  return kOk;
}

struct SimOpts {
  std::vector<double> a_values{0.25, 0.5, 1.0, 2.0, 3.0};
  std::vector<double> b_values{0.01, 0.1, 1.0, 5.0};
  std::size_t N = 1000;
  std::size_t k = 10000;
  double m_true = 0.0;
  bool m_unknown = false;
  std::string estimator = "classic";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool paper_tables = false;
  bool log_param = false;
  std::string out;
  std::string json_out;
  std::string format = "csv";
};

void print_sim_text(std::ostream& out, std::span<const SimRow> rows) {
  out << std::left << std::setw(8) << "a" << std::setw(8) << "b" << std::setw(9) << "estim" << std::right
      << std::setw(12) << "bias_a" << std::setw(12) << "mse_a" << std::setw(12) << "se_a" << std::setw(12) << "bias_b"
      << std::setw(12) << "mse_b" << std::setw(12) << "se_b" << std::setw(9) << "feas" << '\n';
  for (const SimRow& r : rows) {
    out << std::left << std::setw(8) << r.a << std::setw(8) << r.b << std::setw(9) << to_string(r.estimator)
        << std::right << std::setprecision(5);
    for (double v : {r.a_hat.bias, r.a_hat.mse, r.a_hat.se, r.b_hat.bias, r.b_hat.mse, r.b_hat.se})
      out << std::setw(12) << v;
    out << std::setw(9) << r.feasibility_rate << '\n';
  }
}

int cmd_simulate(const SimOpts& o, std::ostream& out) {
  SimGrid g;
  g.a_values = o.a_values;
  g.b_values = o.b_values;
  g.N = o.N;
  g.k = o.k;
  g.m_true = o.m_true;
  g.m_known = !o.m_unknown;
  g.seed = o.seed;
  g.threads = o.threads;
  g.mle.log_parameterized = o.log_param;
  std::vector<SimEstimator> ests;
  if (o.paper_tables || o.estimator == "all") {
    ests = {SimEstimator::Classic, SimEstimator::Modified, SimEstimator::Mle};
  } else {
    ests = {sim_estimator_from_string(o.estimator)};
  }
  if (o.paper_tables) {
    const SimGrid defaults;
    g.a_values = defaults.a_values;
    g.b_values = defaults.b_values;
    g.N = defaults.N;
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rows = run_grid(g, ests);

  auto emit = [&](std::ostream& os) {
    if (o.format == "json") {
      write_sim_json(os, rows);
    } else if (o.format == "text") {
      print_sim_text(os, rows);
    } else {
      write_sim_csv(os, rows);
    }
  };
  if (o.out.empty() || o.out == "-") {
    emit(out);
  } else {
    auto f = open_out(o.out);
    emit(f);
    finish_out(f, o.out);
  }
  if (!o.json_out.empty()) {
    auto f = open_out(o.json_out);
    write_sim_json(f, rows);
    finish_out(f, o.json_out);
  }
  return kOk;
}

struct FeasOpts {
  double a = 1.0, b = 1.0;
  std::vector<std::size_t> N_values{5, 10, 25, 50, 100, 250, 500, 1000, 2500, 5000};
  std::size_t k = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string format = "csv";
};

int cmd_feasibility(const FeasOpts& o, std::ostream& out) {
  const Params check(o.a, o.b);
  (void)check;
  for (std::size_t n : o.N_values) {
    if (n < 2) throw UsageError("--N-values entries must be >= 2");
  }
  const auto rows = feasibility_table(o.a, o.b, o.N_values, o.k, o.seed, o.threads);
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"a", r.a}, {"b", r.b}, {"N", r.N}, {"k", r.k}, {"p_modified", r.p_modified},
                     {"p_classic", r.p_classic}});
    out << arr.dump(2) << '\n';
  } else if (o.format == "text") {
    out << std::setw(8) << "N" << std::setw(12) << "modified" << std::setw(12) << "classic" << '\n';
    for (const auto& r : rows)
      out << std::setw(8) << r.N << std::setw(12) << r.p_modified << std::setw(12) << r.p_classic << '\n';
  } else {
    out << "a,b,N,k,p_modified,p_classic\n";
    for (const auto& r : rows)
      out << num(r.a) << ',' << num(r.b) << ',' << r.N << ',' << r.k << ',' << num(r.p_modified) << ','
          << num(r.p_classic) << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const std::vector<std::string> tokens = expand_config(args);
    const std::uint64_t seed0 = default_seed();
    const unsigned threads0 = default_threads();

    CLI::App app{"Fitting and simulation for the symmetric variance-gamma law", "vgfit"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.add_option("--config", "key=value file; entries override command-line flags");

    auto pos = CLI::PositiveNumber;
    auto fmt = CLI::IsMember({"json", "text"});

    SampleOpts so;
    so.seed = seed0;
    auto* sc = app.add_subcommand("sample", "Draw a sample and write it as CSV");
    sc->add_option("--a", so.a, "shape")->required()->check(pos);
    sc->add_option("--b", so.b, "scale")->required()->check(pos);
    sc->add_option("--m", so.m, "location");
    sc->add_option("--n", so.n, "sample size")->required()->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    sc->add_option("--seed", so.seed, "seed (default $VGFIT_SEED or 0)");
    sc->add_option("--threads", so.threads)->check(pos);
    sc->add_option("--out", so.out, "output path (stdout if omitted)");

    FitOpts fo;
    auto* fc = app.add_subcommand("fit", "Fit one sample read from CSV");
    fc->add_option("--in", fo.in, "input CSV with header x")->required();
    fc->add_option("--method", fo.method)->check(CLI::IsMember({"classic-mme", "modified-mme", "mle"}));
    fc->add_option("--known-m", fo.known_m, "treat the location as known");
    fc->add_option("--format", fo.format)->check(fmt);
    fc->add_flag("--log-param", fo.log_param, "mle: search over log a, log b");
    fc->add_option("--max-iter", fo.max_iter)->check(pos);

    AsymOpts ao;
    auto* ac = app.add_subcommand("asymptotics", "Print a limiting covariance matrix");
    ac->add_option("--a", ao.a)->required()->check(pos);
    ac->add_option("--b", ao.b)->required()->check(pos);
    ac->add_option("--estimator", ao.estimator)->check(CLI::IsMember({"classic", "modified"}));
    ac->add_option("--mode", ao.mode)->check(CLI::IsMember({"paper", "centered"}));
    ac->add_option("--format", ao.format)->check(fmt);
    ac->add_flag("--full", ao.full, "include the location row and column");

    SimOpts mo;
    mo.seed = seed0;
    mo.threads = threads0;
    auto* mc = app.add_subcommand("simulate", "Monte Carlo bias/MSE over an (a, b) grid");
    mc->add_option("--a-values", mo.a_values)->delimiter(',')->check(pos);
    mc->add_option("--b-values", mo.b_values)->delimiter(',')->check(pos);
    mc->add_option("--N", mo.N, "sample size per replication");
    mc->add_option("--k", mo.k, "replications per cell");
    mc->add_option("--m-true", mo.m_true);
    mc->add_flag("--m-unknown,!--m-known", mo.m_unknown, "estimate the location from the sample mean");
    mc->add_option("--estimator", mo.estimator)
        ->check(CLI::IsMember({"classic", "modified", "mle", "classic-mme", "modified-mme", "all"}));
    mc->add_option("--seed", mo.seed);
    mc->add_option("--threads", mo.threads)->check(pos);
    mc->add_flag("--paper-tables", mo.paper_tables, "default grid, all estimators");
    mc->add_flag("--log-param", mo.log_param);
    mc->add_option("--out", mo.out, "report path (stdout if omitted)");
    mc->add_option("--json", mo.json_out, "additional JSON report path");
    mc->add_option("--format", mo.format)->check(CLI::IsMember({"csv", "json", "text"}));

    FeasOpts eo;
    eo.seed = seed0;
    eo.threads = threads0;
    auto* ec = app.add_subcommand("feasibility", "Probability that each moment estimator exists");
    ec->add_option("--a", eo.a)->required()->check(pos);
    ec->add_option("--b", eo.b)->required()->check(pos);
    ec->add_option("--N-values", eo.N_values)->delimiter(',');
    ec->add_option("--k", eo.k)->check(pos);
    ec->add_option("--seed", eo.seed);
    ec->add_option("--threads", eo.threads)->check(pos);
    ec->add_option("--format", eo.format)->check(CLI::IsMember({"csv", "json", "text"}));

    try {
      std::vector<std::string> rev(tokens.rbegin(), tokens.rend());
      app.parse(rev);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kUsage;
    }

    if (*sc) return cmd_sample(so, out);
    if (*fc) return cmd_fit(fo, out, err);
    if (*ac) return cmd_asymptotics(ao, out);
    if (*mc) return cmd_simulate(mo, out);
    if (*ec) return cmd_feasibility(eo, out);
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace vgfit::cli

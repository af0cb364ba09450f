#include "ppfe/analysis.hpp"
#include "ppfe/codec.hpp"
#include "ppfe/format.hpp"
#include "ppfe/harness.hpp"
#include "ppfe/report.hpp"
#include "ppfe/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace ppfe;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct CliConfig {
  std::string preset;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> trials;
  int workers = 0;
  std::string out = ".";
  double tol = 1e-10;
  std::size_t samples = 1000000;
  double step = 0.01;
};

/// Raised for configuration problems detected before any computation starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario resolve(const CliConfig& cfg) {
  if (cfg.preset.empty() == cfg.scenario_path.empty()) {
    throw UsageError("exactly one of --preset or --scenario is required");
  }
  try {
    Scenario sc = cfg.preset.empty() ? load_scenario_file(cfg.scenario_path)
                                     : scenario_preset(cfg.preset);
    if (cfg.seed) sc.seed = *cfg.seed;
    if (cfg.horizon) sc.horizon = *cfg.horizon;
    if (cfg.trials) sc.trials = *cfg.trials;
    sc.validate();
    return sc;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

fs::path prepare_out(const CliConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw UsageError("cannot create output directory " + cfg.out);
  return fs::path(cfg.out);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

int cmd_simulate(const CliConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const fs::path out = prepare_out(cfg);
  const RunResult r = run_monte_carlo(sc, {cfg.workers, true});
  const SecrecyReport rep = secrecy_report(r, sc.codec.growth);
  {
    auto os = open_out(out / "mse.csv");
    write_mse_csv(os, r);
  }
  {
    auto os = open_out(out / "events.csv");
    write_events_csv(os, r.events);
  }
  {
    auto os = open_out(out / "summary.txt");
    write_summary(os, sc, r, rep);
  }
  write_summary(std::cout, sc, r, rep);
  return kOk;
}

int cmd_bound(const CliConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const fs::path out = prepare_out(cfg);
  if (!(cfg.tol > 0.0)) throw UsageError("--tol must be > 0");
  BoundParams params = make_bound_params(sc.model, sc.sensors, sc.channel.authorized, sc.codec);
  IterateOptions opts;
  opts.tol = cfg.tol;
  if (cfg.horizon) opts.steps = *cfg.horizon;
  const BoundSequence seq = iterate_bound(sc.model.P0, std::move(params), opts);
  {
    auto os = open_out(out / "bound.csv");
    write_bound_csv(os, seq);
  }
  const std::string verdict = bound_verdict(seq);
  {
    auto os = open_out(out / "bound_verdict.txt");
    os << verdict << '\n';
    for (const auto& w : seq.warnings) os << "warning: " << w << '\n';
  }
  std::cout << "bound: " << verdict << '\n';
  for (const auto& w : seq.warnings) std::cout << "warning: " << w << '\n';
  return kOk;
}

int cmd_conditions(const CliConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const fs::path out = prepare_out(cfg);
  const ConditionsReport rep = evaluate_conditions(sc);
  write_conditions_text(std::cout, rep);
  auto os = open_out(out / "conditions.json");
  os << conditions_json(rep);
  return kOk;
}

/// Sample mean and variance of the quantizer output at fixed inputs, and of the decode
/// error for s in {1, 2}.
int cmd_quantizer_test(const CliConfig& cfg) {
  if (!(cfg.step > 0.0)) throw UsageError("--delta must be > 0");
  if (cfg.samples < 2) throw UsageError("--samples must be >= 2");
  const fs::path out = prepare_out(cfg);
  const std::uint64_t seed = cfg.seed.value_or(0);
  const double delta = cfg.step;
  const double n = static_cast<double>(cfg.samples);
  auto os = open_out(out / "quantizer.csv");
  os << "test,input,scale,mean_error,variance,mean_tolerance,variance_limit,pass\n";
  bool all = true;

  const double inputs[] = {2.0 * delta, 2.5 * delta, -1.3 * delta};
  for (std::size_t j = 0; j < 3; ++j) {
    RandomStream rng(seed, StreamRole::Quantizer, j);
    const double zbar = inputs[j];
    const double q = zbar / delta - std::floor(zbar / delta);
    Vec in = Vec::Constant(1, zbar);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t t = 0; t < cfg.samples; ++t) {
      const double e = quantize(in, delta, rng).value(0) - zbar;
      sum += e;
      sumsq += e * e;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq / n - mean * mean) * n / (n - 1.0));
    const double tol = 3.0 * (delta / 2.0) / std::sqrt(n);
    const double limit = q * (1.0 - q) * delta * delta * 1.05;
    const bool pass = std::abs(mean) < tol + 1e-15 && var <= limit + 1e-18;
    all = all && pass;
    os << "quantize," << format_double(zbar) << ",1," << format_double(mean) << ','
       << format_double(var) << ',' << format_double(tol) << ',' << format_double(limit) << ','
       << pass << '\n';
    std::cout << "quantize z=" << zbar << ": mean error " << mean << ", variance " << var
              << (pass ? " pass" : " FAIL") << '\n';
  }

  for (double s : {1.0, 2.0}) {
    RandomStream rng(seed, StreamRole::Measurement, static_cast<std::uint64_t>(s));
    RandomStream qrng(seed, StreamRole::Quantizer, 10 + static_cast<std::uint64_t>(s));
    const CodecParams params{5.0, delta, s, false};
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t t = 0; t < cfg.samples; ++t) {
      CodecState st{0, Vec::Constant(1, rng.normal()), true};
      const Vec y = Vec::Constant(1, rng.normal());
      const EncodedPacket p = encode(st, params, y, 1, qrng);
      const double e = decode(st, params, p.z, 1).value(0) - y(0);
      sum += e;
      sumsq += e * e;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq / n - mean * mean) * n / (n - 1.0));
    const double tol = 3.0 * (s * delta / 2.0) / std::sqrt(n);
    const double limit = s * s * delta * delta / 4.0 * 1.05;
    const bool pass = std::abs(mean) < tol && var <= limit;
    all = all && pass;
    os << "decode,random," << format_double(s) << ',' << format_double(mean) << ','
       << format_double(var) << ',' << format_double(tol) << ',' << format_double(limit) << ','
       << pass << '\n';
    std::cout << "decode s=" << s << ": mean error " << mean << ", variance " << var
              << (pass ? " pass" : " FAIL") << '\n';
  }
  return all ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving fusion estimation toolkit"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", cfg.preset, "Named scenario preset");
    sub->add_option("--scenario", cfg.scenario_path, "Scenario JSON file");
    sub->add_option("--seed", cfg.seed, "Master seed")->envname("PPFE_SEED");
    sub->add_option("--horizon", cfg.horizon, "Horizon / iteration count override");
    sub->add_option("--trials", cfg.trials, "Monte Carlo trial count override");
    sub->add_option("--workers", cfg.workers, "Worker threads (0 = default)");
    sub->add_option("--out", cfg.out, "Output directory");
  };
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo experiment");
  add_common(simulate);
  auto* bound = app.add_subcommand("bound", "Iterate the covariance bound recursion");
  add_common(bound);
  bound->add_option("--tol", cfg.tol, "Relative convergence tolerance");
  auto* conditions = app.add_subcommand("conditions", "Capacity, Mahler measure and PBH report");
  add_common(conditions);
  auto* quant = app.add_subcommand("quantizer-test", "Statistical checks of the codec");
  quant->add_option("--seed", cfg.seed, "Master seed")->envname("PPFE_SEED");
  quant->add_option("--out", cfg.out, "Output directory");
  quant->add_option("--samples", cfg.samples, "Draws per check");
  quant->add_option("--delta", cfg.step, "Quantization step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (cfg.workers < 0) throw UsageError("--workers must be >= 0");
    if (cfg.horizon && *cfg.horizon == 0) throw UsageError("--horizon must be >= 1");
    if (cfg.trials && *cfg.trials == 0) throw UsageError("--trials must be >= 1");
    if (*simulate) return cmd_simulate(cfg);
    if (*bound) return cmd_bound(cfg);
    if (*conditions) return cmd_conditions(cfg);
    return cmd_quantizer_test(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

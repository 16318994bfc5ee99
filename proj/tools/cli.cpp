#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include "divest/approx.hpp"
#include "divest/divergence.hpp"
#include "divest/error.hpp"
#include "divest/harness.hpp"
#include "divest/sampling.hpp"
#include "histogram_io.hpp"
#include "selftest.hpp"

namespace divest::cli {

namespace {

struct EstimateOptions {
  std::string divergence;
  std::string p_file, q_file;
  bool plugin = false;
  EstimatorConfig cfg;
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  std::string spec_file, out_file;
  std::optional<unsigned> threads;
};

struct DumpOptions {
  std::string target;
  int degree = 0;
  double lo = 0.0;
  double hi = 1.0;
};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_estimate(const EstimateOptions& o, std::ostream& out) {
  const auto [hp, hq] = align(read_histogram(o.p_file), read_histogram(o.q_file));
  double value = 0.0;
  if (o.plugin) {
    if (o.divergence == "kl") value = divergence::estimate_kl_plugin(hp, hq);
    if (o.divergence == "hellinger") value = divergence::hellinger_plugin(hp, hq);
    if (o.divergence == "chi2") value = divergence::chi2_plugin(hp, hq);
  } else {
    const SplitSamples sp = sampling::split3(hp, 2 * o.seed);
    const SplitSamples sq = sampling::split3(hq, 2 * o.seed + 1);
    if (o.divergence == "kl") value = divergence::estimate_kl_adaptive(sp, sq, o.cfg).value;
    if (o.divergence == "hellinger") value = divergence::estimate_hellinger(sp, sq, o.cfg).value;
    if (o.divergence == "chi2") value = divergence::estimate_chi2(sp, sq, o.cfg).value;
  }
  out << format_real(value) << '\n';
  return 0;
}

int run_simulate(const SimulateOptions& o) {
  harness::ExperimentSpec spec = harness::load_spec(o.spec_file);
  if (o.threads) spec.threads = *o.threads;
  const auto report = harness::run_risk_experiment(spec);
  std::ofstream file(o.out_file, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::kIo, "cannot write " + o.out_file);
  harness::write_csv(file, report);
  if (!file.flush()) throw Error(Errc::kIo, "failed writing " + o.out_file);
  return 0;
}

int run_dump(const DumpOptions& o, std::ostream& out) {
  const approx::Target target = approx::parse_target(o.target);
  approx::Polynomial poly;
  double error = 0.0;
  if (target == approx::Target::kInverse) {
    poly = approx::cheb_inverse_poly(o.degree, o.hi);
    error = o.hi / ((o.degree + 2.0) * (o.degree + 2.0));
  } else {
    const auto result = approx::best_approx(target, o.degree, approx::Interval::checked(o.lo, o.hi));
    poly = result.poly;
    error = result.levelled_error;
  }
  out << "k,coeff\n";
  for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
    out << k << ',' << format_real(static_cast<double>(poly.coeffs[k])) << '\n';
  }
  out << "error," << format_real(error) << '\n';
  return 0;
}

// Reduce CLI11's multi-line messages to the single line we promise.
std::string first_line(const std::string& s) {
  const auto nl = s.find('\n');
  return nl == std::string::npos ? s : s.substr(0, nl);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divergence estimation on large alphabets", "divest"};
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a divergence between two histogram files");
  estimate->add_option("--divergence", est.divergence, "kl, hellinger or chi2")
      ->required()
      ->check(CLI::IsMember({"kl", "hellinger", "chi2"}));
  estimate->add_option("--p", est.p_file, "histogram of samples from P")->required();
  estimate->add_option("--q", est.q_file, "histogram of samples from Q")->required();
  estimate->add_flag("--plugin", est.plugin, "use the plug-in estimator");
  estimate->add_option("--c1", est.cfg.c1, "regime threshold constant")->check(CLI::PositiveNumber);
  estimate->add_option("--c2", est.cfg.c2, "polynomial degree constant")->check(CLI::PositiveNumber);
  estimate->add_option("--truncate", est.cfg.truncate, "non-smooth term clamp")->check(CLI::PositiveNumber);
  estimate->add_option("--min-degree", est.cfg.min_degree, "lower bound on the degree")->check(CLI::PositiveNumber);
  estimate->add_option("--seed", est.seed, "seed for the three-way split");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo risk experiment");
  simulate->add_option("--spec", sim.spec_file, "experiment spec file")->required();
  simulate->add_option("--out", sim.out_file, "CSV report path")->required();
  simulate->add_option("--threads", sim.threads, "worker threads (0 = all cores)");

  DumpOptions dump;
  auto* approx_cmd = app.add_subcommand("approx", "Polynomial approximation utilities");
  approx_cmd->require_subcommand(1);
  auto* dump_cmd = approx_cmd->add_subcommand("dump", "Print coefficients and certified error as CSV");
  dump_cmd->add_option("--target", dump.target, "xlogx, sqrt, log or invx")
      ->required()
      ->check(CLI::IsMember({"xlogx", "sqrt", "log", "invx"}));
  dump_cmd->add_option("--degree", dump.degree, "polynomial degree")->required()->check(CLI::NonNegativeNumber);
  dump_cmd->add_option("--lo", dump.lo, "domain lower end");
  dump_cmd->add_option("--hi", dump.hi, "domain upper end (delta for invx)");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "divest: " << first_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (*estimate) return run_estimate(est, out);
    if (*simulate) return run_simulate(sim);
    if (*dump_cmd) return run_dump(dump, out);
    if (*selftest) return run_selftest(out) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "divest: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace divest::cli

#include "divest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "divest/error.hpp"
#include "divest/numeric.hpp"

namespace divest::harness {

namespace {

constexpr EstimatorId kAllEstimators[] = {
    EstimatorId::kKlAdaptive, EstimatorId::kKlPlugin, EstimatorId::kHellinger,
    EstimatorId::kHellingerPlugin, EstimatorId::kChi2, EstimatorId::kChi2Plugin};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct TrialData {
  SplitSamples sp, sq;
  Histogram hp, hq;
};

double evaluate(EstimatorId id, const TrialData& d, const EstimatorConfig& cfg) {
  switch (id) {
    case EstimatorId::kKlAdaptive: return divergence::estimate_kl_adaptive(d.sp, d.sq, cfg).value;
    case EstimatorId::kKlPlugin: return divergence::estimate_kl_plugin(d.hp, d.hq);
    case EstimatorId::kHellinger: return divergence::estimate_hellinger(d.sp, d.sq, cfg).value;
    case EstimatorId::kHellingerPlugin: return divergence::hellinger_plugin(d.hp, d.hq);
    case EstimatorId::kChi2: return divergence::estimate_chi2(d.sp, d.sq, cfg).value;
    case EstimatorId::kChi2Plugin: return divergence::chi2_plugin(d.hp, d.hq);
  }
  return 0.0;
}

double axis_value(const GridPoint& g, Axis axis) {
  switch (axis) {
    case Axis::kS: return g.S;
    case Axis::kM: return g.m;
    case Axis::kN: return g.n;
  }
  return 0.0;
}

}  // namespace

const char* estimator_name(EstimatorId id) noexcept {
  switch (id) {
    case EstimatorId::kKlAdaptive: return "kl_adaptive";
    case EstimatorId::kKlPlugin: return "kl_plugin";
    case EstimatorId::kHellinger: return "hellinger";
    case EstimatorId::kHellingerPlugin: return "hellinger_plugin";
    case EstimatorId::kChi2: return "chi2";
    case EstimatorId::kChi2Plugin: return "chi2_plugin";
  }
  return "unknown";
}

EstimatorId parse_estimator(const std::string& name) {
  for (EstimatorId id : kAllEstimators) {
    if (name == estimator_name(id)) return id;
  }
  throw Error(Errc::kUnknownEstimator, "unknown estimator '" + name + "'");
}

sampling::DistributionPair make_fixture(const Fixture& fixture, int S, double u) {
  if (fixture.name == "uniform") return sampling::make_uniform_pair(S);
  if (fixture.name == "worst_case") return sampling::make_worst_case_pair(S, u);
  if (fixture.name == "two_point_q1") return sampling::make_two_point_pair(S, u, fixture.eps).first;
  if (fixture.name == "two_point_q0") return sampling::make_two_point_pair(S, u, fixture.eps).second;
  throw Error(Errc::kUnknownFixture, "unknown fixture '" + fixture.name + "'");
}

double true_value(EstimatorId id, const sampling::DistributionPair& pair) {
  const auto& p = pair.p.probs;
  const auto& q = pair.q.probs;
  switch (id) {
    case EstimatorId::kKlAdaptive:
    case EstimatorId::kKlPlugin: return divergence::kl_divergence(p, q);
    case EstimatorId::kHellinger:
    case EstimatorId::kHellingerPlugin: return divergence::hellinger_squared(p, q);
    case EstimatorId::kChi2:
    case EstimatorId::kChi2Plugin: return divergence::chi_squared(p, q);
  }
  return 0.0;
}

void ExperimentSpec::validate() const {
  cfg.validate();
  if (trials < 1) throw Error(Errc::kInvalidParams, "trials must be >= 1");
  if (grid.empty()) throw Error(Errc::kInvalidParams, "experiment grid is empty");
  if (estimators.empty()) throw Error(Errc::kInvalidParams, "no estimators listed");
  for (const auto& e : estimators) parse_estimator(e);
  for (const auto& g : grid) {
    if (g.S < 1 || !(g.m >= 6.0) || !(g.n >= 6.0) || !(g.u >= 1.0)) {
      throw Error(Errc::kInvalidParams, "grid points need S >= 1, m, n >= 6 and u >= 1");
    }
    make_fixture(fixture, g.S, g.u);
  }
}

RiskReport run_risk_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<EstimatorId> ids;
  for (const auto& e : spec.estimators) ids.push_back(parse_estimator(e));
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(spec.trials));

  RiskReport report;
  const auto trials = static_cast<std::size_t>(spec.trials);
  for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
    const GridPoint& g = spec.grid[gi];
    const auto pair = make_fixture(spec.fixture, g.S, g.u);
    std::vector<double> truth(ids.size());
    for (std::size_t e = 0; e < ids.size(); ++e) truth[e] = true_value(ids[e], pair);

    // estimates[e * trials + t]
    std::vector<double> estimates(ids.size() * trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      try {
        for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
          const std::uint64_t key = (static_cast<std::uint64_t>(gi) << 32) | t;
          TrialData d;
          d.sp = sampling::sample_split(pair.p, g.m, spec.seed, key, 0);
          d.sq = sampling::sample_split(pair.q, g.n, spec.seed, key, 3);
          d.hp = d.sp.merged();
          d.hq = d.sq.merged();
          for (std::size_t e = 0; e < ids.size(); ++e) {
            estimates[e * trials + t] = evaluate(ids[e], d, spec.cfg);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t e = 0; e < ids.size(); ++e) {
      std::vector<double> err(trials), sq(trials);
      for (std::size_t t = 0; t < trials; ++t) {
        err[t] = estimates[e * trials + t] - truth[e];
        sq[t] = err[t] * err[t];
      }
      const double N = static_cast<double>(trials);
      RiskRow row;
      row.estimator = estimator_name(ids[e]);
      row.point = g;
      row.trials = spec.trials;
      row.bias = numeric::pairwise_sum(err) / N;
      std::vector<double> centered(trials);
      for (std::size_t t = 0; t < trials; ++t) {
        const double c = err[t] - row.bias;
        centered[t] = c * c;
      }
      row.variance = numeric::pairwise_sum(centered) / N;
      row.mse = row.bias * row.bias + row.variance;
      if (trials >= 2) {
        const double mean_sq = numeric::pairwise_sum(sq) / N;
        for (std::size_t t = 0; t < trials; ++t) {
          const double c = sq[t] - mean_sq;
          centered[t] = c * c;
        }
        row.stderr_mse = std::sqrt(numeric::pairwise_sum(centered) / (N - 1.0) / N);
      } else {
        row.stderr_mse = std::numeric_limits<double>::quiet_NaN();
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

Axis parse_axis(const std::string& name) {
  if (name == "S") return Axis::kS;
  if (name == "m") return Axis::kM;
  if (name == "n") return Axis::kN;
  throw Error(Errc::kInvalidParams, "axis must be one of S, m, n");
}

RateFit rate_fit(const RiskReport& report, const std::string& estimator, Axis axis) {
  std::vector<const RiskRow*> rows;
  for (const auto& r : report.rows) {
    if (r.estimator == estimator) rows.push_back(&r);
  }
  if (rows.size() < 3) {
    throw Error(Errc::kInsufficientRows,
                "rate fit needs >= 3 rows, found " + std::to_string(rows.size()));
  }
  constexpr Axis kAxes[] = {Axis::kS, Axis::kM, Axis::kN};
  for (Axis other : kAxes) {
    if (other == axis) continue;
    for (const auto* r : rows) {
      if (axis_value(r->point, other) != axis_value(rows.front()->point, other)) {
        throw Error(Errc::kInvalidParams, "rows vary along more than the fitted axis");
      }
    }
  }
  for (const auto* r : rows) {
    if (r->point.u != rows.front()->point.u) {
      throw Error(Errc::kInvalidParams, "rows vary along more than the fitted axis");
    }
    if (!(r->mse > 0.0)) throw Error(Errc::kInvalidParams, "rate fit needs positive mse");
  }

  const double N = static_cast<double>(rows.size());
  double mx = 0.0, my = 0.0;
  for (const auto* r : rows) {
    mx += std::log(axis_value(r->point, axis));
    my += std::log(r->mse);
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto* r : rows) {
    const double dx = std::log(axis_value(r->point, axis)) - mx;
    const double dy = std::log(r->mse) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(Errc::kInsufficientRows, "fitted axis takes a single value");
  RateFit fit;
  fit.slope = sxy / sxx;
  const double ss_res = syy - fit.slope * sxy;
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

void write_csv(std::ostream& out, const RiskReport& report) {
  out << "estimator,S,m,n,u,mse,bias,variance,stderr_mse,trials\n";
  char buf[512];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
                  r.estimator.c_str(), r.point.S, r.point.m, r.point.n, r.point.u, r.mse, r.bias,
                  r.variance, r.stderr_mse, r.trials);
    out << buf;
  }
}

ExperimentSpec parse_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error(Errc::kParse, "spec line " + std::to_string(lineno) + ": " + what);
  };
  auto number = [&](const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + v + "'");
    }
    if (used != v.size()) fail("expected a number, got '" + v + "'");
    return x;
  };
  auto integer = [&](const std::string& v) {
    std::size_t used = 0;
    long long x = 0;
    try {
      x = std::stoll(v, &used);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + v + "'");
    }
    if (used != v.size()) fail("expected an integer, got '" + v + "'");
    return x;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "fixture") {
      spec.fixture.name = value;
    } else if (key == "eps") {
      spec.fixture.eps = number(value);
    } else if (key == "estimators") {
      spec.estimators.clear();
      std::istringstream ls(value);
      for (std::string item; std::getline(ls, item, ',');) {
        item = trim(item);
        if (!item.empty()) spec.estimators.push_back(item);
      }
    } else if (key == "grid") {
      std::istringstream ls(value);
      std::string s, m, n, u, extra;
      if (!(ls >> s >> m >> n >> u) || (ls >> extra)) fail("grid expects `S m n u`");
      spec.grid.push_back(GridPoint{static_cast<int>(integer(s)), number(m), number(n), number(u)});
    } else if (key == "trials") {
      spec.trials = static_cast<int>(integer(value));
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(integer(value));
    } else if (key == "threads") {
      spec.threads = static_cast<unsigned>(integer(value));
    } else if (key == "c1") {
      spec.cfg.c1 = number(value);
    } else if (key == "c2") {
      spec.cfg.c2 = number(value);
    } else if (key == "truncate") {
      spec.cfg.truncate = number(value);
    } else if (key == "min_degree") {
      spec.cfg.min_degree = static_cast<int>(integer(value));
    } else if (key == "average_p_in_smooth") {
      spec.cfg.average_p_in_smooth = integer(value) != 0;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  return parse_spec(in);
}

}  // namespace divest::harness

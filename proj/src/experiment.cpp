#include "edgecache/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "edgecache/spo_study.hpp"

namespace edgecache {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::int64_t fraction_of(double fraction, std::int64_t total) {
  return std::llround(fraction * static_cast<double>(total));
}

std::int64_t total_size(const std::vector<SizeClass>& classes) {
  std::int64_t total = 0;
  for (const auto& c : classes) total += static_cast<std::int64_t>(c.size) * c.count;
  return total;
}

int largest(const std::vector<SizeClass>& classes) {
  int s = 0;
  for (const auto& c : classes) s = std::max(s, c.size);
  return s;
}

// F files spread as evenly as possible over the configured sizes.
std::vector<SizeClass> spread(const std::vector<SizeClass>& classes, int num_files) {
  std::vector<SizeClass> out;
  const auto k = static_cast<int>(classes.size());
  for (int i = 0; i < k; ++i) {
    const int count = num_files / k + (i < num_files % k ? 1 : 0);
    if (count > 0) out.push_back({classes[static_cast<std::size_t>(i)].size, count});
  }
  return out;
}

bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
  });
}

PolicySpec policy(std::string name, PolicyType type, SolverKind solver = SolverKind::kGreedy) {
  PolicySpec p;
  p.name = std::move(name);
  p.kind.type = type;
  p.kind.solver = solver;
  return p;
}

std::vector<PolicySpec> sweep_policies() {
  return {policy("iub", PolicyType::kIub, SolverKind::kBranchAndBound),
          policy("mcucb", PolicyType::kMcucb), policy("eps_greedy", PolicyType::kEpsGreedy),
          policy("myopic", PolicyType::kMyopic), policy("random", PolicyType::kRandom)};
}

std::vector<std::int64_t> every(std::int64_t step, std::int64_t horizon) {
  std::vector<std::int64_t> out;
  for (std::int64_t t = step; t <= horizon; t += step) out.push_back(t);
  return out;
}

std::vector<std::int64_t> checkpoints_of(const ExperimentConfig& c) {
  return c.checkpoints.empty() ? std::vector<std::int64_t>{c.horizon} : c.checkpoints;
}

std::string_view axis_label(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kGamma:
      return "popularity skewness gamma";
    case SweepAxis::kCacheSize:
      return "cache size (% of total content size)";
    case SweepAxis::kUsers:
      return "number of users U";
    case SweepAxis::kFiles:
      return "number of files F";
    case SweepAxis::kNone:
      break;
  }
  return "period";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone:
      return "none";
    case SweepAxis::kGamma:
      return "gamma";
    case SweepAxis::kCacheSize:
      return "cache_size";
    case SweepAxis::kUsers:
      return "users";
    case SweepAxis::kFiles:
      return "files";
  }
  return "none";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (auto a : {SweepAxis::kNone, SweepAxis::kGamma, SweepAxis::kCacheSize, SweepAxis::kUsers,
                 SweepAxis::kFiles}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentMode mode) {
  return mode == ExperimentMode::kSpoValidation ? "spo_validation" : "simulation";
}

ExperimentMode parse_experiment_mode(std::string_view name) {
  if (name == "simulation") return ExperimentMode::kSimulation;
  if (name == "spo_validation") return ExperimentMode::kSpoValidation;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

int ExperimentConfig::num_files() const {
  int n = 0;
  for (const auto& c : size_classes) n += c.count;
  return n;
}

std::int64_t ExperimentConfig::effective_replications() const {
  return std::max<std::int64_t>(1, std::llround(static_cast<double>(replications) * scale));
}

std::int64_t ExperimentConfig::effective_spo_instances() const {
  return std::max<std::int64_t>(1, std::llround(static_cast<double>(spo_instances) * scale));
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (!valid_label(c.name)) fail("name must be letters, digits, '_' or '-'");
  if (!(c.scale > 0.0) || !std::isfinite(c.scale)) fail("scale must be positive");

  if (c.mode == ExperimentMode::kSpoValidation) {
    if (c.spo_instances < 1) fail("spo_validation needs instances >= 1");
    if (!(c.spo_timeout > 0.0)) fail("spo_validation timeout must be positive");
    return;
  }

  if (c.policies.empty()) fail("no policies");
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    const auto& p = c.policies[i];
    if (!valid_label(p.name)) fail("policy name '" + p.name + "' must be letters, digits, '_' or '-'");
    for (std::size_t j = 0; j < i; ++j) {
      if (c.policies[j].name == p.name) fail("duplicate policy '" + p.name + "'");
    }
    if (!(p.kind.epsilon >= 0.0 && p.kind.epsilon <= 1.0)) fail("epsilon must lie in [0, 1]");
    if (p.kind.gamma_hat && !(*p.kind.gamma_hat >= 0.0)) fail("gamma_hat must be >= 0");
    if (!(p.kind.timeout.count() > 0.0)) fail("solver timeout must be positive");
  }
  if (c.size_classes.empty()) fail("no size classes");
  for (std::size_t i = 0; i < c.size_classes.size(); ++i) {
    if (c.size_classes[i].size < 1 || c.size_classes[i].count < 1) {
      fail("size classes need positive size and count");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (c.size_classes[j].size == c.size_classes[i].size) fail("repeated file size");
    }
  }
  if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) fail("gamma must be >= 0");
  if (c.users < 1) fail("users must be >= 1");
  if (c.horizon < 1) fail("horizon must be >= 1");
  if (c.burn_in < 0 || c.burn_in >= c.horizon) fail("burn_in must lie in [0, horizon)");
  for (auto t : c.checkpoints) {
    if (t < 1 || t > c.horizon) fail("checkpoint " + std::to_string(t) + " outside [1, horizon]");
  }
  if (c.replications < 1) fail("replications must be >= 1");
  if (c.parallelism < 0) fail("parallelism must be >= 0");
  if (!(c.oracle_timeout > 0.0)) fail("oracle_timeout must be positive");
  if (c.sweep_axis == SweepAxis::kNone) {
    if (!c.sweep_values.empty()) fail("sweep values given without a sweep axis");
  } else if (c.sweep_values.empty()) {
    fail("sweep axis '" + std::string(to_string(c.sweep_axis)) + "' has no values");
  }
  for (double v : c.sweep_values) {
    if (!std::isfinite(v)) fail("sweep values must be finite");
    switch (c.sweep_axis) {
      case SweepAxis::kGamma:
        if (v < 0.0) fail("gamma sweep values must be >= 0");
        break;
      case SweepAxis::kCacheSize:
        if (!(v > 0.0)) fail("cache_size sweep values are positive percentages");
        break;
      case SweepAxis::kUsers:
      case SweepAxis::kFiles:
        if (v < 1.0 || v != std::floor(v)) fail("users and files sweep values must be integers >= 1");
        break;
      case SweepAxis::kNone:
        break;
    }
  }
  if (c.sweep_axis == SweepAxis::kFiles && !(c.cache_fraction > 0.0)) {
    fail("cache_fraction must be positive");
  }
  for (const auto& p : sweep_points(c)) {
    const int s1 = largest(p.size_classes);
    if (p.cache_size < s1) {
      fail("cache size " + std::to_string(p.cache_size) + " is below the largest file size " +
           std::to_string(s1));
    }
  }
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  if (name == "fig1_convergence") {
    c.horizon = 5000;
    c.checkpoints = every(250, c.horizon);
    c.trace = true;
    c.policies = {policy("mcucb", PolicyType::kMcucb),
                  policy("eps_greedy", PolicyType::kEpsGreedy),
                  policy("iub_greedy", PolicyType::kIub, SolverKind::kGreedy),
                  policy("iub_bnb", PolicyType::kIub, SolverKind::kBranchAndBound)};
  } else if (name == "fig2_cucb_small") {
    c.size_classes = {{1, 20}, {3, 20}, {5, 20}, {7, 20}, {9, 20}};
    c.cache_size = 125;
    c.horizon = 5000;
    c.checkpoints = every(250, c.horizon);
    c.trace = true;
    c.policies = {policy("cucb", PolicyType::kCucb), policy("mcucb", PolicyType::kMcucb),
                  policy("eps_greedy", PolicyType::kEpsGreedy),
                  policy("iub", PolicyType::kIub, SolverKind::kBranchAndBound)};
  } else if (name == "fig3_gamma") {
    c.policies = sweep_policies();
    c.sweep_axis = SweepAxis::kGamma;
    for (int i = 0; i <= 12; ++i) c.sweep_values.push_back(i / 5.0);
  } else if (name == "fig4_cache") {
    c.policies = sweep_policies();
    c.sweep_axis = SweepAxis::kCacheSize;
    c.sweep_values = {1.0, 2.5, 5.0, 10.0, 20.0};
  } else if (name == "fig5_users") {
    c.policies = sweep_policies();
    c.sweep_axis = SweepAxis::kUsers;
    c.sweep_values = {1, 3, 5, 7, 10, 13, 20, 50, 100, 200};
  } else if (name == "fig6_files") {
    c.policies = sweep_policies();
    c.sweep_axis = SweepAxis::kFiles;
    c.sweep_values = {100, 250, 500, 1000, 2000};
  } else if (name == "spo_validation") {
    c.mode = ExperimentMode::kSpoValidation;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& c) {
  SweepPoint base;
  base.num_files = c.num_files();
  base.gamma = c.gamma;
  base.users = c.users;
  base.cache_size = c.cache_size;
  base.size_classes = c.size_classes;
  if (c.sweep_axis == SweepAxis::kNone) return {base};

  std::vector<SweepPoint> points;
  for (double v : c.sweep_values) {
    SweepPoint p = base;
    p.value = v;
    switch (c.sweep_axis) {
      case SweepAxis::kGamma:
        p.gamma = v;
        break;
      case SweepAxis::kCacheSize:
        p.cache_size = fraction_of(v / 100.0, total_size(c.size_classes));
        break;
      case SweepAxis::kUsers:
        p.users = static_cast<int>(v);
        break;
      case SweepAxis::kFiles:
        p.num_files = static_cast<int>(v);
        p.size_classes = spread(c.size_classes, p.num_files);
        p.cache_size = fraction_of(c.cache_fraction, total_size(p.size_classes));
        break;
      case SweepAxis::kNone:
        break;
    }
    points.push_back(std::move(p));
  }
  return points;
}

Scenario make_scenario(const ExperimentConfig& c, const SweepPoint& p) {
  Catalog catalog = build_catalog(p.size_classes, c.size_assignment, c.catalog_seed);
  PopularityProfile profile = zipf_profile(catalog.num_files(), p.gamma, p.users);
  return {std::move(catalog), std::move(profile), p.cache_size, c.horizon, c.burn_in,
          checkpoints_of(c)};
}

std::vector<PointOutcome> simulate(const ExperimentConfig& c) {
  validate(c);
  if (c.mode != ExperimentMode::kSimulation) {
    throw std::invalid_argument("simulate: config is not a simulation");
  }
  const std::uint64_t fp = fingerprint(c);
  const int threads = c.parallelism > 0
                          ? c.parallelism
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<PointOutcome> out;
  for (const auto& point : sweep_points(c)) {
    const Scenario sc = make_scenario(c, point);
    PointOutcome po;
    po.point = point;
    po.oracle = oracle_reference(sc.catalog, sc.profile, sc.capacity, Seconds(c.oracle_timeout));
    for (const auto& p : c.policies) {
      AggregateResult r = run_replications(sc, p.kind, po.oracle.per_period,
                                           c.effective_replications(), c.seed, threads);
      r.fingerprint = fp;
      po.policies.push_back({p.name, std::move(r)});
    }
    out.push_back(std::move(po));
  }
  return out;
}

std::vector<ResultRow> result_rows(const ExperimentConfig& c,
                                   const std::vector<PointOutcome>& outcomes) {
  std::vector<ResultRow> rows;
  for (const auto& po : outcomes) {
    const std::string sv = c.sweep_axis == SweepAxis::kNone ? "-" : fmt(po.point.value);
    for (const auto& p : po.policies) {
      const AggregateResult& r = p.result;
      auto row = [&](std::string metric, std::int64_t checkpoint, const MeanStderr& m) {
        rows.push_back({sv, p.policy, std::move(metric), checkpoint, m.mean, m.stderr_,
                        r.replications, r.master_seed});
      };
      row("hit_rate_pct", c.horizon, r.hit_rate_pct);
      for (std::size_t k = 0; k < r.checkpoints.size(); ++k) row("regret", r.checkpoints[k], r.regret[k]);
      for (std::size_t k = 0; k < r.checkpoints.size(); ++k) {
        row("acc_reward", r.checkpoints[k], r.acc_reward[k]);
      }
    }
  }
  return rows;
}

namespace {

std::vector<ResultRow> run_spo_mode(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const std::int64_t n = c.effective_spo_instances();
  const auto records = run_spo_study(n, Seconds(c.spo_timeout), c.seed);
  const SpoStudySummary s = summarize_spo_study(records);

  std::vector<double> skip;
  for (const auto& r : records) skip.push_back(r.bnb_value > 0 ? r.greedy_skip_value / r.bnb_value : 1.0);
  const MeanStderr skip_ms = mean_stderr(skip);

  std::vector<ResultRow> rows;
  auto row = [&](std::string policy, std::string metric, double mean, double se) {
    rows.push_back({"-", std::move(policy), std::move(metric), 0, mean, se, n, c.seed});
  };
  row("greedy", "value_ratio", s.mean_ratio, s.ratio_stderr);
  row("greedy", "min_ratio", s.min_ratio, 0.0);
  row("greedy", "delta_violations", static_cast<double>(s.delta_violations), 0.0);
  row("greedy_skip", "value_ratio", skip_ms.mean, skip_ms.stderr_);
  row("bnb", "optimal_fraction", s.optimal_fraction, 0.0);

  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  write_results_csv(csv, rows);
  write_file(dir / "results.csv", csv.str());
  write_file(dir / "config.echo", to_config_text(c));

  std::ostringstream timing;
  timing << "instances,median_greedy_seconds,median_bnb_seconds,median_speedup\n"
         << n << ',' << fmt(s.median_greedy_seconds) << ',' << fmt(s.median_bnb_seconds) << ','
         << fmt(s.median_speedup) << '\n';
  write_file(dir / "timing.csv", timing.str());

  if (c.plot) {
    std::map<int, std::pair<double, double>> by_f;  // F -> (greedy sum, skip sum)
    std::map<int, int> counts;
    for (const auto& r : records) {
      const double b = r.bnb_value > 0 ? r.bnb_value : 1.0;
      auto& acc = by_f[r.num_files];
      acc.first += r.bnb_value > 0 ? r.greedy_value / b : 1.0;
      acc.second += r.bnb_value > 0 ? r.greedy_skip_value / b : 1.0;
      ++counts[r.num_files];
    }
    Series g{"greedy", {}, {}}, k{"greedy_skip", {}, {}};
    for (const auto& [f, acc] : by_f) {
      g.x.push_back(f);
      k.x.push_back(f);
      g.y.push_back(acc.first / counts[f]);
      k.y.push_back(acc.second / counts[f]);
    }
    std::ostringstream svg;
    write_svg_chart(svg, c.name, "number of files F", "mean value / branch-and-bound value", {g, k});
    write_file(dir / ("plot_" + c.name + ".svg"), svg.str());
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& c) {
  validate(c);
  const std::filesystem::path dir(c.output_dir);
  if (c.mode == ExperimentMode::kSpoValidation) return run_spo_mode(c, dir);

  const auto outcomes = simulate(c);
  const auto rows = result_rows(c, outcomes);

  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  write_results_csv(csv, rows);
  write_file(dir / "results.csv", csv.str());
  write_file(dir / "config.echo", to_config_text(c));

  if (c.trace && c.sweep_axis == SweepAxis::kNone) {
    const auto& po = outcomes.front();
    for (const auto& p : po.policies) {
      const AggregateResult& r = p.result;
      std::ostringstream tr;
      tr << "period,expected_reward,realized_reward,demanded,acc_reward,regret\n";
      double acc = 0.0;
      for (std::size_t t = 0; t < r.expected_reward.size(); ++t) {
        acc += r.expected_reward[t];
        const double regret = static_cast<double>(t + 1) * r.oracle_per_period - acc;
        tr << t + 1 << ',' << fmt(r.expected_reward[t]) << ',' << fmt(r.realized_reward[t]) << ','
           << fmt(r.demanded[t]) << ',' << fmt(acc) << ',' << fmt(regret) << '\n';
      }
      write_file(dir / ("trace_" + p.policy + ".csv"), tr.str());
    }
  }

  if (c.plot) {
    std::vector<Series> series;
    std::string y_label;
    if (c.sweep_axis != SweepAxis::kNone) {
      y_label = "hit rate (%)";
      for (std::size_t k = 0; k < c.policies.size(); ++k) {
        Series s{c.policies[k].name, {}, {}};
        for (const auto& po : outcomes) {
          s.x.push_back(po.point.value);
          s.y.push_back(po.policies[k].result.hit_rate_pct.mean);
        }
        series.push_back(std::move(s));
      }
    } else {
      y_label = "accumulated expected reward";
      const auto& po = outcomes.front();
      for (const auto& p : po.policies) {
        Series s{p.policy, {}, {}};
        double acc = 0.0;
        for (std::size_t t = 0; t < p.result.expected_reward.size(); ++t) {
          acc += p.result.expected_reward[t];
          s.x.push_back(static_cast<double>(t + 1));
          s.y.push_back(acc);
        }
        series.push_back(std::move(s));
      }
    }
    std::ostringstream svg;
    write_svg_chart(svg, c.name, std::string(axis_label(c.sweep_axis)), y_label, series);
    write_file(dir / ("plot_" + c.name + ".svg"), svg.str());
  }
  return rows;
}

SpoInstance read_instance_csv(std::istream& in, std::int64_t capacity) {
  SpoInstance inst;
  inst.capacity = capacity;
  std::string line;
  int n = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(n) + ": expected value,weight");
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string vs = strip(line.substr(0, comma));
    const std::string ws = strip(line.substr(comma + 1));
    double value = 0.0;
    long long weight = 0;
    const auto rv = std::from_chars(vs.data(), vs.data() + vs.size(), value);
    const auto rw = std::from_chars(ws.data(), ws.data() + ws.size(), weight);
    const bool ok = rv.ec == std::errc() && rv.ptr == vs.data() + vs.size() &&
                    rw.ec == std::errc() && rw.ptr == ws.data() + ws.size();
    if (!ok) {
      if (first) {  // header
        first = false;
        continue;
      }
      throw std::invalid_argument("line " + std::to_string(n) + ": malformed row '" + line + "'");
    }
    first = false;
    if (weight < 0) throw std::invalid_argument("line " + std::to_string(n) + ": negative weight");
    if (weight == 0 || weight > std::numeric_limits<int>::max()) {
      throw std::invalid_argument("line " + std::to_string(n) + ": weight must be a positive int");
    }
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("line " + std::to_string(n) + ": value must be >= 0");
    }
    inst.values.push_back(value);
    inst.weights.push_back(static_cast<int>(weight));
  }
  if (capacity < 0) throw std::invalid_argument("capacity must be >= 0");
  return inst;
}

SpoSolution solve_with(const SpoInstance& inst, std::string_view solver, Seconds timeout) {
  if (solver == "greedy") return solve_greedy(inst);
  if (solver == "greedy_skip") return solve_greedy(inst, GreedyVariant::kSkipAndContinue);
  if (solver == "bnb") return solve_bnb(inst, timeout);
  if (solver == "bruteforce") return solve_bruteforce(inst);
  throw std::invalid_argument("unknown solver '" + std::string(solver) + "'");
}

void print_solution(std::ostream& out, const SpoSolution& s) {
  out << "indices:";
  for (int i : s.selected()) out << ' ' << i;
  out << '\n';
  out << "value: " << fmt(s.value) << '\n';
  out << "weight: " << s.weight << '\n';
  out << "status: " << to_string(s.status) << '\n';
  out << "alpha: " << fmt(s.alpha_guarantee) << '\n';
  out << "beta: " << fmt(s.beta_guarantee) << '\n';
  out << "nodes: " << s.nodes << '\n';
}

}  // namespace edgecache

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "edgecache/experiment.hpp"

namespace edgecache {

namespace pt = boost::property_tree;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  s = trim(s);
  if (s.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T number(std::string_view text, const std::string& key) {
  text = trim(text);
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad value for '" + key + "': '" + std::string(text) + "'");
  }
  return v;
}

bool boolean(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("bad boolean for '" + key + "': '" + std::string(text) + "'");
}

std::string_view to_string(SizeAssignment a) {
  return a == SizeAssignment::kRandom ? "random" : "round_robin";
}

SizeAssignment parse_assignment(std::string_view s) {
  if (s == "round_robin") return SizeAssignment::kRoundRobin;
  if (s == "random") return SizeAssignment::kRandom;
  throw std::invalid_argument("unknown size_assignment '" + std::string(s) + "'");
}

// Reads every key of a section, rejecting keys it does not know.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  const std::string* get(const std::string& key) {
    known_.push_back(key);
    for (const auto& [k, v] : tree_) {
      if (k == key) return &v.data();
    }
    return nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : tree_) {
      if (std::find(known_.begin(), known_.end(), k) == known_.end()) {
        throw std::invalid_argument("unknown key '" + k + "' in [" + name_ + "]");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
  std::vector<std::string> known_;
};

}  // namespace

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "name = " << c.name << '\n';
  out << "mode = " << to_string(c.mode) << '\n';
  out << "size_classes = ";
  for (std::size_t i = 0; i < c.size_classes.size(); ++i) {
    if (i) out << ',';
    out << c.size_classes[i].size << ':' << c.size_classes[i].count;
  }
  out << '\n';
  out << "size_assignment = " << to_string(c.size_assignment) << '\n';
  out << "catalog_seed = " << c.catalog_seed << '\n';
  out << "gamma = " << fmt(c.gamma) << '\n';
  out << "users = " << c.users << '\n';
  out << "cache_size = " << c.cache_size << '\n';
  out << "cache_fraction = " << fmt(c.cache_fraction) << '\n';
  out << "horizon = " << c.horizon << '\n';
  out << "burn_in = " << c.burn_in << '\n';
  out << "checkpoints = " << join(c.checkpoints) << '\n';
  out << "replications = " << c.replications << '\n';
  out << "scale = " << fmt(c.scale) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "parallelism = " << c.parallelism << '\n';
  out << "oracle_timeout = " << fmt(c.oracle_timeout) << '\n';
  out << "trace = " << (c.trace ? "true" : "false") << '\n';
  out << "plot = " << (c.plot ? "true" : "false") << '\n';
  out << "output_dir = " << c.output_dir << '\n';

  out << "\n[sweep]\n";
  out << "axis = " << to_string(c.sweep_axis) << '\n';
  out << "values = " << join(c.sweep_values) << '\n';

  out << "\n[spo_validation]\n";
  out << "instances = " << c.spo_instances << '\n';
  out << "timeout = " << fmt(c.spo_timeout) << '\n';

  for (const auto& p : c.policies) {
    out << "\n[policy." << p.name << "]\n";
    out << "type = " << to_string(p.kind.type) << '\n';
    out << "epsilon = " << fmt(p.kind.epsilon) << '\n';
    out << "gamma_hat = " << (p.kind.gamma_hat ? fmt(*p.kind.gamma_hat) : std::string("true")) << '\n';
    out << "fit_gamma = " << (p.kind.fit_gamma ? "true" : "false") << '\n';
    out << "solver = " << to_string(p.kind.solver) << '\n';
    out << "timeout = " << fmt(p.kind.timeout.count()) << '\n';
  }
  return out.str();
}

ExperimentConfig parse_config_text(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  ExperimentConfig c;
  c.policies.clear();
  bool seen_experiment = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key '" + section + "' outside a section");
    }
    if (section == "experiment") {
      seen_experiment = true;
      Section s(body, section);
      if (auto v = s.get("name")) c.name = *v;
      if (auto v = s.get("mode")) c.mode = parse_experiment_mode(trim(*v));
      if (auto v = s.get("size_classes")) {
        c.size_classes.clear();
        for (auto item : split(*v, ',')) {
          const auto colon = item.find(':');
          if (colon == std::string_view::npos) {
            throw std::invalid_argument("size_classes entries are size:count, got '" +
                                        std::string(item) + "'");
          }
          c.size_classes.push_back({number<int>(item.substr(0, colon), "size_classes"),
                                    number<int>(item.substr(colon + 1), "size_classes")});
        }
      }
      if (auto v = s.get("size_assignment")) c.size_assignment = parse_assignment(trim(*v));
      if (auto v = s.get("catalog_seed")) c.catalog_seed = number<std::uint64_t>(*v, "catalog_seed");
      if (auto v = s.get("gamma")) c.gamma = number<double>(*v, "gamma");
      if (auto v = s.get("users")) c.users = number<int>(*v, "users");
      if (auto v = s.get("cache_size")) c.cache_size = number<std::int64_t>(*v, "cache_size");
      if (auto v = s.get("cache_fraction")) c.cache_fraction = number<double>(*v, "cache_fraction");
      if (auto v = s.get("horizon")) c.horizon = number<std::int64_t>(*v, "horizon");
      if (auto v = s.get("burn_in")) c.burn_in = number<std::int64_t>(*v, "burn_in");
      if (auto v = s.get("checkpoints")) {
        c.checkpoints.clear();
        for (auto item : split(*v, ',')) c.checkpoints.push_back(number<std::int64_t>(item, "checkpoints"));
      }
      if (auto v = s.get("replications")) c.replications = number<std::int64_t>(*v, "replications");
      if (auto v = s.get("scale")) c.scale = number<double>(*v, "scale");
      if (auto v = s.get("seed")) c.seed = number<std::uint64_t>(*v, "seed");
      if (auto v = s.get("parallelism")) c.parallelism = number<int>(*v, "parallelism");
      if (auto v = s.get("oracle_timeout")) c.oracle_timeout = number<double>(*v, "oracle_timeout");
      if (auto v = s.get("trace")) c.trace = boolean(*v, "trace");
      if (auto v = s.get("plot")) c.plot = boolean(*v, "plot");
      if (auto v = s.get("output_dir")) c.output_dir = *v;
      s.finish();
    } else if (section == "sweep") {
      Section s(body, section);
      if (auto v = s.get("axis")) c.sweep_axis = parse_sweep_axis(trim(*v));
      if (auto v = s.get("values")) {
        c.sweep_values.clear();
        for (auto item : split(*v, ',')) c.sweep_values.push_back(number<double>(item, "values"));
      }
      s.finish();
    } else if (section == "spo_validation") {
      Section s(body, section);
      if (auto v = s.get("instances")) c.spo_instances = number<std::int64_t>(*v, "instances");
      if (auto v = s.get("timeout")) c.spo_timeout = number<double>(*v, "timeout");
      s.finish();
    } else if (section.starts_with("policy.")) {
      PolicySpec p;
      p.name = section.substr(7);
      if (p.name.empty()) throw std::invalid_argument("config: policy section without a name");
      Section s(body, section);
      const auto* type = s.get("type");
      p.kind.type = parse_policy_type(trim(type ? *type : p.name));
      if (auto v = s.get("epsilon")) p.kind.epsilon = number<double>(*v, "epsilon");
      if (auto v = s.get("gamma_hat"); v && trim(*v) != "true") {
        p.kind.gamma_hat = number<double>(*v, "gamma_hat");
      }
      if (auto v = s.get("fit_gamma")) p.kind.fit_gamma = boolean(*v, "fit_gamma");
      if (auto v = s.get("solver")) p.kind.solver = parse_solver_kind(trim(*v));
      if (auto v = s.get("timeout")) p.kind.timeout = Seconds(number<double>(*v, "timeout"));
      s.finish();
      c.policies.push_back(std::move(p));
    } else {
      throw std::invalid_argument("config: unknown section [" + section + "]");
    }
  }
  if (!seen_experiment) throw std::invalid_argument("config: missing [experiment] section");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::uint64_t fingerprint(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_config_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace edgecache

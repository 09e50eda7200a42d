#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "edgecache/experiment.hpp"
#include "edgecache/spo_study.hpp"

namespace py = pybind11;
using namespace edgecache;

namespace {

std::vector<SizeClass> to_classes(const std::vector<std::pair<int, int>>& classes) {
  std::vector<SizeClass> out;
  for (auto [size, count] : classes) out.push_back({size, count});
  return out;
}

SpoInstance to_instance(std::vector<double> values, std::vector<int> weights, std::int64_t capacity) {
  SpoInstance inst{std::move(values), std::move(weights), capacity};
  inst.validate();
  return inst;
}

py::dict solution_dict(const SpoSolution& s) {
  py::dict d;
  d["selected"] = s.selected();
  d["value"] = s.value;
  d["weight"] = s.weight;
  d["status"] = std::string(to_string(s.status));
  d["alpha"] = s.alpha_guarantee;
  d["beta"] = s.beta_guarantee;
  d["nodes"] = s.nodes;
  return d;
}

PolicyKind make_kind(const std::string& type, double epsilon, std::optional<double> gamma_hat,
                     bool fit_gamma, const std::string& solver, double timeout) {
  PolicyKind k;
  k.type = parse_policy_type(type);
  k.epsilon = epsilon;
  k.gamma_hat = gamma_hat;
  k.fit_gamma = fit_gamma;
  k.solver = parse_solver_kind(solver);
  k.timeout = Seconds(timeout);
  return k;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cache placement under unknown popularity: knapsack solvers, bandit policies, simulator";

  py::class_<Catalog>(m, "Catalog")
      .def_property_readonly("num_files", &Catalog::num_files)
      .def_property_readonly("total_size", &Catalog::total_size)
      .def_property_readonly("sizes", [](const Catalog& c) {
        return std::vector<int>(c.sizes().begin(), c.sizes().end());
      })
      .def_property_readonly("size_classes", &Catalog::size_classes)
      .def("__repr__", [](const Catalog& c) {
        return "<Catalog F=" + std::to_string(c.num_files()) +
               " total_size=" + std::to_string(c.total_size()) + ">";
      });

  m.def(
      "build_catalog",
      [](const std::vector<std::pair<int, int>>& classes, bool random_sizes, std::uint64_t seed) {
        const auto cl = to_classes(classes);
        return build_catalog(cl, random_sizes ? SizeAssignment::kRandom : SizeAssignment::kRoundRobin,
                             seed);
      },
      py::arg("classes"), py::arg("random_sizes") = false, py::arg("seed") = 0,
      "Catalog from (size, count) pairs; index order is popularity rank.");

  py::class_<PopularityProfile>(m, "PopularityProfile")
      .def_readonly("gamma", &PopularityProfile::gamma)
      .def_readonly("users", &PopularityProfile::users)
      .def_readonly("theta", &PopularityProfile::theta)
      .def_readonly("probs", &PopularityProfile::probs);

  m.def("zipf_profile", &zipf_profile, py::arg("num_files"), py::arg("gamma"), py::arg("users"));

  m.def(
      "sample_demands",
      [](const PopularityProfile& p, std::uint64_t seed, int periods) {
        Rng rng(seed);
        std::vector<std::vector<int>> out;
        for (int t = 0; t < periods; ++t) out.push_back(sample_demands(p, rng).counts);
        return out;
      },
      py::arg("profile"), py::arg("seed"), py::arg("periods") = 1);

  m.def(
      "solve_lp",
      [](std::vector<double> v, std::vector<int> w, std::int64_t capacity) {
        const auto lp = solve_lp(to_instance(std::move(v), std::move(w), capacity));
        py::dict d;
        d["x"] = lp.x;
        d["value"] = lp.value;
        d["frac_index"] = lp.frac_index;
        d["beta"] = lp.beta;
        return d;
      },
      py::arg("values"), py::arg("weights"), py::arg("capacity"));

  m.def(
      "solve",
      [](std::vector<double> v, std::vector<int> w, std::int64_t capacity, const std::string& solver,
         double timeout) {
        const auto inst = to_instance(std::move(v), std::move(w), capacity);
        SpoSolution s;
        {
          py::gil_scoped_release release;
          s = solve_with(inst, solver, Seconds(timeout));
        }
        return solution_dict(s);
      },
      py::arg("values"), py::arg("weights"), py::arg("capacity"), py::arg("solver") = "bnb",
      py::arg("timeout") = 50.0, "Solver is greedy, greedy_skip, bnb or bruteforce.");

  m.def("delta_bound", &delta_bound, py::arg("catalog"), py::arg("capacity"), py::arg("gamma"));
  m.def("cucb_index", &cucb_index, py::arg("mu_hat"), py::arg("placements"), py::arg("t"),
        py::arg("users"), py::arg("size"));
  m.def("mcucb_index", &mcucb_index, py::arg("mu_hat"), py::arg("placements"), py::arg("t"),
        py::arg("users"), py::arg("size"), py::arg("gamma_hat"), py::arg("num_files"));

  m.def(
      "run_episode",
      [](const std::string& policy, const Catalog& catalog, const PopularityProfile& profile,
         std::int64_t capacity, std::int64_t horizon, std::uint64_t seed, double epsilon,
         std::optional<double> gamma_hat, bool fit_gamma, const std::string& solver,
         std::int64_t burn_in) {
        const auto kind = make_kind(policy, epsilon, gamma_hat, fit_gamma, solver, 50.0);
        EpisodeTrace trace;
        {
          py::gil_scoped_release release;
          EpisodeOptions opts;
          opts.record_caches = false;
          trace = run_episode(kind, catalog, profile, capacity, horizon, seed, opts);
        }
        std::vector<double> expected, realized, demanded;
        for (const auto& r : trace.periods) {
          expected.push_back(r.expected);
          realized.push_back(static_cast<double>(r.realized));
          demanded.push_back(static_cast<double>(r.demanded));
        }
        py::dict d;
        d["expected"] = expected;
        d["realized"] = realized;
        d["demanded"] = demanded;
        d["acc_expected"] = trace.acc_expected;
        d["hit_rate"] = burn_in < horizon ? py::cast(hit_rate(trace, burn_in)) : py::none();
        return d;
      },
      py::arg("policy"), py::arg("catalog"), py::arg("profile"), py::arg("capacity"),
      py::arg("horizon"), py::arg("seed"), py::arg("epsilon") = 0.07,
      py::arg("gamma_hat") = py::none(), py::arg("fit_gamma") = false, py::arg("solver") = "greedy",
      py::arg("burn_in") = kDefaultBurnIn,
      "One seeded episode; per-period expected/realized reward and demanded bytes.");

  m.def(
      "oracle_reward",
      [](const Catalog& c, const PopularityProfile& p, std::int64_t capacity, double timeout) {
        return oracle_reference(c, p, capacity, Seconds(timeout)).per_period;
      },
      py::arg("catalog"), py::arg("profile"), py::arg("capacity"), py::arg("timeout") = 50.0);

  m.def("preset_names", [] {
    std::vector<std::string> out(std::begin(kPresetNames), std::end(kPresetNames));
    return out;
  });
  m.def("preset_text", [](const std::string& name) { return to_config_text(preset(name)); },
        py::arg("name"), "A preset rendered as config text.");

  m.def(
      "run_config",
      [](const std::string& text, std::optional<std::string> output_dir, std::optional<double> scale,
         std::optional<std::uint64_t> seed, bool plot) {
        ExperimentConfig c = parse_config_text(text);
        if (output_dir) c.output_dir = *output_dir;
        if (scale) c.scale = *scale;
        if (seed) c.seed = *seed;
        c.plot = plot;
        std::vector<ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment(c);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["sweep_value"] = r.sweep_value;
          d["policy"] = r.policy;
          d["metric"] = r.metric;
          d["checkpoint"] = r.checkpoint;
          d["mean"] = r.mean;
          d["stderr"] = r.stderr_;
          d["replications"] = r.replications;
          d["seed"] = r.seed;
          out.append(d);
        }
        return out;
      },
      py::arg("config_text"), py::arg("output_dir") = py::none(), py::arg("scale") = py::none(),
      py::arg("seed") = py::none(), py::arg("plot") = true,
      "Run an experiment config and write its files; returns the result rows.");

  py::register_exception<std::invalid_argument>(m, "ConfigError", PyExc_ValueError);
}

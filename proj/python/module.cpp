#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "lsb/adapt.hpp"
#include "lsb/diagnostics.hpp"
#include "lsb/exact.hpp"
#include "lsb/experiment.hpp"
#include "lsb/ising.hpp"
#include "lsb/uai.hpp"

namespace py = pybind11;
using namespace lsb;

namespace {

// Tagged balancing function usable from python: fixed kind, lsb1 or lsb2.
struct PyBalancing {
  BalancingSpec spec;
  std::shared_ptr<BalancingFunction> fn;

  explicit PyBalancing(BalancingSpec s) : spec(std::move(s)), fn(make_balancing(spec)) {}
};

PyBalancing make_fixed(const std::string& name) {
  for (FixedBalancingKind k : kFixedKinds) {
    if (name == fixed_kind_name(k)) return PyBalancing(k);
  }
  throw InvalidInputError("unknown fixed balancing function: " + name);
}

DiscreteState to_state(const std::vector<int>& values) { return DiscreteState(values); }

}  // namespace

PYBIND11_MODULE(pylsb, m) {
  m.doc() = "locally self-balancing discrete MCMC";

  py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "UaiParseError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);

  py::class_<TargetModel>(m, "TargetModel")
      .def("num_vars", &TargetModel::num_vars)
      .def("cardinality", &TargetModel::cardinality)
      .def("log_prob",
           [](const TargetModel& t, const std::vector<int>& x) { return t.log_prob(to_state(x)); })
      .def("delta_log_prob", [](const TargetModel& t, const std::vector<int>& x, int var,
                                int value) { return t.delta_log_prob(to_state(x), var, value); });

  py::class_<IsingModel, TargetModel>(m, "IsingModel")
      .def(py::init<int, double, std::vector<double>>(), py::arg("n"), py::arg("lam"),
           py::arg("alpha"))
      .def_property_readonly("side", &IsingModel::side)
      .def_property_readonly("lam", &IsingModel::lambda)
      .def_property_readonly("alpha", &IsingModel::alpha);

  py::class_<FactorGraphModel, TargetModel>(m, "FactorGraphModel")
      .def_property_readonly("source", &FactorGraphModel::source);

  m.def("square_ground_truth", &square_ground_truth, py::arg("n"));
  m.def(
      "generate_observation",
      [](double mu, double sigma, const std::vector<int>& ground_truth, std::uint64_t seed) {
        return generate_observation({mu, sigma, ground_truth, seed});
      },
      py::arg("mu"), py::arg("sigma"), py::arg("ground_truth"), py::arg("seed"));

  m.def("parse_uai", &parse_uai, py::arg("path"));
  m.def("serialize_uai", py::overload_cast<const FactorGraphModel&>(&serialize_uai),
        py::arg("model"));

  py::class_<PyBalancing>(m, "Balancing")
      .def_static("fixed", &make_fixed, py::arg("name"))
      .def_static(
          "lsb1",
          [](const std::vector<double>& theta) {
            if (theta.size() != 4) throw InvalidInputError("lsb1 expects 4 parameters");
            return PyBalancing(Lsb1Params({theta[0], theta[1], theta[2], theta[3]}));
          },
          py::arg("theta"))
      .def_static(
          "lsb2",
          [](int blocks, int units, std::uint64_t seed) {
            Rng rng(seed);
            return PyBalancing(MonotonicNet(blocks, units, rng));
          },
          py::arg("blocks") = 20, py::arg("units") = 20, py::arg("seed") = 0)
      .def_static("load", [](const std::string& path) { return PyBalancing(load_balancing_file(path)); })
      .def("save", [](const PyBalancing& b, const std::string& path) { save_balancing(path, b.spec); })
      .def("log_g", [](const PyBalancing& b, double delta) { return b.fn->log_g(delta); })
      .def("param_count", [](const PyBalancing& b) { return b.fn->param_count(); });

  m.def(
      "build_proposal",
      [](const TargetModel& target, const std::vector<int>& x, const PyBalancing& g) {
        ProposalTable t = build_proposal(target, to_state(x), *g.fn);
        std::vector<std::pair<int, int>> moves;
        for (const Move& mv : t.moves) moves.emplace_back(mv.variable, mv.new_value);
        return py::make_tuple(moves, t.log_weights, t.log_z);
      },
      py::arg("target"), py::arg("state"), py::arg("g"));

  m.def(
      "run_chain",
      [](const TargetModel& target, const PyBalancing& g, const std::vector<int>& init,
         std::int64_t iters, std::uint64_t seed) {
        DiscreteState state = to_state(init);
        Rng rng(seed);
        ChainTrace trace = run_chain(target, *g.fn, state, iters, rng);
        std::vector<int> accepted(trace.accepted.begin(), trace.accepted.end());
        return py::make_tuple(trace.logp, accepted, state.values);
      },
      py::arg("target"), py::arg("g"), py::arg("init"), py::arg("iters"), py::arg("seed"));

  m.def(
      "train",
      [](const TargetModel& target, const std::string& kind, int iters, int batch, double eta,
         double momentum, int reg_draws, std::uint64_t seed) {
        TrainConfig cfg;
        cfg.iters = iters;
        cfg.batch = batch;
        cfg.eta = eta;
        cfg.momentum = momentum;
        cfg.reg_draws = reg_draws;
        std::unique_ptr<TrainableBalancing> theta;
        if (kind == "lsb1") {
          theta = std::make_unique<Lsb1Trainable>();
        } else if (kind == "lsb2") {
          Rng net_rng(derive_seed(seed, 0x6e6574));
          theta = std::make_unique<Lsb2Trainable>(MonotonicNet(20, 20, net_rng));
        } else {
          throw InvalidInputError("trainable kind must be lsb1 or lsb2");
        }
        TrainResult r = train(target, *theta, cfg, seed);
        std::vector<double> j_hat, mean_logp;
        for (const TrainTraceRow& row : r.trace) {
          j_hat.push_back(row.j_hat);
          mean_logp.push_back(row.mean_logp);
        }
        return py::make_tuple(PyBalancing(theta->spec()), j_hat, mean_logp, r.skipped_samples,
                              r.total_samples);
      },
      py::arg("target"), py::arg("kind"), py::arg("iters") = 500, py::arg("batch") = 5,
      py::arg("eta") = 1e-4, py::arg("momentum") = 0.9, py::arg("reg_draws") = 4,
      py::arg("seed") = 0);

  m.def(
      "autocorrelation",
      [](const std::vector<double>& trace, int max_lag) {
        return autocorrelation(trace, max_lag).rho;
      },
      py::arg("trace"), py::arg("max_lag"));

  m.def(
      "effective_sample_size",
      [](const std::vector<double>& trace, int normalize_per, int max_lag) {
        EssResult r = effective_sample_size(trace, normalize_per, max_lag);
        return py::make_tuple(r.ess, r.ess_per, r.tau, r.trunc_lag);
      },
      py::arg("trace"), py::arg("normalize_per") = 1000, py::arg("max_lag") = -1);

  m.def("exact_distribution", &exact_distribution, py::arg("target"));
  m.def("tv_distance", &tv_distance, py::arg("p"), py::arg("q"));

  m.def(
      "exact_transition_matrix",
      [](const TargetModel& target, const PyBalancing& g) {
        TransitionMatrix t = exact_transition_matrix(target, *g.fn);
        std::vector<std::vector<double>> rows(t.size);
        for (int i = 0; i < t.size; ++i)
          rows[i].assign(t.values.begin() + static_cast<std::ptrdiff_t>(i) * t.size,
                         t.values.begin() + static_cast<std::ptrdiff_t>(i + 1) * t.size);
        return rows;
      },
      py::arg("target"), py::arg("g"));
}

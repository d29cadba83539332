#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgame/errors.hpp"
#include "qgame/games.hpp"
#include "qgame/linalg.hpp"
#include "qgame/measurement.hpp"
#include "qgame/transforms.hpp"
#include "qgame/valuation.hpp"
#include "qgame/verifier.hpp"
#include "qgame/version.hpp"

namespace py = pybind11;
using namespace qgame;

namespace {

RealMap to_real_map(const std::map<double, double>& entries) {
  std::vector<std::pair<double, double>> pairs(entries.begin(), entries.end());
  return RealMap(std::move(pairs));
}

std::map<double, double> from_entries(
    const std::vector<std::pair<double, double>>& entries) {
  return {entries.begin(), entries.end()};
}

ValueFunction parse_vf(const std::string& name) {
  const auto vf = ValueFunction::parse(name);
  if (!vf)
    throw ValidationError("UnknownValueFunction",
                          "expected born, branch-count, or weight-power:<alpha>");
  return *vf;
}

py::dict check_to_dict(const Check& c) {
  py::dict d;
  d["description"] = c.description;
  d["lhs"] = c.lhs;
  d["rhs"] = c.rhs;
  d["tol"] = c.tol;
  d["apart"] = c.apart;
  d["pass"] = c.pass;
  return d;
}

py::dict stage_to_dict(const StageReport& r) {
  py::dict d;
  d["stage"] = r.stage;
  d["params"] = r.params;
  d["pass"] = r.pass;
  py::list checks;
  for (const Check& c : r.checks) checks.append(check_to_dict(c));
  d["checks"] = checks;
  return d;
}

py::dict axiom_report_to_dict(const AxiomReport& r) {
  py::dict d;
  d["axiom"] = r.axiom;
  d["value_function"] = r.value_function;
  d["pass"] = r.pass;
  d["instances_checked"] = r.instances_checked;
  d["max_violation"] = r.max_violation;
  if (r.witness) {
    py::dict w;
    w["instance"] = r.witness->instance;
    w["description"] = r.witness->description;
    w["lhs"] = r.witness->lhs;
    w["rhs"] = r.witness->rhs;
    d["witness"] = w;
  } else {
    d["witness"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_qgame, m) {
  m.doc() = "Decision games on quantum measurements: weight maps, canonical "
            "forms, branching, value-function audits, and the staged verifier.";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "QgameError", PyExc_ValueError);

  py::class_<StateVector>(m, "StateVector")
      .def(py::init<Vector>(), py::arg("amplitudes"),
           "Wrap a unit-norm complex amplitude vector.")
      .def_static("normalized", &StateVector::normalized, py::arg("amplitudes"),
                  "Normalize and wrap; rejects near-zero vectors.")
      .def_static("basis", &StateVector::basis, py::arg("dim"), py::arg("index"))
      .def_static("uniform", &StateVector::uniform, py::arg("dim"))
      .def_property_readonly("dim", &StateVector::dim)
      .def_property_readonly("amplitudes",
                             [](const StateVector& s) { return s.vec(); })
      .def("__repr__", [](const StateVector& s) {
        return "StateVector(dim=" + std::to_string(s.dim()) + ")";
      });

  py::class_<HermitianOperator>(m, "HermitianOperator")
      .def(py::init<Matrix>(), py::arg("matrix"))
      .def_static("diagonal", &HermitianOperator::diagonal, py::arg("values"))
      .def_property_readonly("dim", &HermitianOperator::dim)
      .def_property_readonly("matrix",
                             [](const HermitianOperator& x) { return x.mat(); })
      .def_property_readonly("eigenvalues", [](const HermitianOperator& x) {
        return spectral_decompose(x).eigenvalues;
      })
      .def("__repr__", [](const HermitianOperator& x) {
        return "HermitianOperator(dim=" + std::to_string(x.dim()) + ")";
      });

  py::class_<Game>(m, "Game")
      .def(py::init([](const StateVector& state, const HermitianOperator& x,
                       const std::map<double, double>& payoff) {
             return Game(state, x, to_real_map(payoff));
           }),
           py::arg("state"), py::arg("observable"), py::arg("payoff"),
           "A bet on one measurement: payoff maps each eigenvalue to cash.")
      .def_property_readonly("state", &Game::state)
      .def_property_readonly("observable", &Game::observable)
      .def_property_readonly("payoff",
                             [](const Game& g) {
                               return from_entries(g.payoff().entries());
                             })
      .def_property_readonly("dim", &Game::dim)
      .def("__repr__", [](const Game& g) {
        return "Game(dim=" + std::to_string(g.dim()) + ")";
      });

  m.def("weight_map",
        [](const Game& g) { return from_entries(weight_map(g).entries()); },
        py::arg("game"), "Payoff value -> total branch weight.");
  m.def("expected_utility", [](const Game& g) { return expected_utility(g); },
        py::arg("game"));
  m.def("born_value", [](const Game& g) { return born_value(g); },
        py::arg("game"));
  m.def("canonicalize", [](const Game& g) { return canonicalize(g); },
        py::arg("game"),
        "Reduced form: ascending payoffs on a diagonal observable with "
        "square-root-weight amplitudes.");
  m.def("equivalent",
        [](const Game& a, const Game& b, double value_tol) {
          return equivalent(a, b, value_tol);
        },
        py::arg("a"), py::arg("b"), py::arg("value_tol") = kValueTol,
        "True when the games induce the same weight map.");
  m.def("same_canonical_form",
        [](const Game& a, const Game& b, double amp_tol) {
          return same_canonical_form(a, b, amp_tol);
        },
        py::arg("a"), py::arg("b"), py::arg("amp_tol") = kValueTol);
  m.def("distribution_distance",
        [](const Game& a, const Game& b) {
          return distribution_distance(weight_map(a), weight_map(b));
        },
        py::arg("a"), py::arg("b"),
        "Max weight difference over the union of payoff values.");

  m.def("payoff_equivalence",
        [](const Game& g, const std::map<double, double>& relabel) {
          return payoff_equivalence(g, to_real_map(relabel));
        },
        py::arg("game"), py::arg("relabel"),
        "Relabel the spectrum; payoffs follow, the weight map stays fixed.");

  py::class_<ValueFunction>(m, "ValueFunction")
      .def(py::init(&parse_vf), py::arg("name"),
           "One of: born, branch-count, weight-power:<alpha>.")
      .def_property_readonly("name", &ValueFunction::name)
      .def("value", [](const ValueFunction& vf, const Game& g) { return vf(g); },
           py::arg("game"))
      .def("__call__",
           [](const ValueFunction& vf, const Game& g) { return vf(g); },
           py::arg("game"))
      .def("__repr__", [](const ValueFunction& vf) {
        return "ValueFunction('" + vf.name() + "')";
      });

  m.def("axiom_ids", []() {
    std::vector<std::string> ids;
    for (Axiom a : all_axioms()) ids.emplace_back(axiom_id(a));
    return ids;
  });

  m.def("audit",
        [](const std::string& value_function, int corpus_size,
           std::uint64_t seed) {
          const ValueFunction vf = parse_vf(value_function);
          const auto corpus = random_corpus(corpus_size, seed);
          py::list reports;
          for (Axiom a : all_axioms())
            reports.append(axiom_report_to_dict(check_axiom(vf, a, corpus, seed)));
          return reports;
        },
        py::arg("value_function"), py::arg("corpus_size") = 50,
        py::arg("seed") = 0,
        "Check every axiom against a seeded random corpus; one dict per axiom.");

  m.def("verify",
        [](const std::string& stage, std::uint64_t seed) {
          return stage_to_dict(verify_stage(stage, StageParams{}, seed));
        },
        py::arg("stage"), py::arg("seed") = 7);
  m.def("verify_all",
        [](std::uint64_t seed) {
          py::list reports;
          for (const StageReport& r : verify_all(StageParams{}, seed))
            reports.append(stage_to_dict(r));
          return reports;
        },
        py::arg("seed") = 7, "Run every verification stage with defaults.");
  m.def("stage_ids", []() { return stage_ids(); });

  m.attr("__all__") = py::make_tuple(
      "StateVector", "HermitianOperator", "Game", "ValueFunction", "weight_map",
      "expected_utility", "born_value", "canonicalize", "equivalent",
      "same_canonical_form", "distribution_distance", "payoff_equivalence",
      "axiom_ids", "audit", "verify", "verify_all", "stage_ids", "QgameError",
      "__version__");
}

#include "qgame/serialize.hpp"

#include <fstream>
#include <utility>

#include "qgame/errors.hpp"
#include "qgame/tolerances.hpp"

namespace qgame {

namespace {

ValidationError doc_error(const std::string& path, const std::string& what) {
  return ValidationError("BadDocument", path + ": " + what);
}

double require_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw doc_error(path, "expected a number");
  return j.get<double>();
}

Complex require_complex(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw doc_error(path, "expected an [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

Matrix observable_from_document(const Json& obs, int dim) {
  Matrix x = Matrix::Zero(dim, dim);
  if (obs.contains("matrix")) {
    const Json& m = obs["matrix"];
    if (!m.is_array() || static_cast<int>(m.size()) != dim)
      throw doc_error("observable.matrix", "expected " + std::to_string(dim) + " rows");
    for (int i = 0; i < dim; ++i) {
      const Json& row = m[i];
      const std::string rpath = "observable.matrix[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        throw doc_error(rpath, "expected " + std::to_string(dim) + " entries");
      for (int j = 0; j < dim; ++j)
        x(i, j) = require_complex(row[j], rpath + "[" + std::to_string(j) + "]");
    }
    return x;
  }
  if (!obs.contains("spectral"))
    throw doc_error("observable", "expected either \"matrix\" or \"spectral\"");

  const Json& sp = obs["spectral"];
  if (!sp.is_object() || !sp.contains("eigenvalues") || !sp.contains("projector_bases"))
    throw doc_error("observable.spectral",
                    "expected {\"eigenvalues\": [...], \"projector_bases\": [...]}");
  const Json& evs = sp["eigenvalues"];
  const Json& bases = sp["projector_bases"];
  if (!evs.is_array() || evs.empty())
    throw doc_error("observable.spectral.eigenvalues", "expected a non-empty list");
  if (!bases.is_array() || bases.size() != evs.size())
    throw doc_error("observable.spectral.projector_bases",
                    "expected one basis per eigenvalue");

  Matrix all = Matrix::Zero(dim, dim);
  int col = 0;
  for (std::size_t k = 0; k < evs.size(); ++k) {
    const double lambda =
        require_number(evs[k], "observable.spectral.eigenvalues[" + std::to_string(k) + "]");
    const Json& basis = bases[k];
    const std::string bpath =
        "observable.spectral.projector_bases[" + std::to_string(k) + "]";
    if (!basis.is_array() || basis.empty())
      throw doc_error(bpath, "expected a non-empty list of vectors");
    for (std::size_t v = 0; v < basis.size(); ++v) {
      const Json& vec = basis[v];
      const std::string vpath = bpath + "[" + std::to_string(v) + "]";
      if (!vec.is_array() || static_cast<int>(vec.size()) != dim)
        throw doc_error(vpath, "expected " + std::to_string(dim) + " [re, im] pairs");
      if (col >= dim)
        throw doc_error("observable.spectral.projector_bases",
                        "basis vectors must total exactly dim");
      for (int i = 0; i < dim; ++i)
        all(i, col) = require_complex(vec[i], vpath + "[" + std::to_string(i) + "]");
      Vector column = all.col(col);
      x += lambda * (column * column.adjoint());
      ++col;
    }
  }
  if (col != dim)
    throw doc_error("observable.spectral.projector_bases",
                    "basis vectors must total exactly dim");
  const double ortho_dev =
      (all.adjoint() * all - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (ortho_dev > kIsometryTol)
    throw doc_error("observable.spectral.projector_bases",
                    "combined basis vectors deviate from orthonormality by " +
                        std::to_string(ortho_dev) + ", beyond ISOMETRY_TOL 1e-9");
  return x;
}

}  // namespace

Json game_to_document(const Game& g) {
  Json doc;
  doc["dim"] = g.dim();
  Json state = Json::array();
  for (int i = 0; i < g.dim(); ++i)
    state.push_back(complex_to_json(g.state().amplitude(i)));
  doc["state"] = std::move(state);

  Json rows = Json::array();
  for (int i = 0; i < g.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < g.dim(); ++j)
      row.push_back(complex_to_json(g.observable().mat()(i, j)));
    rows.push_back(std::move(row));
  }
  doc["observable"] = Json{{"matrix", std::move(rows)}};

  Json payoff = Json::array();
  for (const auto& [key, value] : g.payoff().entries())
    payoff.push_back(Json{{"eigenvalue", key}, {"value", value}});
  doc["payoff"] = std::move(payoff);
  return doc;
}

Game game_from_document(const Json& doc) {
  if (!doc.is_object()) throw doc_error("document", "expected a JSON object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer())
    throw doc_error("dim", "expected an integer");
  const int dim = doc["dim"].get<int>();
  if (dim < 1 || dim > 64) throw doc_error("dim", "must lie in [1, 64]");

  if (!doc.contains("state") || !doc["state"].is_array())
    throw doc_error("state", "expected a list of [re, im] pairs");
  const Json& st = doc["state"];
  if (static_cast<int>(st.size()) != dim)
    throw doc_error("state", "expected exactly " + std::to_string(dim) + " entries");
  Vector amps(dim);
  for (int i = 0; i < dim; ++i)
    amps(i) = require_complex(st[i], "state[" + std::to_string(i) + "]");

  if (!doc.contains("observable") || !doc["observable"].is_object())
    throw doc_error("observable", "expected an object");
  Matrix x = observable_from_document(doc["observable"], dim);

  if (!doc.contains("payoff") || !doc["payoff"].is_array())
    throw doc_error("payoff", "expected a list of {eigenvalue, value} entries");
  const Json& pay = doc["payoff"];
  std::vector<std::pair<double, double>> entries;
  for (std::size_t i = 0; i < pay.size(); ++i) {
    const std::string ppath = "payoff[" + std::to_string(i) + "]";
    const Json& e = pay[i];
    if (!e.is_object() || !e.contains("eigenvalue") || !e.contains("value"))
      throw doc_error(ppath, "expected {\"eigenvalue\": x, \"value\": v}");
    const double key = require_number(e["eigenvalue"], ppath + ".eigenvalue");
    const double value = require_number(e["value"], ppath + ".value");
    for (const auto& [seen, unused] : entries) {
      (void)unused;
      if (std::abs(seen - key) <= kPayoffTol)
        throw doc_error(ppath + ".eigenvalue", "duplicate eigenvalue");
    }
    entries.emplace_back(key, value);
  }

  return Game(StateVector(std::move(amps)), HermitianOperator(std::move(x)),
              RealMap(std::move(entries)));
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("FileError", "cannot read '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("ParseError", path + ": " + e.what());
  }
  return game_from_document(doc);
}

void save_game(const Game& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("FileError", "cannot write '" + path + "'");
  out << dump_document(game_to_document(g));
}

Json to_json(const Check& c) {
  return Json{{"description", c.description}, {"kind", c.apart ? "apart" : "close"},
              {"lhs", c.lhs},                 {"rhs", c.rhs},
              {"tol", c.tol},                 {"pass", c.pass}};
}

Json to_json(const StageReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return Json{{"stage", r.stage},
              {"params", r.params},
              {"checks", std::move(checks)},
              {"pass", r.pass}};
}

Json to_json(const AxiomWitness& w) {
  return Json{{"instance", w.instance},
              {"description", w.description},
              {"lhs", w.lhs},
              {"rhs", w.rhs}};
}

Json to_json(const AxiomReport& r) {
  Json j{{"axiom", r.axiom},
         {"value_function", r.value_function},
         {"pass", r.pass},
         {"instances_checked", r.instances_checked},
         {"max_violation", r.max_violation}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

Json report_document(const std::string& command, std::uint64_t seed,
                     double value_tol, Json results) {
  return Json{{"command", command},
              {"version", kVersion},
              {"seed", seed},
              {"tolerances", Json{{"herm", kHermTol},
                                  {"norm", kNormTol},
                                  {"payoff", kPayoffTol},
                                  {"value", value_tol},
                                  {"weight", kWeightEps}}},
              {"results", std::move(results)}};
}

std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace qgame

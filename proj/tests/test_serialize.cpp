#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

#include "doctest.h"
#include "qgame/serialize.hpp"
#include "qgame/verifier.hpp"
#include "support/oracles.hpp"

using namespace qgame;
using testsupport::thrown_code;

namespace {

std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

Game frozen_game() {
  Vector amps(2);
  amps << 0.6, Complex(0.0, 0.8);
  return Game(StateVector(amps), HermitianOperator::diagonal({1.0, 2.0}),
              RealMap({{1.0, 5.0}, {2.0, 7.0}}));
}

Json valid_document() { return game_to_document(frozen_game()); }

}  // namespace

TEST_CASE("game documents round-trip") {
  const Game g = frozen_game();
  const Json doc = game_to_document(g);
  CHECK(doc["dim"] == 2);
  CHECK(doc["state"].size() == 2);
  CHECK(doc["state"][1][1] == doctest::Approx(0.8));
  CHECK(doc["observable"].contains("matrix"));
  CHECK(doc["payoff"][0]["eigenvalue"] == doctest::Approx(1.0));
  CHECK(doc["payoff"][0]["value"] == doctest::Approx(5.0));

  const Game back = game_from_document(doc);
  CHECK(equivalent(g, back));
  CHECK(same_canonical_form(canonicalize(g), canonicalize(back)));
  CHECK((back.state().vec() - g.state().vec()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("spectral observables reconstruct from projector bases") {
  const double r = 1.0 / std::sqrt(3.0);
  const Json doc{
      {"dim", 3},
      {"state", {{r, 0.0}, {r, 0.0}, {r, 0.0}}},
      {"observable",
       {{"spectral",
         {{"eigenvalues", {1.0, 2.0}},
          {"projector_bases",
           {{{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
             {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}},
            {{{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}}}}}}}},
      {"payoff",
       {{{"eigenvalue", 1.0}, {"value", 1.0}}, {{"eigenvalue", 2.0}, {"value", 2.0}}}}};

  const Game g = game_from_document(doc);
  CHECK(weight_map(g).weight_of(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(weight_map(g).weight_of(2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Repeating a basis vector breaks orthonormality.
  Json broken = doc;
  broken["observable"]["spectral"]["projector_bases"][0][1] =
      Json{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  CHECK(thrown_message([&] { game_from_document(broken); })
            .find("ISOMETRY_TOL") != std::string::npos);

  // One basis vector short of spanning.
  Json thin = doc;
  thin["observable"]["spectral"]["projector_bases"][0].erase(1);
  CHECK(thrown_message([&] { game_from_document(thin); })
            .find("exactly dim") != std::string::npos);
}

TEST_CASE("document errors name the offending field") {
  Json doc = valid_document();
  doc.erase("dim");
  CHECK(thrown_message([&] { game_from_document(doc); }).find("dim:") !=
        std::string::npos);

  doc = valid_document();
  doc["dim"] = 65;
  CHECK(thrown_message([&] { game_from_document(doc); }).find("[1, 64]") !=
        std::string::npos);

  doc = valid_document();
  doc["state"].erase(1);
  CHECK(thrown_code([&] { game_from_document(doc); }) == "BadDocument");

  doc = valid_document();
  doc["state"][1] = "oops";
  CHECK(thrown_message([&] { game_from_document(doc); }).find("state[1]") !=
        std::string::npos);

  doc = valid_document();
  doc["observable"]["matrix"][0].erase(1);
  CHECK(thrown_message([&] { game_from_document(doc); })
            .find("observable.matrix[0]") != std::string::npos);

  doc = valid_document();
  doc["payoff"][1]["eigenvalue"] = 1.0;
  CHECK(thrown_message([&] { game_from_document(doc); })
            .find("payoff[1].eigenvalue") != std::string::npos);

  doc = valid_document();
  doc["payoff"][0].erase("value");
  CHECK(thrown_message([&] { game_from_document(doc); }).find("payoff[0]") !=
        std::string::npos);
}

TEST_CASE("construction failures surface the library tolerances") {
  Json doc = valid_document();
  doc["state"][0] = Json{0.9, 0.0};  // norm 0.81 + 0.64 != 1
  CHECK(thrown_code([&] { game_from_document(doc); }) == "NotNormalized");
  CHECK(thrown_message([&] { game_from_document(doc); }).find("NORM_TOL") !=
        std::string::npos);

  doc = valid_document();
  doc["observable"]["matrix"][0][1] = Json{0.5, 0.0};
  CHECK(thrown_code([&] { game_from_document(doc); }) == "NotHermitian");
}

TEST_CASE("games load and save through files") {
  const std::string path = "/tmp/qgame_test_roundtrip.json";
  save_game(frozen_game(), path);
  const Game loaded = load_game(path);
  CHECK(equivalent(loaded, frozen_game()));
  std::remove(path.c_str());

  CHECK(thrown_code([] { load_game("/tmp/qgame_test_missing.json"); }) ==
        "FileError");

  const std::string bad = "/tmp/qgame_test_bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(thrown_code([&] { load_game(bad); }) == "ParseError");
  std::remove(bad.c_str());
}

TEST_CASE("report fragments serialize with stable shapes") {
  const Json c = to_json(apart_check("sides differ", 1.0, 2.0, 0.5));
  CHECK(c["kind"] == "apart");
  CHECK(c["pass"] == true);
  CHECK(c["lhs"] == 1.0);
  CHECK(c["tol"] == 0.5);

  AxiomReport ar;
  ar.axiom = "physicality";
  ar.value_function = "weight-power:2";
  ar.pass = false;
  ar.instances_checked = 1;
  ar.max_violation = 0.15;
  ar.witness = AxiomWitness{"uneven-split", "values differ", 0.9, 0.75};
  const Json aj = to_json(ar);
  CHECK(aj["axiom"] == "physicality");
  CHECK(aj["witness"]["instance"] == "uneven-split");
  CHECK(aj["witness"]["lhs"] == 0.9);

  const Json doc = report_document("verify", 7, 1e-6, Json::array());
  CHECK(doc["command"] == "verify");
  CHECK(doc["version"] == kVersion);
  CHECK(doc["seed"] == 7);
  CHECK(doc["tolerances"]["value"] == 1e-6);
  CHECK(doc["tolerances"]["norm"] == kNormTol);
  CHECK(doc["results"].is_array());
}

TEST_CASE("document dumps are deterministic and key-sorted") {
  const Json doc = report_document("demo", 0, kValueTol,
                                   Json::array({to_json(device_pair_demo(10))}));
  const std::string once = dump_document(doc);
  const std::string twice = dump_document(doc);
  CHECK(once == twice);
  CHECK(once.back() == '\n');
  // nlohmann objects iterate in key order, so "command" precedes "results".
  CHECK(once.find("\"command\"") < once.find("\"results\""));
}

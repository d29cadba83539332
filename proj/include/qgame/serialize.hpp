#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "qgame/games.hpp"
#include "qgame/valuation.hpp"
#include "qgame/verifier.hpp"
#include "qgame/version.hpp"

namespace qgame {

using Json = nlohmann::json;

// Game documents: {dim, state: [[re,im],...], observable: {"matrix": ...} or
// {"spectral": {"eigenvalues": [...], "projector_bases": [[[re,im],...],...]}},
// payoff: [{"eigenvalue": x, "value": v}, ...]}. Complex numbers are always
// two-element [re, im] arrays.
Json game_to_document(const Game& g);

// Throws ValidationError naming the offending field path.
Game game_from_document(const Json& doc);

Game load_game(const std::string& path);
void save_game(const Game& g, const std::string& path);

// Report fragments.
Json to_json(const Check& c);
Json to_json(const StageReport& r);
Json to_json(const AxiomWitness& w);
Json to_json(const AxiomReport& r);

// Stable top-level report schema. `results` is an array sorted by the caller.
Json report_document(const std::string& command, std::uint64_t seed,
                     double value_tol, Json results);

// Two-space indent, sorted keys, trailing newline; byte-stable across runs.
std::string dump_document(const Json& doc);

}  // namespace qgame

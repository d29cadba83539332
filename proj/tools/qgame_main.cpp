#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qgame/errors.hpp"
#include "qgame/serialize.hpp"
#include "qgame/valuation.hpp"
#include "qgame/verifier.hpp"

namespace {

using namespace qgame;

// Exit contract: 0 success or expected profile, 1 internal error,
// 2 input error, 3 verification/audit mismatch.
constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kInput = 2;
constexpr int kMismatch = 3;

void emit(const Json& doc, const std::string& output, const std::string& summary) {
  if (output.empty()) {
    std::cout << dump_document(doc);
    return;
  }
  std::ofstream out(output);
  if (!out) throw ValidationError("FileError", "cannot write '" + output + "'");
  out << dump_document(doc);
  std::cout << summary;
}

long spec_suffix(const std::string& spec, const std::string& prefix,
                 const std::string& what) {
  if (spec.rfind(prefix + ":", 0) != 0)
    throw ValidationError("BadSpec", what + " spec '" + spec + "' must look like " +
                                         prefix + ":<count>");
  const std::string tail = spec.substr(prefix.size() + 1);
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(tail, &used);
  } catch (const std::exception&) {
    throw ValidationError("BadSpec", what + " spec '" + spec + "' has a bad count");
  }
  if (used != tail.size() || value < 1)
    throw ValidationError("BadSpec", what + " spec '" + spec + "' has a bad count");
  return value;
}

std::vector<AuditInstance> parse_demo_spec(const std::string& spec) {
  if (spec == "stage3-split") return {stage3_split_instance()};
  return {device_pair_instance(spec_suffix(spec, "device-pair", "demo"))};
}

std::vector<AuditInstance> parse_corpus_spec(const std::string& spec,
                                             std::uint64_t seed) {
  const long n = spec_suffix(spec, "random", "corpus");
  if (n > 100000)
    throw ValidationError("BadSpec", "corpus size capped at 100000");
  return random_corpus(static_cast<int>(n), seed);
}

int cmd_canonicalize(const std::string& input, const std::string& output) {
  const Game canonical = canonicalize(load_game(input));
  const Json doc = game_to_document(canonical);
  emit(doc, output, "canonical form written (dim " +
                        std::to_string(canonical.dim()) + ")\n");
  return kOk;
}

int cmd_equivalent(const std::string& first, const std::string& second,
                   std::uint64_t seed, double tol, const std::string& output) {
  const Game a = load_game(first);
  const Game b = load_game(second);
  const bool same = equivalent(a, b, tol);
  Json result{{"same", same},
              {"weight_distance", distribution_distance(weight_map(a), weight_map(b))},
              {"canonical_first", game_to_document(canonicalize(a))},
              {"canonical_second", game_to_document(canonicalize(b))}};
  const Json doc =
      report_document("equivalent", seed, tol, Json::array({std::move(result)}));
  emit(doc, output, std::string(same ? "equivalent" : "not equivalent") + "\n");
  return same ? kOk : kMismatch;
}

int cmd_audit(const std::string& vf_name, const std::string& corpus_spec,
              const std::string& demo_spec, std::uint64_t seed, double tol,
              const std::string& output) {
  const auto vf = ValueFunction::parse(vf_name);
  if (!vf)
    throw ValidationError("UnknownValueFunction",
                          "no value function named '" + vf_name +
                              "' (try born, branch-count, weight-power:<alpha>)");
  const std::vector<AuditInstance> corpus = demo_spec.empty()
                                                ? parse_corpus_spec(corpus_spec, seed)
                                                : parse_demo_spec(demo_spec);

  std::vector<AxiomReport> reports;
  for (Axiom axiom : all_axioms())
    reports.push_back(check_axiom(*vf, axiom, corpus, seed, tol));
  std::sort(reports.begin(), reports.end(),
            [](const AxiomReport& x, const AxiomReport& y) { return x.axiom < y.axiom; });

  bool profile_ok = true;
  Json results = Json::array();
  std::string summary;
  for (const auto& r : reports) {
    results.push_back(to_json(r));
    const bool expected = axiom_expected_pass(*vf, *axiom_from_id(r.axiom));
    if (r.pass != expected) profile_ok = false;
    summary += r.axiom + ": " + (r.pass ? "pass" : "fail") +
               (r.pass == expected ? "" : " (unexpected)") + "\n";
  }
  const Json doc = report_document("audit", seed, tol, std::move(results));
  emit(doc, output, summary);
  return profile_ok ? kOk : kMismatch;
}

int cmd_verify(std::vector<std::string> stages, const StageParams& params,
               std::uint64_t seed, double tol, const std::string& output) {
  if (stages.empty() ||
      (stages.size() == 1 && (stages[0] == "all" || stages[0] == "ALL")))
    stages = stage_ids();
  std::sort(stages.begin(), stages.end());
  stages.erase(std::unique(stages.begin(), stages.end()), stages.end());
  const auto& known = stage_ids();
  for (const auto& id : stages)
    if (std::find(known.begin(), known.end(), id) == known.end())
      throw ValidationError("UnknownStage", "no stage named '" + id + "'");

  bool all_pass = true;
  Json results = Json::array();
  std::string summary;
  for (const auto& id : stages) {
    const StageReport report = verify_stage(id, params, seed);
    all_pass = all_pass && report.pass;
    results.push_back(to_json(report));
    summary += report.stage + ": " + (report.pass ? "pass" : "FAIL") + " (" +
               std::to_string(report.checks.size()) + " checks)\n";
  }
  const Json doc = report_document("verify", seed, tol, std::move(results));
  emit(doc, output, summary);
  return all_pass ? kOk : kMismatch;
}

int cmd_demo(const std::string& spec, std::uint64_t seed, double tol,
             const std::string& output) {
  long multiplicity = 1000;
  if (!spec.empty()) multiplicity = spec_suffix(spec, "device-pair", "demo");
  const StageReport report = device_pair_demo(multiplicity);
  const Json doc =
      report_document("demo", seed, tol, Json::array({to_json(report)}));
  emit(doc, output, std::string("device pair: ") + (report.pass ? "pass" : "FAIL") +
                        " (" + std::to_string(report.checks.size()) + " checks)\n");
  return report.pass ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement game toolkit: canonical forms, value-function audits, "
               "and the staged derivation checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed = 0;
  double tol = kValueTol;
  std::string output;
  app.add_option("--seed", seed, "Seed for all randomized constructions");
  app.add_option("--tol", tol, "Comparison tolerance")
      ->envname("QGAME_TOL")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", output, "Write the JSON report here instead of stdout");

  auto* canon = app.add_subcommand("canonicalize", "Rewrite a game document in canonical form");
  canon->fallthrough();  // let --seed/--tol/--output follow the subcommand
  std::string canon_input;
  canon->add_option("input", canon_input, "Game document (JSON)")->required();

  auto* equiv = app.add_subcommand("equivalent", "Compare two game documents");
  equiv->fallthrough();  // let --seed/--tol/--output follow the subcommand
  std::string equiv_first, equiv_second;
  equiv->add_option("first", equiv_first, "Game document (JSON)")->required();
  equiv->add_option("second", equiv_second, "Game document (JSON)")->required();

  auto* audit = app.add_subcommand("audit", "Check the decision axioms for a value function");
  audit->fallthrough();  // let --seed/--tol/--output follow the subcommand
  std::string audit_vf, audit_corpus = "random:50", audit_demo;
  audit->add_option("value_function", audit_vf,
                    "born, branch-count, or weight-power:<alpha>")
      ->required();
  audit->add_option("--corpus", audit_corpus, "Corpus spec, e.g. random:200");
  audit->add_option("--demo", audit_demo,
                    "Fixed scenario: device-pair:<m> or stage3-split");

  auto* verify = app.add_subcommand("verify", "Run the staged derivation checks");
  verify->fallthrough();  // let --seed/--tol/--output follow the subcommand
  std::vector<std::string> verify_stages;
  StageParams params;
  verify->add_option("stages", verify_stages, "Stage ids, or 'all'");
  verify->add_option("--x1", params.x1, "First payoff");
  verify->add_option("--x2", params.x2, "Second payoff");
  verify->add_option("--a", params.a, "Target weight in (0, 1)");
  verify->add_option("--depth", params.depth, "Dyadic bracketing depth");
  verify->add_option("--n-max", params.n_max, "Doubling levels for S2");
  verify->add_option("--multiplicity", params.multiplicity, "Device readout count");

  auto* demo = app.add_subcommand("demo", "Run the two-device scenario");
  demo->fallthrough();  // let --seed/--tol/--output follow the subcommand
  std::string demo_spec = "device-pair:1000";
  demo->add_option("spec", demo_spec, "device-pair:<m>");
  long demo_mult = -1;
  demo->add_option("--multiplicity", demo_mult, "Override the readout count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (canon->parsed()) return cmd_canonicalize(canon_input, output);
    if (equiv->parsed()) return cmd_equivalent(equiv_first, equiv_second, seed, tol, output);
    if (audit->parsed())
      return cmd_audit(audit_vf, audit_corpus, audit_demo, seed, tol, output);
    if (verify->parsed()) return cmd_verify(verify_stages, params, seed, tol, output);
    if (demo->parsed()) {
      if (demo_mult >= 1) demo_spec = "device-pair:" + std::to_string(demo_mult);
      return cmd_demo(demo_spec, seed, tol, output);
    }
    return kInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const StageConstructionError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const Error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

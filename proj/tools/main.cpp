#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qit/cli.hpp"
#include "qit/error.hpp"

namespace {

using qit::cli::ExperimentConfig;
using json = nlohmann::json;

void add_common(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "PRNG seed; identical seeds reproduce the run exactly")
      ->required();
  // Options may come from the config file's [<subcommand>] section; --config
  // itself lives on the top-level app and falls through from subcommand args.
  sub->configurable();
  sub->fallthrough();
}

int emit(const ExperimentConfig& cfg) {
  const json document = qit::cli::run_experiment(cfg);
  std::cout << document.dump() << "\n";
  std::cerr << qit::cli::summarize(document) << "\n";
  return 0;
}

int run_replay(const std::string& path) {
  json document;
  if (path == "-") {
    try {
      document = json::parse(std::cin);
    } catch (const json::exception& e) {
      qit::raise(qit::errc::schema_error, std::string("stdin is not valid JSON: ") + e.what());
    }
  } else {
    std::ifstream in(path);
    if (!in) qit::raise(qit::errc::bad_config, "cannot open '" + path + "'");
    try {
      document = json::parse(in);
    } catch (const json::exception& e) {
      qit::raise(qit::errc::schema_error, std::string("'") + path + "' is not valid JSON: " + e.what());
    }
  }
  const auto report = qit::cli::replay_document(document);
  if (report.pass) {
    std::cerr << "replay: pass (all reported statistics reproduced bit-exactly)\n";
    return 0;
  }
  std::cerr << "replay: FAIL, " << report.mismatches.size() << " field(s) differ\n";
  for (const auto& path_name : report.mismatches) std::cerr << "  " << path_name << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-measurement experiments: Bell tests, teleportation, entanglement-based "
               "key distribution, and quantum random numbers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file; subcommand options go in a [<subcommand>] section");

  ExperimentConfig cfg;
  std::string replay_path;

  auto* chsh = app.add_subcommand("chsh", "Sample a Bell-CHSH experiment on an entangled pair");
  add_common(chsh, cfg);
  chsh->add_option("--trials", cfg.trials, "Number of measured pairs")
      ->check(CLI::PositiveNumber);
  chsh->add_option("--jobs", cfg.jobs, "Worker threads; does not change the statistics")
      ->check(CLI::PositiveNumber);
  auto* oa = chsh->add_option("--angle-a", cfg.angle_a_deg, "Alice setting a, planar degrees");
  auto* oap = chsh->add_option("--angle-a-prime", cfg.angle_a_prime_deg,
                               "Alice setting a', planar degrees");
  auto* ob = chsh->add_option("--angle-b", cfg.angle_b_deg, "Bob setting b, planar degrees");
  auto* obp = chsh->add_option("--angle-b-prime", cfg.angle_b_prime_deg,
                               "Bob setting b', planar degrees");

  auto* teleport = app.add_subcommand("teleport", "Teleport random qubit states and audit them");
  add_common(teleport, cfg);
  teleport->add_option("--trials", cfg.trials, "Number of teleported states")
      ->check(CLI::PositiveNumber);
  teleport->add_option("--jobs", cfg.jobs, "Worker threads; does not change the statistics")
      ->check(CLI::PositiveNumber);

  auto* qkd = app.add_subcommand("qkd", "Entanglement-based key distribution session");
  add_common(qkd, cfg);
  qkd->add_option("--pairs", cfg.pairs, "Number of distributed pairs (minimum 100)");
  qkd->add_option("--channel", cfg.channel, "ideal | intercept-resend")
      ->check(CLI::IsMember({"ideal", "intercept-resend"}));
  qkd->add_option("--eve-angle", cfg.eve_angle_deg,
                  "Eavesdropper measurement direction, planar degrees");

  auto* qrng = app.add_subcommand("qrng", "Generate random bits from single-qubit measurements");
  add_common(qrng, cfg);
  qrng->add_option("--bits", cfg.bits, "Number of bits")->check(CLI::PositiveNumber);

  auto* props = app.add_subcommand(
      "state-from-props",
      "Build the unique pure state fixed by N independent product observables");
  add_common(props, cfg);
  props
      ->add_option("--props", cfg.props_text,
                   "Comma/semicolon-separated assignments, e.g. 'ZZ=-1, YY=+1'")
      ->required();

  auto* measure = app.add_subcommand("measure",
                                     "Repeated spin measurement of a prepared qubit");
  add_common(measure, cfg);
  measure->add_option("--trials", cfg.trials, "Number of repetitions")
      ->check(CLI::PositiveNumber);
  measure->add_option("--prep-polar", cfg.prep_polar_deg, "Preparation polar angle, degrees");
  measure->add_option("--prep-azimuth", cfg.prep_azimuth_deg,
                      "Preparation azimuth angle, degrees");
  measure->add_option("--meas-polar", cfg.meas_polar_deg, "Measurement polar angle, degrees");
  measure->add_option("--meas-azimuth", cfg.meas_azimuth_deg,
                      "Measurement azimuth angle, degrees");

  auto* replay = app.add_subcommand("replay",
                                    "Re-run a result document and verify it bit-exactly");
  replay->add_option("document", replay_path, "Result document path, or - for stdin")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    if (replay->parsed()) return run_replay(replay_path);
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (chsh->parsed()) {
      cfg.angles_optimal = !(*oa || *oap || *ob || *obp);
    }
    return emit(cfg);
  } catch (const qit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qit::cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qit/error.hpp"

namespace qit::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Resolved run parameters; serialized verbatim into the result document so a
// replay can rebuild the identical run. Angles are degrees at this layer.
struct ExperimentConfig {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::int64_t trials = 100000;  // chsh, teleport, measure
  std::int64_t pairs = 10000;    // qkd
  std::int64_t bits = 1000000;   // qrng
  int jobs = 1;

  bool angles_optimal = true;  // chsh; explicit angles below are planar degrees
  double angle_a_deg = 90;
  double angle_a_prime_deg = 0;
  double angle_b_deg = 135;
  double angle_b_prime_deg = 45;

  std::string channel = "ideal";  // qkd: ideal | intercept-resend
  double eve_angle_deg = 0;       // planar degrees

  std::string props_text;  // state-from-props

  double prep_polar_deg = 0;  // measure
  double prep_azimuth_deg = 0;
  double meas_polar_deg = 0;
  double meas_azimuth_deg = 0;
};

// Runs the experiment and returns the full result document
// {schema_version, subcommand, config, results}. Identical configs produce
// byte-identical documents.
json run_experiment(const ExperimentConfig& config);

// Short human-readable summary of a result document.
std::string summarize(const json& document);

struct ReplayReport {
  bool pass = false;
  std::vector<std::string> mismatches;  // dotted field paths
};

// Re-runs the document's config and compares every reported statistic
// bit-exactly. Throws schema_error on malformed documents.
ReplayReport replay_document(const json& document);

ExperimentConfig config_from_json(const json& config);

// bad_config/schema_error -> 2, physics-contract violations -> 3.
int exit_code_for(const Error& e);

}  // namespace qit::cli

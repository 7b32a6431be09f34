#include "qit/cli.hpp"

#include <cmath>
#include <span>
#include <sstream>

#include "qit/localrealism.hpp"
#include "qit/measurement.hpp"
#include "qit/propositions.hpp"
#include "qit/protocols.hpp"
#include "qit/serialize.hpp"
#include "qit/stats.hpp"

namespace qit::cli {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

const StateVector& epr_state() {
  static const StateVector s = make_state({{0, 0}, {1, 0}, {1, 0}, {0, 0}});
  return s;
}

localrealism::ChshAngles angles_from(const ExperimentConfig& c) {
  if (c.angles_optimal) return localrealism::optimal_epr_angles();
  using measurement::Direction;
  return localrealism::ChshAngles{
      Direction::planar(deg_to_rad(c.angle_a_deg)),
      Direction::planar(deg_to_rad(c.angle_a_prime_deg)),
      Direction::planar(deg_to_rad(c.angle_b_deg)),
      Direction::planar(deg_to_rad(c.angle_b_prime_deg))};
}

json run_chsh(const ExperimentConfig& c) {
  if (c.trials < 1) raise(errc::bad_config, "trials must be positive");
  const auto angles = angles_from(c);
  RandomSource rng(c.seed);
  const auto stats =
      localrealism::run_chsh_trials(epr_state(), angles, c.trials, rng, c.jobs);
  json counts = json::array();
  for (const auto& pair : stats.counts) counts.push_back(pair);
  return json{{"n_trials", stats.n_trials},
              {"counts", std::move(counts)},
              {"correlators", stats.correlators},
              {"s_value", stats.s_value},
              {"std_error", stats.std_error},
              {"s_ideal", localrealism::quantum_chsh_ideal(epr_state(), angles)},
              {"lhv_bound", localrealism::lhv_bound()}};
}

json run_teleport(const ExperimentConfig& c) {
  if (c.trials < 1) raise(errc::bad_config, "trials must be positive");
  RandomSource rng(c.seed);
  const auto stats = protocols::run_teleport_trials(c.trials, rng, c.jobs);
  const double chi2 = stats::chi_square_uniform_statistic(
      std::span<const std::int64_t>(stats.outcome_counts.data(), 4));
  return json{{"n_trials", stats.n_trials},
              {"outcome_counts", stats.outcome_counts},
              {"outcome_chi_square_pvalue", stats::chi_square_pvalue(chi2, 3)},
              {"min_fidelity", stats.min_fidelity},
              {"mean_fidelity", stats.mean_fidelity},
              {"mean_fidelity_std_error", stats.mean_fidelity_std_error},
              {"max_nosignaling_distance", stats.max_nosignaling_distance}};
}

json run_qkd(const ExperimentConfig& c) {
  if (c.pairs < 100) raise(errc::bad_config, "pairs must be at least 100");
  protocols::Channel channel = protocols::Channel::ideal();
  if (c.channel == "intercept-resend") {
    channel =
        protocols::Channel::intercept_resend(measurement::Direction::planar(deg_to_rad(c.eve_angle_deg)));
  } else if (c.channel != "ideal") {
    raise(errc::bad_config, "channel must be 'ideal' or 'intercept-resend'");
  }
  RandomSource rng(c.seed);
  const auto session = protocols::e91_run(c.pairs, channel, rng);
  return json{{"n_pairs", session.n_pairs},
              {"key_length", static_cast<std::int64_t>(session.sifted_key_alice.size())},
              {"sifted_key_alice_hex", serialize::bits_to_hex(session.sifted_key_alice)},
              {"sifted_key_bob_hex", serialize::bits_to_hex(session.sifted_key_bob)},
              {"qber", session.qber},
              {"s_estimate", session.s_estimate},
              {"s_std_error", session.s_std_error},
              {"n_test_rounds", session.n_test_rounds}};
}

json run_qrng(const ExperimentConfig& c) {
  if (c.bits < 2) raise(errc::bad_config, "bits must be at least 2");
  RandomSource rng(c.seed);
  const auto bits = protocols::qrng_bits(c.bits, rng);
  std::int64_t ones = 0;
  for (std::int8_t b : bits) ones += b;
  return json{{"n_bits", static_cast<std::int64_t>(bits.size())},
              {"ones", ones},
              {"ones_fraction", static_cast<double>(ones) / static_cast<double>(bits.size())},
              {"ones_fraction_std_error", stats::binomial_std_error(0.5, c.bits)},
              {"monobit_pvalue", stats::monobit_pvalue(bits)},
              {"runs_pvalue", stats::runs_pvalue(bits)},
              {"lag1_autocorrelation", stats::lag1_autocorrelation(bits)},
              {"bits_hex", serialize::bits_to_hex(bits)}};
}

json run_state_from_props(const ExperimentConfig& c) {
  if (c.props_text.empty()) raise(errc::bad_config, "no propositions given");
  const auto set = props::parse_propositions(c.props_text);
  const StateVector state = props::state_from_propositions(set);
  const auto classification = props::classify_set(set);
  json per_prop = json::array();
  for (const auto& p : set.propositions) {
    per_prop.push_back(json{{"label", p.label},
                            {"asserted_value", p.truth ? 1 : -1},
                            {"truth_probability", props::truth_probability(state, p)}});
  }
  const char* category = classification.category == props::SetCategory::individual
                             ? "individual"
                             : classification.category == props::SetCategory::joint ? "joint"
                                                                                    : "mixed";
  return json{{"num_systems", set.num_systems},
              {"state", serialize::to_json(state)},
              {"category", category},
              {"entangled", classification.entangled},
              {"propositions", std::move(per_prop)}};
}

json run_measure(const ExperimentConfig& c) {
  if (c.trials < 1) raise(errc::bad_config, "trials must be positive");
  using measurement::Direction;
  const Direction prep(deg_to_rad(c.prep_polar_deg), deg_to_rad(c.prep_azimuth_deg));
  const Direction axis(deg_to_rad(c.meas_polar_deg), deg_to_rad(c.meas_azimuth_deg));
  const StateVector state = measurement::prepare_along(prep);
  const double analytic = measurement::outcome_probability(state, 0, axis, +1);
  RandomSource rng(c.seed);
  std::int64_t plus = 0;
  for (std::int64_t t = 0; t < c.trials; ++t) {
    if (measurement::measure(state, 0, axis, rng).value > 0) ++plus;
  }
  const double freq = static_cast<double>(plus) / static_cast<double>(c.trials);
  return json{{"n_trials", c.trials},
              {"plus_count", plus},
              {"plus_frequency", freq},
              {"analytic_probability", analytic},
              {"frequency_std_error", stats::binomial_std_error(analytic, c.trials)},
              {"abs_deviation", std::abs(freq - analytic)}};
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"subcommand", c.subcommand}, {"seed", c.seed}, {"jobs", c.jobs}};
  if (c.subcommand == "chsh") {
    j["trials"] = c.trials;
    j["angles_optimal"] = c.angles_optimal;
    if (!c.angles_optimal) {
      j["angle_a_deg"] = c.angle_a_deg;
      j["angle_a_prime_deg"] = c.angle_a_prime_deg;
      j["angle_b_deg"] = c.angle_b_deg;
      j["angle_b_prime_deg"] = c.angle_b_prime_deg;
    }
  } else if (c.subcommand == "teleport" || c.subcommand == "measure") {
    j["trials"] = c.trials;
    if (c.subcommand == "measure") {
      j["prep_polar_deg"] = c.prep_polar_deg;
      j["prep_azimuth_deg"] = c.prep_azimuth_deg;
      j["meas_polar_deg"] = c.meas_polar_deg;
      j["meas_azimuth_deg"] = c.meas_azimuth_deg;
    }
  } else if (c.subcommand == "qkd") {
    j["pairs"] = c.pairs;
    j["channel"] = c.channel;
    if (c.channel == "intercept-resend") j["eve_angle_deg"] = c.eve_angle_deg;
  } else if (c.subcommand == "qrng") {
    j["bits"] = c.bits;
  } else if (c.subcommand == "state-from-props") {
    j["props"] = c.props_text;
  }
  return j;
}

template <typename T>
T field_as(const json& j, const char* key, T fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) raise(errc::schema_error, std::string("missing field '") + key + "'");
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    raise(errc::schema_error, std::string("field '") + key + "' has the wrong type");
  }
}

// Bit-exact comparison means identical serialized bytes; that makes a parsed
// 20000 (unsigned) equal to a freshly computed 20000 (signed) while keeping
// doubles exact through the shortest-round-trip representation.
void diff_json(const json& expected, const json& actual, const std::string& path,
               std::vector<std::string>& mismatches) {
  if (expected.is_object() != actual.is_object() || expected.is_array() != actual.is_array()) {
    mismatches.push_back(path);
    return;
  }
  if (expected.is_object()) {
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      const std::string child = path.empty() ? it.key() : path + "." + it.key();
      if (!actual.contains(it.key())) {
        mismatches.push_back(child);
        continue;
      }
      diff_json(it.value(), actual.at(it.key()), child, mismatches);
    }
    for (auto it = actual.begin(); it != actual.end(); ++it) {
      if (!expected.contains(it.key()))
        mismatches.push_back(path.empty() ? it.key() : path + "." + it.key());
    }
    return;
  }
  if (expected.is_array()) {
    if (expected.size() != actual.size()) {
      mismatches.push_back(path);
      return;
    }
    for (std::size_t i = 0; i < expected.size(); ++i)
      diff_json(expected[i], actual[i], path + "[" + std::to_string(i) + "]", mismatches);
    return;
  }
  if (expected.dump() != actual.dump()) mismatches.push_back(path);
}

}  // namespace

json run_experiment(const ExperimentConfig& config) {
  json results;
  if (config.subcommand == "chsh") results = run_chsh(config);
  else if (config.subcommand == "teleport") results = run_teleport(config);
  else if (config.subcommand == "qkd") results = run_qkd(config);
  else if (config.subcommand == "qrng") results = run_qrng(config);
  else if (config.subcommand == "state-from-props") results = run_state_from_props(config);
  else if (config.subcommand == "measure") results = run_measure(config);
  else raise(errc::bad_config, "unknown subcommand '" + config.subcommand + "'");
  return json{{"schema_version", kSchemaVersion},
              {"subcommand", config.subcommand},
              {"config", config_to_json(config)},
              {"results", std::move(results)}};
}

std::string summarize(const json& document) {
  std::ostringstream out;
  const std::string sub = document.value("subcommand", "?");
  const json& r = document.at("results");
  out << sub << ":";
  if (sub == "chsh") {
    out << " s_value=" << r.at("s_value").get<double>() << " +/- "
        << r.at("std_error").get<double>() << " (ideal " << r.at("s_ideal").get<double>()
        << ", local-realistic bound " << r.at("lhv_bound").get<double>() << ")";
  } else if (sub == "teleport") {
    out << " min_fidelity=" << r.at("min_fidelity").get<double>()
        << " mean_fidelity=" << r.at("mean_fidelity").get<double>()
        << " max_nosignaling_distance=" << r.at("max_nosignaling_distance").get<double>();
  } else if (sub == "qkd") {
    out << " key_length=" << r.at("key_length").get<std::int64_t>()
        << " qber=" << r.at("qber").get<double>() << " s_estimate="
        << r.at("s_estimate").get<double>() << " +/- " << r.at("s_std_error").get<double>();
  } else if (sub == "qrng") {
    out << " n_bits=" << r.at("n_bits").get<std::int64_t>()
        << " ones_fraction=" << r.at("ones_fraction").get<double>()
        << " monobit_p=" << r.at("monobit_pvalue").get<double>()
        << " runs_p=" << r.at("runs_pvalue").get<double>();
  } else if (sub == "state-from-props") {
    out << " category=" << r.at("category").get<std::string>()
        << " entangled=" << (r.at("entangled").get<bool>() ? "true" : "false");
  } else if (sub == "measure") {
    out << " plus_frequency=" << r.at("plus_frequency").get<double>()
        << " analytic=" << r.at("analytic_probability").get<double>();
  }
  return out.str();
}

ExperimentConfig config_from_json(const json& config) {
  if (!config.is_object()) raise(errc::schema_error, "config must be an object");
  ExperimentConfig c;
  c.subcommand = field_as<std::string>(config, "subcommand", "", true);
  c.seed = field_as<std::uint64_t>(config, "seed", 0, true);
  c.jobs = field_as<int>(config, "jobs", 1);
  c.trials = field_as<std::int64_t>(config, "trials", c.trials);
  c.pairs = field_as<std::int64_t>(config, "pairs", c.pairs);
  c.bits = field_as<std::int64_t>(config, "bits", c.bits);
  c.angles_optimal = field_as<bool>(config, "angles_optimal", c.angles_optimal);
  c.angle_a_deg = field_as<double>(config, "angle_a_deg", c.angle_a_deg);
  c.angle_a_prime_deg = field_as<double>(config, "angle_a_prime_deg", c.angle_a_prime_deg);
  c.angle_b_deg = field_as<double>(config, "angle_b_deg", c.angle_b_deg);
  c.angle_b_prime_deg = field_as<double>(config, "angle_b_prime_deg", c.angle_b_prime_deg);
  c.channel = field_as<std::string>(config, "channel", c.channel);
  c.eve_angle_deg = field_as<double>(config, "eve_angle_deg", c.eve_angle_deg);
  c.props_text = field_as<std::string>(config, "props", c.props_text);
  c.prep_polar_deg = field_as<double>(config, "prep_polar_deg", c.prep_polar_deg);
  c.prep_azimuth_deg = field_as<double>(config, "prep_azimuth_deg", c.prep_azimuth_deg);
  c.meas_polar_deg = field_as<double>(config, "meas_polar_deg", c.meas_polar_deg);
  c.meas_azimuth_deg = field_as<double>(config, "meas_azimuth_deg", c.meas_azimuth_deg);
  return c;
}

ReplayReport replay_document(const json& document) {
  if (!document.is_object()) raise(errc::schema_error, "document must be an object");
  const int version = field_as<int>(document, "schema_version", 0, true);
  if (version != kSchemaVersion)
    raise(errc::schema_error, "unsupported schema_version " + std::to_string(version));
  if (!document.contains("config")) raise(errc::schema_error, "missing field 'config'");
  if (!document.contains("results")) raise(errc::schema_error, "missing field 'results'");
  const ExperimentConfig config = config_from_json(document.at("config"));
  const std::string outer = field_as<std::string>(document, "subcommand", "", true);
  if (outer != config.subcommand)
    raise(errc::schema_error, "subcommand does not match config.subcommand");

  const json fresh = run_experiment(config);
  ReplayReport report;
  diff_json(document.at("results"), fresh.at("results"), "results", report.mismatches);
  report.pass = report.mismatches.empty();
  return report;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::bad_config:
    case errc::schema_error:
      return 2;
    default:
      return 3;
  }
}

}  // namespace qit::cli

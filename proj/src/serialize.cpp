#include "qit/serialize.hpp"

namespace qit::serialize {

json to_json(const StateVector& s) {
  json amps = json::array();
  for (const cplx& a : s.amplitudes()) amps.push_back({a.real(), a.imag()});
  return json{{"num_systems", s.num_systems()}, {"amplitudes", std::move(amps)}};
}

json to_json(const DensityMatrix& rho) {
  json rows = json::array();
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      const cplx e = rho.entry(r, c);
      row.push_back({e.real(), e.imag()});
    }
    rows.push_back(std::move(row));
  }
  return json{{"dim", rho.dim()}, {"entries", std::move(rows)}};
}

StateVector state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("amplitudes") || !j["amplitudes"].is_array())
    raise(errc::schema_error, "state record needs an amplitudes array");
  std::vector<cplx> amps;
  for (const json& pair : j["amplitudes"]) {
    if (!pair.is_array() || pair.size() != 2)
      raise(errc::schema_error, "amplitude must be a [re, im] pair");
    amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return make_state(std::move(amps));
}

json to_json(const protocols::TeleportTranscript& t) {
  return json{{"record", "teleport"},
              {"input_state", to_json(t.input_state)},
              {"bsm_outcome", t.bsm_outcome},
              {"branch_probability", t.branch_probability},
              {"correction", protocols::to_string(t.correction)},
              {"bob_state", to_json(t.bob_state)},
              {"fidelity_achieved", t.fidelity_achieved},
              {"bob_premessage_reduced", to_json(t.bob_premessage_reduced)},
              {"nosignaling_distance", protocols::nosignaling_audit(t)}};
}

json to_json(const protocols::QkdSession& session) {
  auto settings = [](const std::vector<std::int8_t>& v) {
    json out = json::array();
    for (std::int8_t x : v) out.push_back(static_cast<int>(x));
    return out;
  };
  json j{{"record", "qkd_session"},
         {"n_pairs", session.n_pairs},
         {"alice_settings", settings(session.alice_settings)},
         {"bob_settings", settings(session.bob_settings)},
         {"alice_outcomes", settings(session.alice_outcomes)},
         {"bob_outcomes", settings(session.bob_outcomes)},
         {"key_length", session.sifted_key_alice.size()},
         {"sifted_key_alice_hex", bits_to_hex(session.sifted_key_alice)},
         {"sifted_key_bob_hex", bits_to_hex(session.sifted_key_bob)},
         {"qber", session.qber},
         {"s_estimate", session.s_estimate},
         {"s_std_error", session.s_std_error},
         {"n_test_rounds", session.n_test_rounds},
         {"intercepted", session.intercepted}};
  if (session.intercepted) {
    j["eve_polar"] = session.eve_polar;
    j["eve_azimuth"] = session.eve_azimuth;
  }
  return j;
}

std::string bits_to_hex(const std::vector<std::int8_t>& bits) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  int nibble = 0;
  int filled = 0;
  for (std::int8_t b : bits) {
    nibble = (nibble << 1) | (b ? 1 : 0);
    if (++filled == 4) {
      out += digits[nibble];
      nibble = 0;
      filled = 0;
    }
  }
  if (filled > 0) out += digits[nibble << (4 - filled)];
  return out;
}

std::vector<std::int8_t> hex_to_bits(const std::string& hex, std::int64_t n_bits) {
  std::vector<std::int8_t> bits;
  bits.reserve(static_cast<std::size_t>(n_bits));
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else raise(errc::schema_error, "invalid hex digit in bit string");
    for (int k = 3; k >= 0; --k) {
      if (static_cast<std::int64_t>(bits.size()) >= n_bits) break;
      bits.push_back(static_cast<std::int8_t>((v >> k) & 1));
    }
  }
  if (static_cast<std::int64_t>(bits.size()) != n_bits)
    raise(errc::schema_error, "hex bit string shorter than declared length");
  return bits;
}

std::string to_record_line(const json& j) { return j.dump(); }

}  // namespace qit::serialize

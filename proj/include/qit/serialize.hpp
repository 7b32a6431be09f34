#pragma once

#include <string>

#include <json.hpp>

#include "qit/protocols.hpp"
#include "qit/qmath.hpp"

namespace qit::serialize {

using json = nlohmann::json;

json to_json(const StateVector& s);
json to_json(const DensityMatrix& rho);
StateVector state_from_json(const json& j);

json to_json(const protocols::TeleportTranscript& t);
json to_json(const protocols::QkdSession& session);

// Bits packed as a hex string, most significant nibble first.
std::string bits_to_hex(const std::vector<std::int8_t>& bits);
std::vector<std::int8_t> hex_to_bits(const std::string& hex, std::int64_t n_bits);

// One self-contained record per line, for appendable run logs.
std::string to_record_line(const json& j);

}  // namespace qit::serialize

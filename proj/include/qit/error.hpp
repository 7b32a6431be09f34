#pragma once

#include <stdexcept>
#include <string>

namespace qit {

// Failure categories surfaced to callers; the CLI maps these onto exit codes.
enum class errc {
  zero_norm,
  bad_length,
  bad_value,
  dimension_mismatch,
  bad_site,
  bad_sites,
  inconsistent_propositions,
  rank_error,
  insufficient_rounds,
  schema_error,
  bad_config,
};

inline const char* to_string(errc c) {
  switch (c) {
    case errc::zero_norm: return "zero_norm";
    case errc::bad_length: return "bad_length";
    case errc::bad_value: return "bad_value";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::bad_site: return "bad_site";
    case errc::bad_sites: return "bad_sites";
    case errc::inconsistent_propositions: return "inconsistent_propositions";
    case errc::rank_error: return "rank_error";
    case errc::insufficient_rounds: return "insufficient_rounds";
    case errc::schema_error: return "schema_error";
    case errc::bad_config: return "bad_config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace qit

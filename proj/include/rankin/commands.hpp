#ifndef RANKIN_COMMANDS_HPP
#define RANKIN_COMMANDS_HPP

// Command-line front end (implemented in src/commands.cpp).

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "rankin/forms.hpp"

namespace rankin::cli {

inline constexpr const char* code_version = "0.1.0";
inline constexpr const char* output_schema_version = "1";

struct GlobalOptions {
  unsigned precision = 120;
  std::string cache_dir;     // empty: $RANKIN_CACHE_DIR, then $HOME/.cache/rankin
  std::string fixtures_dir;  // empty: ./fixtures, then the source tree's fixtures
  std::string json_out;
  std::string base_url = "https://www.lmfdb.org";
};

struct RunManifest {
  std::string command;
  nlohmann::ordered_json arguments;                 // parsed option values
  unsigned precision = 0;
  std::map<std::string, std::string> checksums;     // form label -> sha256 of its canonical record
  std::string version = code_version;
  double wall_time_s = 0;

  // Everything except the wall time; this is what the report embeds.
  nlohmann::ordered_json inputs_json() const;
  nlohmann::ordered_json to_json() const;
};

// Resolution order: a JSON file path, <fixtures>/<ref>.json, a generated
// level-one form "1.k.a.a", then the fetch cache / network with n_max.
NewformData resolve_form(const std::string& ref, const GlobalOptions& g, long n_max_hint);

// "a", "a/b", "a+b*sqrt(D)", "sqrt(D)", "-3/2-5/7*sqrt(-26)".
AlgNum parse_algnum(const std::string& text);

// Exit codes: 0 success / congruent, 1 error, 2 not congruent, 3 indeterminate.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankin::cli

#endif

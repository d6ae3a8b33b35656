#pragma once

// Scenario files, subcommand orchestration and report output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fbasin/basin.hpp"
#include "fbasin/bounds.hpp"
#include "fbasin/sequence.hpp"

namespace fbasin {

using Json = nlohmann::ordered_json;

struct PsiSettings {
  int points = 20;
  int j_max = 12;
  int injectivity_points = 200;
  std::size_t pairs = 500;
  std::uint64_t seed = 7;
  bool operator==(const PsiSettings&) const = default;
};

struct VerifySettings {
  std::size_t samples = 200;
  int j_max = 20;
  std::uint64_t seed = 1;
  bool operator==(const VerifySettings&) const = default;
};

struct Scenario {
  SequenceSpec sequence;
  std::optional<int> p;
  std::optional<int> q;
  GridSpec grid;
  int grid_j_max = kDefaultJMax;
  PsiSettings psi;
  VerifySettings verify;
  std::string out_dir = ".";
  bool pgm = false;
  bool operator==(const Scenario&) const = default;
};

// Throws kParse for malformed JSON and kValidation (with the field path) for
// invalid content.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(std::string_view text);
Scenario scenario_from_json(const Json& doc);
Json scenario_to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

// Command-line overrides; unset fields keep the scenario values.
struct RunFlags {
  std::optional<int> q;
  std::optional<int> p;
  std::optional<int> j_max;
  std::optional<std::pair<int, int>> grid;  // width, height
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool pgm = false;
};

// "WxH" -> (W, H); throws kValidation.
std::pair<int, int> parse_grid_size(std::string_view text);

void apply_flags(Scenario& scenario, const RunFlags& flags);

struct Orders {
  int p = 0;
  int q = 0;
  QBoundReport bounds;
  bool bounds_available = false;
  std::string linear_normal_form_reason;  // empty when the shortcut does not apply
};

// p and q for a scenario: explicit overrides first, then the bounds module.
Orders resolve_orders(const Scenario& scenario);

Json normal_form_report(const Scenario& scenario);
Json q_bound_report(const Scenario& scenario);
Json verify_report(const Scenario& scenario);

struct PsiOutput {
  std::string csv;
  Json summary;
};
PsiOutput psi_report(const Scenario& scenario);

struct BasinOutput {
  BasinGrid grid;
  std::string csv;
  std::string pgm;  // binary P5
};
BasinOutput basin_report(const Scenario& scenario, bool with_pgm);

std::string grid_csv(const BasinGrid& grid);
std::string grid_pgm(const BasinGrid& grid);

// Number rounded to 12 significant digits.
double round12(double v);
std::string format12(double v);

// Writes bytes to `path`; throws kIo naming the path.
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Runs a subcommand, writing output files under the scenario's out_dir.
// Returns the written paths.
std::vector<std::filesystem::path> run(std::string_view subcommand, Scenario scenario, const RunFlags& flags);

// {"error": {"kind": ..., "message": ...}}
std::string error_json(std::string_view kind, std::string_view message);

}  // namespace fbasin

#include <doctest.h>

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbasin/cli.hpp"
#include "fbasin/error.hpp"

using namespace fbasin;
namespace fs = std::filesystem;

namespace {

const fs::path kData = FBASIN_TEST_DATA;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fbasin_test_" + name);
  fs::remove_all(dir);
  return dir;
}

constexpr const char* kMinimal = R"({
  "dimension": 2,
  "maps": [[{"type": "diagonal", "diagonal": [0.5, 0.25]}]],
  "attraction": {"r": 0.6, "s": 0.2, "delta": 1.0}
})";

ErrorKind kind_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("minimal scenario gets defaults") {
    const auto sc = parse_scenario_text(kMinimal);
    CHECK(sc.sequence.n == 2);
    CHECK(sc.sequence.kind == SequenceKind::kSingle);
    CHECK(sc.grid.width == 64);
    CHECK(sc.grid_j_max == kDefaultJMax);
    CHECK_FALSE(sc.q);
    CHECK(sc.psi == PsiSettings{});
  }

  TEST_CASE("validation errors name the field") {
    std::string bad = kMinimal;
    bad.replace(bad.find("\"s\": 0.2"), 8, "\"s\": 0.9");
    try {
      parse_scenario_text(bad);
      FAIL("accepted s > r");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
      CHECK(std::string(e.what()).find("attraction.s must be < attraction.r") != std::string::npos);
    }
    CHECK(kind_of("{ not json") == ErrorKind::kParse);
    CHECK(kind_of(R"({"dimension": 2, "maps": [], "attraction": {"r": 0.6, "s": 0.2, "delta": 1}})") ==
          ErrorKind::kValidation);
    std::string terms = kMinimal;
    terms.replace(terms.find("[[{"), 3, R"([[{"type": "triangular", "diagonal": [0.5, 0.2], "terms": [{"component": 1, "exponents": [0, 2], "coeff": 1}]}], [{)");
    CHECK(kind_of(terms) == ErrorKind::kValidation);
  }

  TEST_CASE("scenario round trip") {
    for (const char* name : {"triangular_nonresonant.json", "perturbed.json", "diagonal.json", "q_bound_reference.json"}) {
      const auto sc = parse_scenario(kData / name);
      const auto text = serialize_scenario(sc);
      CHECK(parse_scenario_text(text) == sc);
      CHECK(serialize_scenario(parse_scenario_text(text)) == text);
    }
  }

  TEST_CASE("missing file is an io error") {
    try {
      parse_scenario(kData / "does_not_exist.json");
      FAIL("opened a missing file");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kIo);
    }
  }

  TEST_CASE("perturbations are reproducible from the scenario seed") {
    const auto a = parse_scenario(kData / "perturbed.json");
    const auto b = parse_scenario(kData / "perturbed.json");
    for (int j = 1; j <= 5; ++j) CHECK(a.sequence.jet(j, 4) == b.sequence.jet(j, 4));
  }

  TEST_CASE("grid size flag") {
    CHECK(parse_grid_size("64x32") == std::pair{64, 32});
    CHECK_THROWS_AS(parse_grid_size("64"), Error);
    CHECK_THROWS_AS(parse_grid_size("ax3"), Error);
    auto sc = parse_scenario_text(kMinimal);
    RunFlags flags;
    flags.grid = std::pair{1, 8};
    CHECK_THROWS_AS(apply_flags(sc, flags), Error);
  }

  TEST_CASE("q-bound report") {
    const auto doc = q_bound_report(parse_scenario(kData / "q_bound_reference.json"));
    CHECK(doc["q_from_gamma"] == 6);
    CHECK(doc["gamma_proof"].get<double>() == doctest::Approx(400.0 / 9.0).epsilon(1e-11));
  }

  TEST_CASE("normal-form report") {
    const auto doc = normal_form_report(parse_scenario(kData / "triangular_nonresonant.json"));
    CHECK(doc["residual_ok"] == true);
    bool found = false;
    for (const auto& t : doc["T"])
      if (t["component"] == 2 && t["exponents"] == Json::array({2, 0})) {
        found = true;
        CHECK(t["coeff"][0].get<double>() == -20.0);
        CHECK(t["coeff"][1].get<double>() == 0.0);
      }
    CHECK(found);
  }

  TEST_CASE("basin output") {
    const auto out = basin_report(parse_scenario(kData / "diagonal.json"), true);
    CHECK(out.grid.count(BasinStatus::kAttracted) == 256);
    CHECK(out.pgm.rfind("P5\n16 16\n255\n", 0) == 0);
    CHECK(out.pgm.size() == std::string("P5\n16 16\n255\n").size() + 256);
    std::istringstream lines(out.csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "i,j,t1,t2,status,first_entry_step");
  }

  TEST_CASE("basin files are byte identical across runs and thread counts") {
    const auto sc = parse_scenario(kData / "triangular_nonresonant.json");
    std::string first;
    for (int threads : {1, 2, 4, 1}) {
      const auto dir = scratch("bytes");
      RunFlags flags;
      flags.threads = threads;
      flags.out_dir = dir.string();
      run("basin", sc, flags);
      const auto bytes = slurp(dir / "basin.csv");
      if (first.empty()) first = bytes;
      CHECK(bytes == first);
      fs::remove_all(dir);
    }
    omp_set_num_threads(1);
  }

  TEST_CASE("invalid flags write nothing") {
    const auto dir = scratch("invalid");
    RunFlags flags;
    flags.out_dir = dir.string();
    flags.grid = std::pair{1, 1};
    CHECK_THROWS_AS(run("basin", parse_scenario(kData / "diagonal.json"), flags), Error);
    CHECK_FALSE(fs::exists(dir / "basin.csv"));
    CHECK_THROWS_AS(run("bogus", parse_scenario(kData / "diagonal.json"), RunFlags{}), Error);
  }

  TEST_CASE("error json") {
    const auto doc = Json::parse(error_json("validation", "bad \"x\""));
    CHECK(doc["error"]["kind"] == "validation");
    CHECK(doc["error"]["message"] == "bad \"x\"");
  }

  TEST_CASE("number formatting") {
    CHECK(format12(0.1 + 0.2) == "0.3");
    CHECK(round12(1.0 / 3.0) == 0.333333333333);
  }
}

#include <doctest.h>

#include <string>

#include "globtop/error.hpp"
#include "globtop/materials.hpp"

using namespace globtop;

namespace {

std::string error_of(const std::string& text) {
  try {
    load_library(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("bundled library holds the three candidates") {
  const MaterialLibrary lib = default_library();
  REQUIRE(lib.size() == 3);
  CHECK(lib.find("Polyimide") == Material{"Polyimide", 7.5, 0.35});
  CHECK(lib.find("Parylene C") == Material{"Parylene C", 27.59, 0.4});
  CHECK(lib.find("Carbon epoxy resin") == Material{"Carbon epoxy resin", 70.0, 0.4});
  CHECK(lib.find("Carbon epoxy resin").youngs_modulus() == 70e9);
}

TEST_CASE("bundled data file matches the embedded library") {
  CHECK(load_library_file(GLOBTOP_DATA_DIR "/materials.json") == default_library());
}

TEST_CASE("lookup is tolerant of case, spacing and unique prefixes") {
  const MaterialLibrary lib = default_library();
  CHECK(lib.find("CarbonEpoxy").name == "Carbon epoxy resin");
  CHECK(lib.find("parylenec").name == "Parylene C");
  CHECK(lib.find("POLYIMIDE").name == "Polyimide");
  CHECK_THROWS_AS(lib.find("Unobtanium"), ValidationError);
  CHECK_THROWS_AS(lib.find(""), ValidationError);
}

TEST_CASE("ordering by stiffness") {
  const auto sorted = default_library().by_stiffness();
  REQUIRE(sorted.size() == 3);
  CHECK(sorted[0].name == "Polyimide");
  CHECK(sorted[1].name == "Parylene C");
  CHECK(sorted[2].name == "Carbon epoxy resin");
}

TEST_CASE("serialize round trip is field-exact") {
  const MaterialLibrary lib = default_library();
  CHECK(load_library(serialize(lib)) == lib);

  const MaterialLibrary odd({{"A", 0.1 + 0.2, 0.1 * 3}, {"B", 1e-7, 0.0}, {"C", 123456.789, 0.4999999}});
  CHECK(load_library(serialize(odd)) == odd);
}

TEST_CASE("validation names the offending field") {
  const std::string nu_half = R"({"materials": [{"name": "X", "youngs_modulus_gpa": 1, "poisson_ratio": 0.5}]})";
  CHECK(error_of(nu_half).find("poisson_ratio") != std::string::npos);
  CHECK(error_of(nu_half).find("X") != std::string::npos);

  const std::string e_zero = R"({"materials": [{"name": "Y", "youngs_modulus_gpa": 0, "poisson_ratio": 0.3}]})";
  CHECK(error_of(e_zero).find("youngs_modulus_gpa") != std::string::npos);

  const std::string nu_neg = R"({"materials": [{"name": "Z", "youngs_modulus_gpa": 1, "poisson_ratio": -0.1}]})";
  CHECK(error_of(nu_neg).find("poisson_ratio") != std::string::npos);
}

TEST_CASE("duplicates, empty libraries and malformed text are rejected") {
  const std::string dup = R"({"materials": [
    {"name": "Polyimide", "youngs_modulus_gpa": 7.5, "poisson_ratio": 0.35},
    {"name": "Polyimide", "youngs_modulus_gpa": 8, "poisson_ratio": 0.35}]})";
  CHECK(error_of(dup).find("Polyimide") != std::string::npos);
  CHECK_FALSE(error_of(R"({"materials": []})").empty());
  CHECK_FALSE(error_of(R"({"things": []})").empty());
  CHECK_FALSE(error_of(R"({"materials": [{"name": "Q", "poisson_ratio": 0.3}]})").empty());
  CHECK_FALSE(error_of(R"({"materials": [{"name": 4, "youngs_modulus_gpa": 1, "poisson_ratio": 0.3}]})").empty());

  const std::string broken = "{\n  \"materials\": [\n    {\"name\": \"A\",, }\n  ]\n}";
  const std::string message = error_of(broken);
  CHECK(message.find("line 3") != std::string::npos);
}

TEST_CASE("missing file is a validation error") {
  CHECK_THROWS_AS(load_library_file("/nonexistent/materials.json"), ValidationError);
}

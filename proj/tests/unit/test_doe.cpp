#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "globtop/doe.hpp"
#include "globtop/error.hpp"
#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"
#include "globtop/shell_model.hpp"
#include "globtop/units.hpp"

using namespace globtop;

namespace {

constexpr double kAtm = units::kStandardAtmospherePa;

ExperimentPlan default_plan() {
  const auto materials = default_library().by_stiffness();
  const std::array<double, 3> t{150e-6, 200e-6, 250e-6};
  const std::array<double, 3> p{80 * kAtm, 90 * kAtm, 100 * kAtm};
  const std::array<Factor, 3> factors{material_factor(materials), thickness_factor(t), pressure_factor(p)};
  return build_l9(factors);
}

const std::array<double, 9> kSimulatedUm{12.59, 4.95, 18.94, 2.60, 33.18, 2.93, 1.70, 5.39, 1.16};

}  // namespace

TEST_CASE("codes reproduce the published array row by row") {
  const std::array<std::array<LevelCode, 3>, 9> expected{{{-1, 1, 1},
                                                          {1, -1, 1},
                                                          {-1, 0, 0},
                                                          {0, 1, -1},
                                                          {-1, -1, -1},
                                                          {0, -1, 0},
                                                          {1, 0, -1},
                                                          {0, 0, 1},
                                                          {1, 1, 0}}};
  CHECK(l9_codes() == expected);
  CHECK(default_plan().codes == expected);
}

TEST_CASE("realized runs substitute the default levels") {
  const ExperimentPlan plan = default_plan();
  const std::array<std::string, 9> material{"Polyimide", "Carbon epoxy resin", "Polyimide",
                                            "Parylene C", "Polyimide", "Parylene C",
                                            "Carbon epoxy resin", "Parylene C", "Carbon epoxy resin"};
  const std::array<double, 9> t_um{250, 150, 200, 250, 150, 150, 200, 200, 250};
  const std::array<double, 9> p_atm{100, 100, 90, 80, 80, 90, 80, 100, 90};
  for (std::size_t i = 0; i < 9; ++i) {
    CAPTURE(i);
    CHECK(plan.realized[i].material == material[i]);
    CHECK(units::m_to_um(plan.realized[i].thickness) == doctest::Approx(t_um[i]).epsilon(1e-14));
    CHECK(plan.realized[i].pressure / kAtm == doctest::Approx(p_atm[i]).epsilon(1e-14));
  }
}

TEST_CASE("brute-force orthogonality audit") {
  const auto& codes = l9_codes();
  CHECK(is_orthogonal(codes));
  for (std::size_t c1 = 0; c1 < 3; ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < 3; ++c2) {
      for (LevelCode l1 = -1; l1 <= 1; ++l1) {
        for (LevelCode l2 = -1; l2 <= 1; ++l2) {
          int count = 0;
          for (const auto& row : codes) count += (row[c1] == l1 && row[c2] == l2) ? 1 : 0;
          CHECK(count == 1);
        }
      }
    }
  }
  auto broken = codes;
  std::swap(broken[0][0], broken[1][0]);
  CHECK_FALSE(is_orthogonal(broken));
}

TEST_CASE("every realized factor pair occurs once") {
  const ExperimentPlan plan = default_plan();
  std::map<std::pair<std::string, double>, int> mt, mp;
  std::map<std::pair<double, double>, int> tp;
  for (const auto& r : plan.realized) {
    ++mt[{r.material, r.thickness}];
    ++mp[{r.material, r.pressure}];
    ++tp[{r.thickness, r.pressure}];
  }
  CHECK(mt.size() == 9);
  CHECK(mp.size() == 9);
  CHECK(tp.size() == 9);
}

TEST_CASE("plan construction is deterministic") {
  const ExperimentPlan a = default_plan();
  const ExperimentPlan b = default_plan();
  CHECK(a.codes == b.codes);
  CHECK(plan_csv(a, {}) == plan_csv(b, {}));
}

TEST_CASE("factor validation") {
  const auto materials = default_library().by_stiffness();
  const std::array<double, 3> t{150e-6, 200e-6, 250e-6};
  const std::array<double, 3> p{80 * kAtm, 90 * kAtm, 100 * kAtm};
  const std::array<double, 3> unsorted{200e-6, 150e-6, 250e-6};
  const std::array<double, 2> short_levels{1e-4, 2e-4};

  const std::array<Factor, 2> two{material_factor(materials), thickness_factor(t)};
  CHECK_THROWS_AS(build_l9(two), ValidationError);
  const std::array<Factor, 3> unsorted_t{material_factor(materials), thickness_factor(unsorted), pressure_factor(p)};
  CHECK_THROWS_AS(build_l9(unsorted_t), ValidationError);
  const std::array<Factor, 3> short_t{material_factor(materials), thickness_factor(short_levels), pressure_factor(p)};
  CHECK_THROWS_AS(build_l9(short_t), ValidationError);
  const std::array<Factor, 3> swapped{thickness_factor(t), material_factor(materials), pressure_factor(p)};
  CHECK_THROWS_AS(build_l9(swapped), ValidationError);
  const std::vector<Material> two_materials(materials.begin(), materials.begin() + 2);
  const std::array<Factor, 3> short_m{material_factor(two_materials), thickness_factor(t), pressure_factor(p)};
  CHECK_THROWS_AS(build_l9(short_m), ValidationError);
}

TEST_CASE("external responses come back in run order") {
  const ExperimentPlan plan = default_plan();
  std::array<double, 9> metres{};
  for (std::size_t i = 0; i < 9; ++i) metres[i] = units::um_to_m(kSimulatedUm[i]);
  const auto results = realize_responses(plan, default_library(), reference_cap(), external_responder(metres));
  REQUIRE(results.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(results[i].run == i + 1);
    CHECK(results[i].response == metres[i]);
    CHECK(results[i].codes == plan.codes[i]);
  }
  const std::array<double, 8> eight{};
  CHECK_THROWS_AS(external_responder(eight), ValidationError);
}

TEST_CASE("zero and analytical responders") {
  const ExperimentPlan plan = default_plan();
  const auto zeros = realize_responses(plan, default_library(), reference_cap(),
                                       [](std::size_t, const ShellCase&) { return 0.0; });
  for (const auto& r : zeros) CHECK(r.response == 0.0);

  const auto analytical = realize_responses(plan, default_library(), reference_cap(),
                                            [](std::size_t, const ShellCase& c) { return apex_deflection(c); });
  CHECK(units::m_to_um(analytical[6].response) == doctest::Approx(2.0436632866).epsilon(1e-9));
}

TEST_CASE("responder failures carry the run and keep their category") {
  const ExperimentPlan plan = default_plan();
  auto failing = [](std::size_t run, const ShellCase&) -> double {
    if (run == 4) throw NumericalError("solver diverged");
    return 1e-6;
  };
  try {
    realize_responses(plan, default_library(), reference_cap(), failing);
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("run 4") != std::string::npos);
  }
  auto nan = [](std::size_t, const ShellCase&) { return std::nan(""); };
  CHECK_THROWS_AS(realize_responses(plan, default_library(), reference_cap(), nan), NumericalError);
}

TEST_CASE("plan and responses CSV") {
  const ExperimentPlan plan = default_plan();
  const std::string csv = plan_csv(plan, {});
  CHECK(csv.rfind("run,material,thickness_um,pressure_atm,code_material,code_thickness,code_pressure\n", 0) == 0);
  CHECK(csv.find("1,Polyimide,250.00,100.00,-1,1,1\n") != std::string::npos);
  CHECK(csv.find("4,Parylene C,250.00,80.00,0,1,-1\n") != std::string::npos);

  std::array<double, 9> metres{};
  for (std::size_t i = 0; i < 9; ++i) metres[i] = units::um_to_m(kSimulatedUm[i]);
  const auto results = realize_responses(plan, default_library(), reference_cap(), external_responder(metres));
  const std::string text = responses_csv(results, ResponseSource::external, {});
  CHECK(text.find("response_um,source") != std::string::npos);
  const auto parsed = parse_responses_csv(text, {});
  REQUIRE(parsed.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(parsed[i].run == results[i].run);
    CHECK(parsed[i].realized.material == results[i].realized.material);
    CHECK(parsed[i].codes == results[i].codes);
    CHECK(parsed[i].response == doctest::Approx(results[i].response).epsilon(1e-9));
  }
  CHECK_THROWS_AS(parse_responses_csv("", {}), ValidationError);
  CHECK_THROWS_AS(parse_responses_csv("run,material\n1,x\n", {}), ValidationError);
}

TEST_CASE("response source names") {
  CHECK(parse_response_source("analytical") == ResponseSource::analytical);
  CHECK(parse_response_source("fem") == ResponseSource::fem);
  CHECK(parse_response_source("external") == ResponseSource::external);
  CHECK(to_string(ResponseSource::fem) == "fem");
  CHECK_THROWS_AS(parse_response_source("coventor"), ValidationError);
}

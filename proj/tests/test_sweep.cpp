#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "qtm/config.hpp"
#include "qtm/sweep.hpp"

using namespace qtm;
namespace fs = std::filesystem;

namespace {

SweepPlan smoke_plan() { return load_sweep_config(fs::path(QTM_PRESET_DIR) / "sweep_smoke.ini").plan(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("axis values") {
  const SweepAxis a{SweepParam::sigma, 0.5, 3.0, 6};
  CHECK(a.value(0) == 0.5);
  CHECK(a.value(5) == 3.0);
  CHECK(a.value(2) == doctest::Approx(1.5));
  CHECK(parse_sweep_param("k") == SweepParam::k);
  CHECK(std::string(to_string(SweepParam::R)) == "R");
  CHECK_THROWS_AS(parse_sweep_param("mass"), InvalidArgument);
}

TEST_CASE("plan validation") {
  auto p = smoke_plan();
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.axis2.param = SweepParam::lambda;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.axis1.count = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.axis2 = {SweepParam::sigma, 2.0, 1.0, 2};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.axis2 = {SweepParam::R, 4.0, 8.0, 2};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.axis2 = {SweepParam::k, 0.0, 8.0, 2};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = p;
  bad.workers = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);

  const auto cell = p.cell_scenario(1, 1);
  CHECK(cell.pulse.lambda == 40.0);
  CHECK(cell.packet.sigma == 1.5);
}

TEST_CASE("analytic overlay") {
  auto quiet = set_warning_handler([](std::string_view) {});
  auto p = smoke_plan();
  const auto swept = analytic_overlay(p);
  CHECK(swept.x_name == "sigma");
  CHECK(swept.y_name == "lambda_min");
  REQUIRE(swept.points.size() == 101);
  CHECK(swept.points.front().second == doctest::Approx(lambda_min_1d(1.0, 4.0, false)));

  SweepPlan fixed = p;
  fixed.base.pulse.lambda = 40.0;
  fixed.axis1 = {SweepParam::sigma, 0.5, 3.0, 4};
  fixed.axis2 = {SweepParam::k, 1.0, 10.0, 4};
  const auto iso = analytic_overlay(fixed);
  REQUIRE_FALSE(iso.points.empty());
  for (auto [s, k] : iso.points) CHECK(lambda_min_1d(s, k, false) == doctest::Approx(40.0).epsilon(1e-6));
  set_warning_handler(quiet);
}

TEST_CASE("memory estimate") {
  const auto g = make_grid(2, {-40.0, 40.0}, 512);
  CHECK(sweep_memory_estimate(*g, 2) == 2 * sweep_memory_estimate(*g, 1));
  CHECK(sweep_memory_estimate(*g, 1) >= 16u * g->size() * sizeof(cplx));
}

TEST_CASE("smoke sweep") {
  auto plan = smoke_plan();
  const auto result = run_sweep(plan);
  REQUIRE(result.cells.size() == 4);
  CHECK(result.failures == 0);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(result.at(0, j).value1 == 0.0);
    CHECK(std::abs(result.at(0, j).echo_excess()) < 1e-9);
    CHECK(result.at(0, j).reversed_fraction < 1e-6);
  }
  CHECK(result.at(1, 0).echo_excess() > 0.2);

  const auto dir = fs::temp_directory_path() / "qtm_test_sweep";
  fs::create_directories(dir);
  write_sweep_csv(dir / "w1.csv", result, std::vector<std::string>{"h"});
  plan.workers = 3;
  write_sweep_csv(dir / "w3.csv", run_sweep(plan), std::vector<std::string>{"h"});
  CHECK(slurp(dir / "w1.csv") == slurp(dir / "w3.csv"));
  const std::string text = slurp(dir / "w1.csv");
  CHECK(text.find("# axis1=lambda axis2=sigma\n") != std::string::npos);
  CHECK(text.find("axis1,axis2,peak_strength,peak_time,reversed_fraction\n") != std::string::npos);

  write_overlay_csv(dir / "overlay.csv", result.overlay);
  CHECK(fs::file_size(dir / "overlay.csv") > 0);
}

#include <filesystem>
#include <string>

#include <doctest.h>

#include "qtm/config.hpp"

using namespace qtm;
namespace fs = std::filesystem;

namespace {

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("ini document") {
  const auto doc = IniDocument::parse("# c\n[a]\nx = 1.5 ; tail\ny = one, two\n\n[b]\nn = 12\n", "t.ini");
  CHECK(doc.has_section("a"));
  CHECK(*doc.number("a", "x") == 1.5);
  CHECK(*doc.list("a", "y") == std::vector<std::string>{"one", "two"});
  CHECK(*doc.count("b", "n") == 12u);
  CHECK_FALSE(doc.number("b", "x").has_value());
  CHECK_NOTHROW(doc.reject_unused());

  CHECK(contains(error_of([] { IniDocument::parse("[a]\nx = 1\nx = 2\n", "d.ini"); }), "d.ini:3"));
  CHECK(contains(error_of([] { IniDocument::parse("x = 1\n", "d.ini"); }), "d.ini:1"));
  CHECK(contains(error_of([] { IniDocument::parse("[a]\nbroken\n", "d.ini"); }), "d.ini:2"));
  const auto bad = IniDocument::parse("[a]\nx = nan\nn = -3\n", "b.ini");
  CHECK(contains(error_of([&] { bad.number("a", "x"); }), "b.ini:2: [a] x:"));
  CHECK(contains(error_of([&] { bad.count("a", "n"); }), "b.ini:3: [a] n:"));
}

TEST_CASE("run config") {
  const std::string text =
      "[run]\nname = demo\ngeometry = 1d\n[packet]\nsigma = 0.8\nk = 5\n[pulse]\nlambda = 30\nwidth = 0.002\n"
      "[evolution]\nt_end = 3\n[grid]\nmode = explicit\npoints = 2048\nlo = -30\nhi = 50\n"
      "[output]\nsnapshots = 0, peak, 2.5\n";
  const auto c = parse_run_config(text, "demo.ini");
  CHECK(c.name == "demo");
  CHECK(c.scenario.packet.sigma == 0.8);
  CHECK(c.scenario.pulse.width == 0.002);
  CHECK(c.scenario.plan.dt == doctest::Approx(0.003));
  CHECK(c.scenario.plan.dt_pulse == doctest::Approx(4e-5));
  CHECK_FALSE(c.scenario.grid.automatic);
  CHECK(c.scenario.grid.points == 2048);
  REQUIRE(c.snapshots.size() == 3);
  CHECK(c.snapshots[1].at_peak);
  CHECK(c.snapshots[2].time == 2.5);

  SUBCASE("round trip") {
    const std::string once = dump(c);
    const auto again = parse_run_config(once);
    CHECK(dump(again) == once);
    CHECK(config_hash(once) == config_hash(dump(again)));
    CHECK(config_hash(once).size() == 16);
    CHECK(config_hash(once) != config_hash(once + " "));
    const auto header = artifact_header(once);
    CHECK(header.front() == std::string("qtm_version=") + code_version());
  }
}

TEST_CASE("run config errors carry lines") {
  auto err = [](const std::string& text) { return error_of([&] { parse_run_config(text, "e.ini"); }); };
  CHECK(contains(err("[run]\ngeometry = 3d\n"), "e.ini:2: [run] geometry"));
  CHECK(contains(err("[run]\nname = x\n[packet]\nsigmaa = 1\n"), "e.ini:4"));
  CHECK(contains(err("[wrong]\nx = 1\n"), "e.ini:1"));
  CHECK(contains(err("[packet]\nsigma = -1\n"), "e.ini:2: [packet] sigma"));
  CHECK(contains(err("[pulse]\nkind = square\n"), "e.ini:2: [pulse] kind"));
  CHECK(contains(err("[pulse]\nkind = instantaneous\nwidth = 0.001\n"), "e.ini:3"));
  CHECK(contains(err("[pulse]\nwidth = 0.5\n"), "[pulse]"));
  CHECK(contains(err("[grid]\nmode = explicit\npoints = 1000\nlo = -10\nhi = 10\n"), "[grid]"));
  CHECK(contains(err("[output]\nsnapshots = 1.0\n"), "e.ini:2: [output] snapshots"));
  CHECK(contains(err("[output]\nsnapshots = 9\n"), "e.ini:2: [output] snapshots"));
  CHECK(contains(err("[run]\ngeometry = 1d\n[packet]\nR = 4\n"), "e.ini:4: [packet] R"));
}

TEST_CASE("sweep config") {
  const auto c = load_sweep_config(fs::path(QTM_PRESET_DIR) / "sweep_smoke.ini");
  CHECK(c.axis1.param == SweepParam::lambda);
  CHECK(c.axis2.param == SweepParam::sigma);
  CHECK(c.axis1.value(1) == 40.0);
  const auto once = dump(c);
  CHECK(dump(parse_sweep_config(once)) == once);
  auto more = c;
  more.workers = 8;
  CHECK(dump(more) == once);

  const std::string base = "[sweep]\naxis1 = lambda\naxis1_range = 0, 40\naxis2 = ";
  CHECK(contains(error_of([&] { parse_sweep_config(base + "lambda\naxis2_range = 0, 1\n", "s.ini"); }), "s.ini"));
  CHECK(contains(error_of([&] { parse_sweep_config(base + "R\naxis2_range = 1, 2\n", "s.ini"); }), "R"));
  CHECK(contains(error_of([&] { parse_sweep_config(base + "sigma\naxis2_range = 2\n", "s.ini"); }), "s.ini:5"));
  CHECK(contains(error_of([&] { parse_sweep_config(base + "tau\naxis2_range = 1, 2\n", "s.ini"); }), "s.ini:4"));
  CHECK(contains(error_of([&] { parse_sweep_config("[run]\nname = x\n", "s.ini"); }), "[sweep]"));
}

TEST_CASE("lab config") {
  const auto c = load_lab_config(fs::path(QTM_PRESET_DIR) / "lithium7.ini");
  CHECK(c.context.mass == doctest::Approx(7.016 * units::kAtomicMassUnit));
  CHECK(c.lambdas == std::vector<double>{10.0, 200.0});
  const auto once = dump(c);
  CHECK(dump(parse_lab_config(once)) == once);
  CHECK(contains(error_of([] { parse_lab_config("[lab]\nt0 = 0.01\n", "l.ini"); }), "mass"));
  CHECK(contains(error_of([] { parse_lab_config("[lab]\nmass_u = 7\n", "l.ini"); }), "t0"));
  CHECK(contains(error_of([] { parse_lab_config("[lab]\nmass_u = 7\nt0 = -1\n", "l.ini"); }), "l.ini"));
}

TEST_CASE("bundled presets parse") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(QTM_PRESET_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    const std::string stem = entry.path().stem().string();
    CAPTURE(stem);
    if (stem.rfind("sweep_", 0) == 0) {
      const auto c = load_sweep_config(entry.path());
      CHECK(dump(parse_sweep_config(dump(c))) == dump(c));
    } else if (stem == "lithium7") {
      CHECK_NOTHROW(load_lab_config(entry.path()));
    } else {
      const auto c = load_run_config(entry.path());
      CHECK(dump(parse_run_config(dump(c))) == dump(c));
    }
    ++seen;
  }
  CHECK(seen >= 14);
}

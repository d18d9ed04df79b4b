#include "pdfrac/diagnostics.hpp"
#include "pdfrac/errors.hpp"
#include "pdfrac/integrator.hpp"
#include "pdfrac/io.hpp"
#include "pdfrac/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace pdfrac;
namespace fs = std::filesystem;

namespace {

constexpr const char *kMinimal = R"(
# smallest useful scenario
[domain]
x0 = 0
x1 = 2 cm
y0 = 0
y1 = 20 mm

[discretization]
horizon = 4 mm
h = 1 mm

[time]
dt = 4 ns
final_time = 0.2 us
)";

std::string error_of(const std::string &text) {
  try {
    parse_config(text, "test.ini");
  } catch (const ConfigError &e) {
    return e.what();
  }
  return {};
}

fs::path temp_dir(const std::string &name) {
  const auto dir = fs::temp_directory_path() / ("pdfrac_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST(Config, MinimalFileWithUnits) {
  const ScenarioConfig c = parse_config(kMinimal);
  EXPECT_DOUBLE_EQ(c.material_box.x1, 0.02);
  EXPECT_DOUBLE_EQ(c.material_box.y1, 0.02);
  EXPECT_DOUBLE_EQ(c.horizon, 4e-3);
  EXPECT_DOUBLE_EQ(c.h, 1e-3);
  EXPECT_DOUBLE_EQ(c.dt, 4e-9);
  EXPECT_DOUBLE_EQ(c.final_time, 2e-7);
  EXPECT_EQ(c.time_plan().steps(), 50u);
  EXPECT_EQ(c.material.preset, "nu0245");
  const Scenario s = instantiate(c);
  EXPECT_EQ(s.disc->grid.size(), 21u * 21u);
}

TEST(Config, UnknownKeyNamesLineAndKey) {
  std::string text = kMinimal;
  text.replace(text.find("horizon"), 7, "epsilonn");
  const std::string err = error_of(text);
  EXPECT_NE(err.find("test.ini:10:"), std::string::npos) << err;
  EXPECT_NE(err.find("epsilonn"), std::string::npos) << err;
}

TEST(Config, BadUnitAndBadNumber) {
  std::string text = kMinimal;
  text.replace(text.find("1 mm"), 4, "1 ns");
  std::string err = error_of(text);
  EXPECT_NE(err.find("test.ini:11:"), std::string::npos) << err;
  EXPECT_NE(err.find("unit"), std::string::npos) << err;

  text = kMinimal;
  text.replace(text.find("4 ns"), 4, "fast");
  err = error_of(text);
  EXPECT_NE(err.find("test.ini:14: [time] dt"), std::string::npos) << err;
}

TEST(Config, StructuralErrors) {
  EXPECT_NE(error_of("[nonsense]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(error_of("[domain\n").find("malformed"), std::string::npos);
  EXPECT_NE(error_of("[domain]\nx0\n").find("key = value"), std::string::npos);
  EXPECT_NE(error_of("horizon = 1\n").find("inside a section"), std::string::npos);
  EXPECT_NE(error_of("preset = crack_eps3_h2\n").find("unknown preset"), std::string::npos);
  EXPECT_FALSE(error_of("[domain]\nx1 = 1\n").empty()); // missing values fail validation
  std::string bad_collar = std::string(kMinimal) + "[collar]\nregion = 1, 2, 1, 2\ncomponents = x\n";
  EXPECT_NE(error_of(bad_collar).find("outside"), std::string::npos);
}

TEST(Config, PresetSeedAndOverride) {
  const ScenarioConfig c =
      parse_config("preset = crack_eps8_h4\n[time]\nfinal_time = 1 us\n[output]\ndir = /tmp/x\n");
  EXPECT_EQ(c.name, "crack_eps8_h4");
  EXPECT_DOUBLE_EQ(c.h, 2e-3);
  EXPECT_DOUBLE_EQ(c.final_time, 1e-6);
  EXPECT_EQ(c.collars.size(), 3u);
  EXPECT_EQ(c.output.directory, fs::path("/tmp/x"));
  EXPECT_NE(error_of("[time]\ndt = 1 ns\npreset = relaxation\n").find("unknown key 'preset'"),
            std::string::npos);
}

TEST(Config, FormatRoundTrip) {
  for (const auto &p : preset_list()) {
    const ScenarioConfig a = preset(p.name);
    const ScenarioConfig b = parse_config(format_config(a), p.name);
    EXPECT_EQ(format_config(b), format_config(a)) << p.name;
    EXPECT_EQ(b.cracks.size(), a.cracks.size());
    EXPECT_EQ(b.collars.size(), a.collars.size());
    EXPECT_EQ(b.h, a.h);
  }
}

TEST(Config, RandomInputNeverCrashes) {
  std::mt19937_64 rng(1);
  const std::string alphabet = "[]=#;,.-+e0123456789 abcdxyhmnsu_\n\t";
  const std::string base = kMinimal;
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    if (trial % 2 == 0) {
      const std::size_t len = rng() % 200;
      for (std::size_t k = 0; k < len; ++k)
        text.push_back(trial % 4 == 0 ? static_cast<char>(rng() % 256)
                                      : alphabet[rng() % alphabet.size()]);
    } else {
      text = base;
      for (int m = 0; m < 3; ++m)
        text[rng() % text.size()] = alphabet[rng() % alphabet.size()];
    }
    try {
      parse_config(text, "fuzz");
    } catch (const ConfigError &) {
    }
  }
  SUCCEED();
}

TEST(Presets, CrackNodeCounts) {
  const std::size_t expected[] = {900, 3481, 13689};
  int k = 0;
  for (int ratio : {2, 4, 8}) {
    const ScenarioConfig c = crack_scenario(8, ratio);
    const Grid g(c.grid_box(), c.h);
    EXPECT_EQ(g.size(), expected[k++]) << ratio;
  }
  // Finest preset: count from the lattice arithmetic only.
  const ScenarioConfig fine = crack_scenario(1, 8);
  const Rect box = fine.grid_box();
  const long n = std::lround((box.x1 - box.x0) / fine.h) + 1;
  EXPECT_EQ(n, 817);
  EXPECT_NEAR(static_cast<double>(n * n), 668e3, 0.01 * 668e3);
  EXPECT_THROW(crack_scenario(3, 2), ConfigError);
  EXPECT_THROW(crack_scenario(8, 3), ConfigError);
}

TEST(Presets, CrackInitialState) {
  const Scenario s = instantiate(crack_scenario(8, 2));
  EXPECT_EQ(s.tips.size(), 1u);
  EXPECT_NEAR(s.tips[0].initial_length, 0.02, 1e-15);
  const DiagnosticRecord r = diagnose(*s.op, s.initial, s.tips);
  EXPECT_EQ(r.max_z, 0.0);
  EXPECT_NEAR(r.crack_length, 0.02, 1e-15);
  EXPECT_NEAR(r.ge, 10.0, 1e-12);
  // Bottom collars pull the faces apart at 1 m/s from the first step.
  const Integrator integ(*s.op, s.collars, s.body, s.config.dt, s.initial);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i : s.collars.nodes(c))
      EXPECT_EQ(integ.state().v[i].x, c == 0 ? -1.0 : 1.0);
}

TEST(Presets, BendingGeometryAndLoad) {
  const Scenario s = instantiate(bending_scenario("single"));
  EXPECT_EQ(s.disc->grid.size(), 101u * 21u);
  const DiagnosticRecord r = diagnose(*s.op, s.initial, s.tips);
  EXPECT_NEAR(r.ge, 7.5, 1e-12);
  std::vector<Vec2> b(s.op->size());
  s.body(1e-4, b);
  double peak = 0.0;
  std::size_t loaded = 0;
  for (const auto &v : b) {
    EXPECT_EQ(v.x, 0.0);
    peak = std::min(peak, v.y);
    loaded += v.y != 0.0;
  }
  EXPECT_NEAR(peak, -1e9, 1e-3);
  EXPECT_GT(loaded, 0u);
  const Scenario d = instantiate(bending_scenario("double"));
  EXPECT_EQ(d.tips.size(), 2u);
  EXPECT_NEAR(diagnose(*d.op, d.initial, d.tips).ge, 15.0, 1e-12);
  EXPECT_THROW(bending_scenario("triple"), ConfigError);
}

TEST(Presets, RelaxationAndManufactured) {
  const Scenario r = instantiate(relaxation_scenario());
  EXPECT_TRUE(r.collars.empty());
  EXPECT_EQ(r.plan.steps(), 10000u);
  double umax = 0.0;
  for (const auto &u : r.initial.u)
    umax = std::max(umax, std::abs(u.x));
  EXPECT_NEAR(umax, 1e-6, 1e-12);
  const Scenario m = instantiate(manufactured_scenario());
  EXPECT_NEAR(m.config.h, m.config.horizon / 4, 1e-18);
  for (const auto &u : m.initial.u)
    EXPECT_EQ(u, Vec2{});
  EXPECT_EQ(preset_list().size(), 16u);
  EXPECT_THROW(preset("crack_eps8_h"), ConfigError);
}

TEST(Io, CsvRoundTripIsExact) {
  const auto dir = temp_dir("csv");
  DiagnosticRecord a{1e-6, 0.1, 1.0 / 3.0, 2.5e-300, 7.0, 0.0, 10.0, 0.02, 1.25, 3e-7, 0.5};
  DiagnosticRecord b = a;
  b.t = 2e-6;
  b.max_z = std::nextafter(1.0, 2.0);
  {
    CsvWriter w(dir / "d.csv");
    w.append(a);
    w.append(b);
    w.flush();
  }
  const auto rows = read_csv(dir / "d.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], a);
  EXPECT_EQ(rows[1], b);
  {
    CsvWriter w(dir / "empty.csv");
  }
  EXPECT_TRUE(read_csv(dir / "empty.csv").empty());
  std::ifstream in(dir / "empty.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kCsvHeader);
  fs::remove_all(dir);
}

TEST(Io, VtkLayout) {
  const auto dir = temp_dir("vtk");
  const Grid g({0.0, 2e-3, 0.0, 1e-3}, 1e-3);
  FieldState s = FieldState::zeros(g.size());
  s.t = 1.5e-6;
  s.u[4] = {1e-7, -2e-7};
  const std::vector<double> z(g.size(), 0.5);
  const std::vector<double> theta(g.size(), -1e-4);
  write_vtk(dir / snapshot_name("snapshot", 12), g, s, z, theta);
  EXPECT_EQ(snapshot_name("snapshot", 12), "snapshot_00000012.vtk");
  std::ifstream in(dir / "snapshot_00000012.vtk");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  EXPECT_EQ(text.rfind("# vtk DataFile Version 3.0\n", 0), 0u);
  for (const char *needle : {"ASCII\nDATASET POLYDATA\nPOINTS 6 double\n", "VERTICES 6 12\n",
                             "POINT_DATA 6\n", "VECTORS displacement double\n",
                             "VECTORS velocity double\n", "SCALARS damage double 1\n",
                             "SCALARS theta double 1\n", "\n0.5\n", "\n-0.0001\n"})
    EXPECT_NE(text.find(needle), std::string::npos) << needle;
  fs::remove_all(dir);
}

TEST(Config, ShippedFilesMatchPresets) {
  for (const char *name : {"crack_eps8_h4", "relaxation", "manufactured", "bending_single"}) {
    const ScenarioConfig file = load_config(fs::path(PDFRAC_CONFIG_DIR) / (std::string(name) + ".ini"));
    ScenarioConfig ref = preset(name);
    // Output settings are free to differ.
    ref.output = file.output;
    const ScenarioConfig again = parse_config(format_config(file));
    EXPECT_EQ(file.name, ref.name);
    EXPECT_EQ(file.cracks.size(), ref.cracks.size()) << name;
    EXPECT_EQ(file.collars.size(), ref.collars.size()) << name;
    const double scalars[][2] = {{file.horizon, ref.horizon},
                                 {file.h, ref.h},
                                 {file.dt, ref.dt},
                                 {file.final_time, ref.final_time},
                                 {file.pad, ref.pad},
                                 {file.material_box.x1, ref.material_box.x1},
                                 {file.material_box.y1, ref.material_box.y1},
                                 {file.manufactured.omega, ref.manufactured.omega},
                                 {file.initial.amplitude, ref.initial.amplitude},
                                 {file.load.f_max, ref.load.f_max}};
    for (const auto &s : scalars)
      EXPECT_NEAR(s[0], s[1], 1e-12 * std::abs(s[1])) << name;
    for (std::size_t k = 0; k < ref.collars.size(); ++k) {
      EXPECT_NEAR(file.collars[k].region.x0, ref.collars[k].region.x0, 1e-12) << name;
      EXPECT_NEAR(file.collars[k].region.y1, ref.collars[k].region.y1, 1e-12) << name;
      EXPECT_EQ(file.collars[k].kind, ref.collars[k].kind) << name;
    }
    const Grid a(file.grid_box(), file.h);
    const Grid b(ref.grid_box(), ref.h);
    EXPECT_EQ(a.size(), b.size()) << name;
    EXPECT_EQ(again.name, file.name);
  }
}

#pragma once

#include "pdfrac/diagnostics.hpp"
#include "pdfrac/geometry.hpp"
#include "pdfrac/integrator.hpp"
#include "pdfrac/nonlocal.hpp"
#include "pdfrac/potentials.hpp"
#include "pdfrac/verification.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pdfrac {

struct MaterialSpec {
  std::string preset = "nu0245";
  std::optional<double> density;
  std::optional<double> c;
  std::optional<double> beta;
  std::optional<double> cbar;
  // Switches g to the convex-concave form when both are set.
  std::optional<double> c_g;
  std::optional<double> beta_g;
  std::string influence = "linear"; // linear | constant
  std::optional<double> fracture_toughness;
  std::optional<double> bulk_modulus;

  MaterialModel build(double horizon) const;
};

struct CollarSpec {
  Rect region;
  bool x = true;
  bool y = true;
  CollarKind kind = CollarKind::FixedVelocityZero;
  Vec2 value;

  CollarCondition condition() const;
};

struct LoadSpec {
  enum class Kind { None, Constant, RampLine, Manufactured };
  Kind kind = Kind::None;
  Vec2 value;          // Constant
  Vec2 a;              // RampLine endpoints (on the top edge)
  Vec2 b;
  double f_max = 0.0;  // N m^-3 s^-1 at the midpoint
  Vec2 direction{0.0, 1.0};
};

struct InitialSpec {
  enum class Kind { Zero, Bump, Manufactured };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  Vec2 center;
  double sigma = 0.0;
  Vec2 direction{1.0, 0.0};
};

struct ManufacturedSpec {
  double amplitude = 1e-6;
  double omega = 0.0;
};

struct CrackSpec {
  Segment segment;
  double band = std::numeric_limits<double>::infinity();
};

struct OutputPlan {
  std::filesystem::path directory = "out";
  std::size_t snapshot_stride = 0;
  std::size_t diagnostic_stride = 1;
  bool csv = true;
  bool vtk = true;
};

struct StudySpec {
  std::vector<double> h;     // spatial levels
  std::vector<double> times; // comparison times
  std::vector<double> dts;   // temporal study steps
  double dt_ref = 0.0;
  double final_time = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  MaterialSpec material;
  Rect material_box;   // the body
  double pad = 0.0;    // grid box = material box grown by pad
  BoundaryWeightMode weight_mode = BoundaryWeightMode::Indicator;
  std::vector<CrackSpec> cracks;
  double horizon = 0.0;
  double h = 0.0;
  double dt = 0.0;
  double final_time = 0.0;
  std::vector<CollarSpec> collars;
  LoadSpec load;
  InitialSpec initial;
  ManufacturedSpec manufactured;
  OutputPlan output;
  StudySpec study;

  Rect grid_box() const;
  DomainSpec domain() const;
  TimePlan time_plan() const;
  /// Tip, +direction and the part of each crack inside the material box.
  std::vector<CrackTip> crack_tips() const;
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Everything needed to run a configured scenario.
struct Scenario {
  ScenarioConfig config;
  std::shared_ptr<const Discretization> disc;
  std::shared_ptr<const NonlocalOperator> op;
  CollarSet collars;
  BodyForce body;
  FieldState initial;
  std::vector<CrackTip> tips;
  TimePlan plan;
};

Scenario instantiate(const ScenarioConfig &config);

/// Crack-propagation presets: horizon in {8, 4, 2, 1} mm and h = horizon /
/// ratio with ratio in {2, 4, 8}.
ScenarioConfig crack_scenario(int horizon_mm, int ratio);
/// Three-point bending presets: "single" or "double".
ScenarioConfig bending_scenario(const std::string &cracks);
/// Gaussian displacement bump, no collars and b = 0.
ScenarioConfig relaxation_scenario();
/// Smooth manufactured solution on [0, 0.05]^2.
ScenarioConfig manufactured_scenario();

struct PresetInfo {
  std::string name;
  std::string description;
};
std::vector<PresetInfo> preset_list();
ScenarioConfig preset(const std::string &name);

/// Config parsing. Throws ConfigError with "<source>:<line>: ..." context.
ScenarioConfig parse_config(std::string_view text, const std::string &source = "<string>");
ScenarioConfig load_config(const std::filesystem::path &path);
/// Serializes a config in the format accepted by parse_config.
std::string format_config(const ScenarioConfig &config);

/// Study runner that re-instantiates the scenario with the given h and dt.
StudyRunner make_study_runner(const ScenarioConfig &config);

} // namespace pdfrac

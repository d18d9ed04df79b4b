#include "pdfrac/diagnostics.hpp"
#include "pdfrac/errors.hpp"
#include "pdfrac/integrator.hpp"
#include "pdfrac/io.hpp"
#include "pdfrac/log.hpp"
#include "pdfrac/parallel.hpp"
#include "pdfrac/scenario.hpp"
#include "pdfrac/verification.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace pdfrac;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kNumerical = 3, kProperty = 4 };

struct Common {
  std::string out;
  int threads = 1;
  std::optional<std::size_t> snapshot_stride;
  std::uint64_t seed = 12345;
};

ScenarioConfig load(const std::string &path, const Common &common) {
  ScenarioConfig c = load_config(path);
  if (!common.out.empty())
    c.output.directory = common.out;
  if (common.snapshot_stride)
    c.output.snapshot_stride = *common.snapshot_stride;
  return c;
}

void prepare_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("output directory '" + dir.string() + "' is not writable");
}

int cmd_run(const std::string &path, const Common &common) {
  const ScenarioConfig config = load(path, common);
  const Scenario s = instantiate(config);
  const fs::path dir = config.output.directory;
  prepare_dir(dir);
  std::optional<CsvWriter> csv;
  if (config.output.csv)
    csv.emplace(dir / "diagnostics.csv");

  std::printf("scenario %s: %zu nodes, %zu bonds, dt = %.6g us, T = %.6g us, %zu steps\n",
              config.name.c_str(), s.disc->grid.size(), s.disc->bonds.bonds(), config.dt * 1e6,
              config.final_time * 1e6, s.plan.steps());
  Integrator integ(*s.op, s.collars, s.body, config.dt, s.initial);
  const std::size_t last = s.plan.steps();
  DiagnosticRecord final_record;
  auto observer = [&](std::size_t k, const FieldState &state) {
    if (csv && (k % config.output.diagnostic_stride == 0 || k == last)) {
      final_record = diagnose(*s.op, state, s.tips);
      csv->append(final_record);
    }
    if (config.output.vtk && config.output.snapshot_stride > 0 &&
        (k % config.output.snapshot_stride == 0 || k == last)) {
      std::vector<double> theta(s.op->size());
      s.op->hydrostatic_strains(state.u, theta);
      const auto z = damage_field(*s.op, state.u);
      write_vtk(dir / snapshot_name("snapshot", k), s.disc->grid, state, z, theta);
    }
  };
  try {
    const RunSummary summary = run(integ, s.plan, observer);
    if (csv)
      csv->flush();
    std::printf("finished %zu steps in %.2f s\n", summary.steps, summary.wall_seconds);
    if (csv)
      std::printf("t = %.6g us  total energy = %.6g J  crack length = %.6g m  max Z = %.6g\n",
                  final_record.t * 1e6, final_record.total, final_record.crack_length,
                  final_record.max_z);
  } catch (const NumericalError &) {
    if (csv)
      csv->flush();
    throw;
  }
  return kOk;
}

void write_rows(const fs::path &path, const std::string &header,
                const std::vector<std::string> &rows) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error(path.string() + ": cannot open for writing");
  out << header << "\n";
  for (const auto &r : rows)
    out << r << "\n";
}

int cmd_study_spatial(const std::string &path, const Common &common,
                      std::optional<double> min_rate) {
  const ScenarioConfig config = load(path, common);
  if (config.study.h.size() != 3 || config.study.times.empty())
    throw ConfigError("[study] needs three h levels and at least one comparison time");
  prepare_dir(config.output.directory);
  const auto study = spatial_convergence_study(make_study_runner(config), config.horizon,
                                               config.study.h, config.dt, config.study.times);
  bool ok = true;
  std::vector<std::string> rows;
  std::printf("levels:");
  for (std::size_t k = 0; k < study.h.size(); ++k)
    std::printf("  h = %.4g mm (%zu nodes)", study.h[k] * 1e3, study.nodes[k]);
  std::printf("\n%10s %14s %14s %8s\n", "t [us]", "e12", "e23", "rate");
  for (const auto &r : study.rows) {
    std::printf("%10.4g %14.6e %14.6e %8.4f%s\n", r.t * 1e6, r.e12, r.e23, r.rate,
                r.rate_defined ? "" : "  (undefined)");
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d", r.horizon, r.t, r.e12,
                  r.e23, r.rate, r.rate_defined ? 1 : 0);
    rows.emplace_back(buf);
    if (min_rate && (!r.rate_defined || r.rate < *min_rate))
      ok = false;
  }
  write_rows(config.output.directory / "study_spatial.csv", "horizon,t,e12,e23,rate,defined",
             rows);
  return ok ? kOk : kProperty;
}

int cmd_study_temporal(const std::string &path, const Common &common, std::vector<double> range) {
  const ScenarioConfig config = load(path, common);
  if (config.study.dts.empty() || !(config.study.dt_ref > 0.0) || !(config.study.final_time > 0.0))
    throw ConfigError("[study] needs dts, dt_ref and final_time");
  prepare_dir(config.output.directory);
  const auto study = temporal_convergence_study(make_study_runner(config), config.h,
                                                config.study.dts, config.study.dt_ref,
                                                config.study.final_time);
  std::vector<std::string> rows;
  std::printf("%12s %14s %8s\n", "dt [ns]", "error", "order");
  for (const auto &r : study.rows) {
    std::printf("%12.4g %14.6e %8.4f\n", r.dt * 1e9, r.error, r.order);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.dt, r.error, r.order);
    rows.emplace_back(buf);
  }
  std::printf("fitted order: %.4f\n", study.fitted_order);
  write_rows(config.output.directory / "study_temporal.csv", "dt,error,order", rows);
  if (range.size() == 2 &&
      (!study.order_defined || study.fitted_order < range[0] || study.fitted_order > range[1]))
    return kProperty;
  return kOk;
}

int cmd_verify(const Common &common) {
  bool ok = true;
  auto report = [&](bool pass, const std::string &what) {
    std::printf("[%s] %s\n", pass ? "PASS" : "FAIL", what.c_str());
    ok = ok && pass;
  };

  // Oracle equivalence on a 16 x 16 grid with horizon 4h.
  {
    const double h = 1e-3;
    const MaterialModel m = material_preset("nu0245", 4 * h);
    DomainSpec spec{{0.0, 15 * h, 0.0, 15 * h}, {}};
    auto disc = Discretization::build(spec, h, 4 * h);
    const NonlocalOperator op(disc, m);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const auto u = random_field(op.size(), 1e-6, common.seed + static_cast<std::uint64_t>(k));
      worst = std::max(worst, max_relative_difference(op.assemble(u), brute_force_force(*disc, m, u)));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "oracle equivalence: max relative difference %.3e", worst);
    report(worst <= 1e-12, buf);
  }
  // Lipschitz bound.
  {
    const double h = 1e-3;
    const auto r = lipschitz_l2_suite(material_preset("nu0245", 4 * h), 24, h, 50, common.seed);
    char buf[128];
    std::snprintf(buf, sizeof buf, "Lipschitz bound: max ratio %.4f", r.max_ratio);
    report(r.ok, buf);
  }
  // Projection bound.
  {
    const double gammas[] = {0.5, 1.0};
    const double hs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
    const auto r = projection_error_suite(gammas, hs);
    for (const auto &c : r.cases) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "projection bound (%s, gamma %.2g): exponent %.3f",
                    c.name.c_str(), c.gamma, c.fitted_exponent);
      report(c.bound_ok && c.exponent_ok, buf);
    }
  }
  return ok ? kOk : kProperty;
}

int cmd_presets(const std::string &write_dir) {
  for (const auto &p : preset_list()) {
    std::printf("%-18s %s\n", p.name.c_str(), p.description.c_str());
    if (!write_dir.empty()) {
      prepare_dir(write_dir);
      std::ofstream out(fs::path(write_dir) / (p.name + ".ini"));
      out << format_config(preset(p.name));
    }
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"State-based peridynamic fracture simulator"};
  app.fallthrough(); // global options may follow the subcommand
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out, "Output directory (overrides the config)");
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--snapshot-stride", common.snapshot_stride, "Steps between VTK snapshots");
  app.add_option("--seed", common.seed, "Seed for verification randomness");

  std::string config_path;
  auto *run_cmd = app.add_subcommand("run", "Run a scenario");
  run_cmd->add_option("config", config_path, "Config file")->required();

  auto *spatial = app.add_subcommand("study-spatial", "Spatial convergence study");
  spatial->add_option("config", config_path, "Config file")->required();
  std::optional<double> min_rate;
  spatial->add_option("--min-rate", min_rate, "Fail (exit 4) when a rate is below this value");

  auto *temporal = app.add_subcommand("study-temporal", "Temporal convergence study");
  temporal->add_option("config", config_path, "Config file")->required();
  std::vector<double> order_range;
  temporal->add_option("--order-range", order_range, "Accepted fitted order: LO HI")
      ->expected(2);

  auto *verify = app.add_subcommand("verify", "Run the property suites");
  auto *presets = app.add_subcommand("presets", "List shipped scenarios");
  std::string write_dir;
  presets->add_option("--write", write_dir, "Write each preset as a config file into DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  set_thread_count(common.threads);

  try {
    if (*run_cmd)
      return cmd_run(config_path, common);
    if (*spatial)
      return cmd_study_spatial(config_path, common, min_rate);
    if (*temporal)
      return cmd_study_temporal(config_path, common, order_range);
    if (*verify)
      return cmd_verify(common);
    if (*presets)
      return cmd_presets(write_dir);
  } catch (const ConfigError &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const NumericalError &e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const UnsupportedConfiguration &e) {
    std::fprintf(stderr, "unsupported configuration: %s\n", e.what());
    return kConfig;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kUsage;
}

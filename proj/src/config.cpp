#include "pdfrac/errors.hpp"
#include "pdfrac/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pdfrac {

namespace {

enum class Unit { None, Length, Time };

struct Context {
  const std::string &source;
  int line;
  const std::string &section;
  const std::string &key;

  [[noreturn]] void fail(const std::string &what) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": [" + section + "] " + key + ": " +
                      what);
  }
};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double unit_scale(std::string_view unit, Unit kind, const Context &ctx) {
  if (unit.empty())
    return 1.0;
  if (kind == Unit::Length) {
    if (unit == "m")
      return 1.0;
    if (unit == "cm")
      return 1e-2;
    if (unit == "mm")
      return 1e-3;
    if (unit == "um")
      return 1e-6;
  } else if (kind == Unit::Time) {
    if (unit == "s")
      return 1.0;
    if (unit == "ms")
      return 1e-3;
    if (unit == "us")
      return 1e-6;
    if (unit == "ns")
      return 1e-9;
  }
  ctx.fail("unsupported unit '" + std::string(unit) + "'");
}

double parse_number(std::string_view text, Unit kind, const Context &ctx) {
  text = trim(text);
  if (text.empty())
    ctx.fail("expected a number");
  const char *begin = text.data();
  const char *end = text.data() + text.size();
  if (*begin == '+')
    ++begin;
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr == begin)
    ctx.fail("expected a number, got '" + std::string(text) + "'");
  if (!std::isfinite(value))
    ctx.fail("value must be finite");
  const std::string_view unit = trim(std::string_view(res.ptr, static_cast<std::size_t>(end - res.ptr)));
  return value * unit_scale(unit, kind, ctx);
}

std::vector<double> parse_list(std::string_view text, Unit kind, const Context &ctx) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma), kind, ctx));
    if (comma == std::string_view::npos)
      break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

Vec2 parse_vec2(std::string_view text, Unit kind, const Context &ctx) {
  const auto v = parse_list(text, kind, ctx);
  if (v.size() != 2)
    ctx.fail("expected two comma-separated values");
  return {v[0], v[1]};
}

bool parse_bool(std::string_view text, const Context &ctx) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1" || text == "on")
    return true;
  if (text == "false" || text == "no" || text == "0" || text == "off")
    return false;
  ctx.fail("expected true or false");
}

std::size_t parse_count(std::string_view text, const Context &ctx) {
  text = trim(text);
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    ctx.fail("expected a non-negative integer");
  return v;
}

using Setter = std::function<void(ScenarioConfig &, std::string_view, const Context &)>;
using SectionTable = std::map<std::string, Setter, std::less<>>;

Setter length(double ScenarioConfig::*field) {
  return [field](ScenarioConfig &c, std::string_view v, const Context &ctx) {
    c.*field = parse_number(v, Unit::Length, ctx);
  };
}

Setter time(double ScenarioConfig::*field) {
  return [field](ScenarioConfig &c, std::string_view v, const Context &ctx) {
    c.*field = parse_number(v, Unit::Time, ctx);
  };
}

Setter optional_number(std::optional<double> MaterialSpec::*field) {
  return [field](ScenarioConfig &c, std::string_view v, const Context &ctx) {
    c.material.*field = parse_number(v, Unit::None, ctx);
  };
}

const std::map<std::string, SectionTable, std::less<>> &tables() {
  static const std::map<std::string, SectionTable, std::less<>> t = {
      {"scenario",
       {{"name", [](ScenarioConfig &c, std::string_view v, const Context &) {
           c.name = std::string(trim(v));
         }}}},
      {"material",
       {{"preset",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const std::string p(trim(v));
           if (p != "nu022" && p != "nu0245")
             ctx.fail("unknown material preset '" + p + "'");
           c.material.preset = p;
         }},
        {"density", optional_number(&MaterialSpec::density)},
        {"c", optional_number(&MaterialSpec::c)},
        {"beta", optional_number(&MaterialSpec::beta)},
        {"cbar", optional_number(&MaterialSpec::cbar)},
        {"c_g", optional_number(&MaterialSpec::c_g)},
        {"beta_g", optional_number(&MaterialSpec::beta_g)},
        {"fracture_toughness", optional_number(&MaterialSpec::fracture_toughness)},
        {"bulk_modulus", optional_number(&MaterialSpec::bulk_modulus)},
        {"influence",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const std::string s(trim(v));
           if (s != "linear" && s != "constant")
             ctx.fail("expected 'linear' or 'constant'");
           c.material.influence = s;
         }}}},
      {"domain",
       {{"x0", [](ScenarioConfig &c, std::string_view v,
                  const Context &ctx) { c.material_box.x0 = parse_number(v, Unit::Length, ctx); }},
        {"x1", [](ScenarioConfig &c, std::string_view v,
                  const Context &ctx) { c.material_box.x1 = parse_number(v, Unit::Length, ctx); }},
        {"y0", [](ScenarioConfig &c, std::string_view v,
                  const Context &ctx) { c.material_box.y0 = parse_number(v, Unit::Length, ctx); }},
        {"y1", [](ScenarioConfig &c, std::string_view v,
                  const Context &ctx) { c.material_box.y1 = parse_number(v, Unit::Length, ctx); }},
        {"pad", length(&ScenarioConfig::pad)},
        {"weight",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const auto s = trim(v);
           if (s == "indicator")
             c.weight_mode = BoundaryWeightMode::Indicator;
           else if (s == "taper")
             c.weight_mode = BoundaryWeightMode::LinearTaper;
           else
             ctx.fail("expected 'indicator' or 'taper'");
         }}}},
      {"crack",
       {{"a", [](ScenarioConfig &c, std::string_view v,
                 const Context &ctx) { c.cracks.back().segment.a = parse_vec2(v, Unit::Length, ctx); }},
        {"b", [](ScenarioConfig &c, std::string_view v,
                 const Context &ctx) { c.cracks.back().segment.b = parse_vec2(v, Unit::Length, ctx); }},
        {"band", [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           c.cracks.back().band = parse_number(v, Unit::Length, ctx);
         }}}},
      {"discretization",
       {{"horizon", length(&ScenarioConfig::horizon)}, {"h", length(&ScenarioConfig::h)}}},
      {"time",
       {{"dt", time(&ScenarioConfig::dt)}, {"final_time", time(&ScenarioConfig::final_time)}}},
      {"collar",
       {{"region",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const auto r = parse_list(v, Unit::Length, ctx);
           if (r.size() != 4)
             ctx.fail("expected x0, x1, y0, y1");
           c.collars.back().region = {r[0], r[1], r[2], r[3]};
         }},
        {"components",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const auto s = trim(v);
           if (s != "x" && s != "y" && s != "xy")
             ctx.fail("expected 'x', 'y' or 'xy'");
           c.collars.back().x = s.find('x') != std::string_view::npos;
           c.collars.back().y = s.find('y') != std::string_view::npos;
         }},
        {"kind",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const auto s = trim(v);
           if (s == "displacement")
             c.collars.back().kind = CollarKind::FixedDisplacement;
           else if (s == "velocity")
             c.collars.back().kind = CollarKind::PrescribedVelocity;
           else if (s == "fixed_velocity")
             c.collars.back().kind = CollarKind::FixedVelocityZero;
           else
             ctx.fail("expected 'displacement', 'velocity' or 'fixed_velocity'");
         }},
        {"value", [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           c.collars.back().value = parse_vec2(v, Unit::None, ctx);
         }}}},
      {"load",
       {{"kind",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const auto s = trim(v);
           if (s == "none")
             c.load.kind = LoadSpec::Kind::None;
           else if (s == "constant")
             c.load.kind = LoadSpec::Kind::Constant;
           else if (s == "ramp_line")
             c.load.kind = LoadSpec::Kind::RampLine;
           else if (s == "manufactured")
             c.load.kind = LoadSpec::Kind::Manufactured;
           else
             ctx.fail("expected 'none', 'constant', 'ramp_line' or 'manufactured'");
         }},
        {"value", [](ScenarioConfig &c, std::string_view v,
                     const Context &ctx) { c.load.value = parse_vec2(v, Unit::None, ctx); }},
        {"a", [](ScenarioConfig &c, std::string_view v,
                 const Context &ctx) { c.load.a = parse_vec2(v, Unit::Length, ctx); }},
        {"b", [](ScenarioConfig &c, std::string_view v,
                 const Context &ctx) { c.load.b = parse_vec2(v, Unit::Length, ctx); }},
        {"f_max", [](ScenarioConfig &c, std::string_view v,
                     const Context &ctx) { c.load.f_max = parse_number(v, Unit::None, ctx); }},
        {"direction", [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           c.load.direction = parse_vec2(v, Unit::None, ctx);
           if (norm(c.load.direction) == 0.0)
             ctx.fail("direction must be non-zero");
         }}}},
      {"initial",
       {{"kind",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           const auto s = trim(v);
           if (s == "zero")
             c.initial.kind = InitialSpec::Kind::Zero;
           else if (s == "bump")
             c.initial.kind = InitialSpec::Kind::Bump;
           else if (s == "manufactured")
             c.initial.kind = InitialSpec::Kind::Manufactured;
           else
             ctx.fail("expected 'zero', 'bump' or 'manufactured'");
         }},
        {"amplitude", [](ScenarioConfig &c, std::string_view v,
                         const Context &ctx) { c.initial.amplitude = parse_number(v, Unit::Length, ctx); }},
        {"center", [](ScenarioConfig &c, std::string_view v,
                      const Context &ctx) { c.initial.center = parse_vec2(v, Unit::Length, ctx); }},
        {"sigma", [](ScenarioConfig &c, std::string_view v,
                     const Context &ctx) { c.initial.sigma = parse_number(v, Unit::Length, ctx); }},
        {"direction", [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           c.initial.direction = parse_vec2(v, Unit::None, ctx);
           if (norm(c.initial.direction) == 0.0)
             ctx.fail("direction must be non-zero");
         }}}},
      {"manufactured",
       {{"amplitude", [](ScenarioConfig &c, std::string_view v,
                         const Context &ctx) { c.manufactured.amplitude = parse_number(v, Unit::Length, ctx); }},
        {"omega", [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           c.manufactured.omega = parse_number(v, Unit::None, ctx);
         }}}},
      {"output",
       {{"dir", [](ScenarioConfig &c, std::string_view v,
                   const Context &) { c.output.directory = std::string(trim(v)); }},
        {"snapshot_stride", [](ScenarioConfig &c, std::string_view v,
                               const Context &ctx) { c.output.snapshot_stride = parse_count(v, ctx); }},
        {"diagnostic_stride",
         [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           c.output.diagnostic_stride = parse_count(v, ctx);
           if (c.output.diagnostic_stride == 0)
             ctx.fail("must be >= 1");
         }},
        {"csv", [](ScenarioConfig &c, std::string_view v,
                   const Context &ctx) { c.output.csv = parse_bool(v, ctx); }},
        {"vtk", [](ScenarioConfig &c, std::string_view v,
                   const Context &ctx) { c.output.vtk = parse_bool(v, ctx); }}}},
      {"study",
       {{"h", [](ScenarioConfig &c, std::string_view v,
                 const Context &ctx) { c.study.h = parse_list(v, Unit::Length, ctx); }},
        {"times", [](ScenarioConfig &c, std::string_view v,
                     const Context &ctx) { c.study.times = parse_list(v, Unit::Time, ctx); }},
        {"dts", [](ScenarioConfig &c, std::string_view v,
                   const Context &ctx) { c.study.dts = parse_list(v, Unit::Time, ctx); }},
        {"dt_ref", [](ScenarioConfig &c, std::string_view v,
                      const Context &ctx) { c.study.dt_ref = parse_number(v, Unit::Time, ctx); }},
        {"final_time", [](ScenarioConfig &c, std::string_view v, const Context &ctx) {
           c.study.final_time = parse_number(v, Unit::Time, ctx);
         }}}},
  };
  return t;
}

} // namespace

ScenarioConfig parse_config(std::string_view text, const std::string &source) {
  ScenarioConfig config;
  std::string section;
  bool cracks_replaced = false;
  bool collars_replaced = false;
  bool seen_key = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto comment = raw.find_first_of("#;");
    std::string_view line = trim(raw.substr(0, comment));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(source + ":" + std::to_string(line_no) + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!tables().count(section))
        throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown section [" +
                          section + "]");
      if (section == "crack") {
        if (!cracks_replaced)
          config.cracks.clear();
        cracks_replaced = true;
        config.cracks.emplace_back();
      } else if (section == "collar") {
        if (!collars_replaced)
          config.collars.clear();
        collars_replaced = true;
        config.collars.emplace_back();
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const Context ctx{source, line_no, section, key};
    if (section.empty()) {
      // Only "preset" may precede the first section; it seeds the config.
      if (key != "preset")
        ctx.fail("keys must appear inside a section (unknown key)");
      if (seen_key)
        ctx.fail("preset must come first");
      try {
        config = preset(std::string(value));
      } catch (const ConfigError &e) {
        ctx.fail(e.what());
      }
      seen_key = true;
      continue;
    }
    seen_key = true;
    const auto &table = tables().at(section);
    const auto it = table.find(key);
    if (it == table.end())
      ctx.fail("unknown key '" + key + "'");
    it->second(config, value, ctx);
  }
  try {
    config.validate();
  } catch (const ConfigError &e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const DomainError &e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

ScenarioConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string vec(const Vec2 &v) { return num(v.x) + ", " + num(v.y); }

std::string list(const std::vector<double> &v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k)
    s += (k ? ", " : "") + num(v[k]);
  return s;
}

} // namespace

std::string format_config(const ScenarioConfig &c) {
  std::ostringstream os;
  os << "[scenario]\nname = " << c.name << "\n\n[material]\npreset = " << c.material.preset
     << "\ninfluence = " << c.material.influence << "\n";
  auto opt = [&](const char *key, const std::optional<double> &v) {
    if (v)
      os << key << " = " << num(*v) << "\n";
  };
  opt("density", c.material.density);
  opt("c", c.material.c);
  opt("beta", c.material.beta);
  opt("cbar", c.material.cbar);
  opt("c_g", c.material.c_g);
  opt("beta_g", c.material.beta_g);
  opt("fracture_toughness", c.material.fracture_toughness);
  opt("bulk_modulus", c.material.bulk_modulus);
  os << "\n[domain]\nx0 = " << num(c.material_box.x0) << "\nx1 = " << num(c.material_box.x1)
     << "\ny0 = " << num(c.material_box.y0) << "\ny1 = " << num(c.material_box.y1)
     << "\npad = " << num(c.pad) << "\nweight = "
     << (c.weight_mode == BoundaryWeightMode::Indicator ? "indicator" : "taper") << "\n";
  for (const auto &k : c.cracks) {
    os << "\n[crack]\na = " << vec(k.segment.a) << "\nb = " << vec(k.segment.b) << "\n";
    if (std::isfinite(k.band))
      os << "band = " << num(k.band) << "\n";
  }
  os << "\n[discretization]\nhorizon = " << num(c.horizon) << "\nh = " << num(c.h)
     << "\n\n[time]\ndt = " << num(c.dt) << "\nfinal_time = " << num(c.final_time) << "\n";
  for (const auto &k : c.collars) {
    os << "\n[collar]\nregion = " << num(k.region.x0) << ", " << num(k.region.x1) << ", "
       << num(k.region.y0) << ", " << num(k.region.y1)
       << "\ncomponents = " << (k.x ? "x" : "") << (k.y ? "y" : "") << "\nkind = "
       << (k.kind == CollarKind::FixedDisplacement    ? "displacement"
           : k.kind == CollarKind::PrescribedVelocity ? "velocity"
                                                      : "fixed_velocity")
       << "\nvalue = " << vec(k.value) << "\n";
  }
  const char *load_kind[] = {"none", "constant", "ramp_line", "manufactured"};
  os << "\n[load]\nkind = " << load_kind[static_cast<int>(c.load.kind)]
     << "\nvalue = " << vec(c.load.value) << "\na = " << vec(c.load.a) << "\nb = " << vec(c.load.b)
     << "\nf_max = " << num(c.load.f_max) << "\ndirection = " << vec(c.load.direction) << "\n";
  const char *init_kind[] = {"zero", "bump", "manufactured"};
  os << "\n[initial]\nkind = " << init_kind[static_cast<int>(c.initial.kind)]
     << "\namplitude = " << num(c.initial.amplitude) << "\ncenter = " << vec(c.initial.center)
     << "\nsigma = " << num(c.initial.sigma) << "\ndirection = " << vec(c.initial.direction)
     << "\n";
  os << "\n[manufactured]\namplitude = " << num(c.manufactured.amplitude)
     << "\nomega = " << num(c.manufactured.omega) << "\n";
  os << "\n[output]\ndir = " << c.output.directory.string()
     << "\nsnapshot_stride = " << c.output.snapshot_stride
     << "\ndiagnostic_stride = " << c.output.diagnostic_stride
     << "\ncsv = " << (c.output.csv ? "true" : "false")
     << "\nvtk = " << (c.output.vtk ? "true" : "false") << "\n";
  os << "\n[study]\n";
  if (!c.study.h.empty())
    os << "h = " << list(c.study.h) << "\n";
  if (!c.study.times.empty())
    os << "times = " << list(c.study.times) << "\n";
  if (!c.study.dts.empty())
    os << "dts = " << list(c.study.dts) << "\n";
  os << "dt_ref = " << num(c.study.dt_ref) << "\nfinal_time = " << num(c.study.final_time) << "\n";
  return os.str();
}

} // namespace pdfrac

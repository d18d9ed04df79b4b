#include "pdfrac/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pdfrac {

namespace {

[[noreturn]] void io_error(const std::filesystem::path &path, const std::string &what) {
  throw std::runtime_error(path.string() + ": " + what);
}

// 17 significant digits round-trip every double; to_chars ignores the locale.
void put(std::string &out, double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

} // namespace

std::string format_csv_row(const DiagnosticRecord &r) {
  std::string s;
  const double values[] = {r.t,  r.kinetic, r.pd,           r.total, r.augmented, r.pe,
                           r.ge, r.crack_length, r.max_z, r.u_l2,  r.v_l2};
  for (std::size_t k = 0; k < std::size(values); ++k) {
    if (k)
      s.push_back(',');
    put(s, values[k]);
  }
  return s;
}

CsvWriter::CsvWriter(const std::filesystem::path &path) : path_(path) {
  file_ = std::fopen(path.c_str(), "w");
  if (!file_)
    io_error(path, std::strerror(errno));
  if (std::fprintf(file_, "%s\n", kCsvHeader) < 0)
    io_error(path, "write failed");
}

CsvWriter::~CsvWriter() {
  if (file_)
    std::fclose(file_);
}

void CsvWriter::append(const DiagnosticRecord &record) {
  const std::string row = format_csv_row(record);
  if (std::fprintf(file_, "%s\n", row.c_str()) < 0)
    io_error(path_, "write failed");
}

void CsvWriter::flush() {
  if (std::fflush(file_) != 0)
    io_error(path_, "flush failed");
}

std::vector<DiagnosticRecord> read_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    io_error(path, "cannot open");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    io_error(path, "missing or unexpected CSV header");
  std::vector<DiagnosticRecord> out;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    double v[11];
    const char *p = line.data();
    const char *end = line.data() + line.size();
    for (int k = 0; k < 11; ++k) {
      const auto res = std::from_chars(p, end, v[k]);
      if (res.ec != std::errc())
        io_error(path, "malformed row '" + line + "'");
      p = res.ptr;
      if (k < 10) {
        if (p == end || *p != ',')
          io_error(path, "malformed row '" + line + "'");
        ++p;
      }
    }
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]});
  }
  return out;
}

void write_vtk(const std::filesystem::path &path, const Grid &grid, const FieldState &state,
               std::span<const double> damage, std::span<const double> theta) {
  const std::size_t n = grid.size();
  std::string s;
  s.reserve(n * 160);
  s += "# vtk DataFile Version 3.0\npdfrac t=";
  put(s, state.t);
  s += "\nASCII\nDATASET POLYDATA\nPOINTS " + std::to_string(n) + " double\n";
  auto vec = [&](double a, double b, double c) {
    put(s, a);
    s.push_back(' ');
    put(s, b);
    s.push_back(' ');
    put(s, c);
    s.push_back('\n');
  };
  for (std::size_t i = 0; i < n; ++i)
    vec(grid.coord(i).x, grid.coord(i).y, 0.0);
  s += "VERTICES " + std::to_string(n) + " " + std::to_string(2 * n) + "\n";
  for (std::size_t i = 0; i < n; ++i)
    s += "1 " + std::to_string(i) + "\n";
  s += "POINT_DATA " + std::to_string(n) + "\nVECTORS displacement double\n";
  for (std::size_t i = 0; i < n; ++i)
    vec(state.u[i].x, state.u[i].y, 0.0);
  s += "VECTORS velocity double\n";
  for (std::size_t i = 0; i < n; ++i)
    vec(state.v[i].x, state.v[i].y, 0.0);
  auto scalars = [&](const char *name, std::span<const double> a) {
    s += std::string("SCALARS ") + name + " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < n; ++i) {
      put(s, a[i]);
      s.push_back('\n');
    }
  };
  scalars("damage", damage);
  scalars("theta", theta);

  std::ofstream out(path, std::ios::binary);
  if (!out)
    io_error(path, "cannot open for writing");
  out << s;
  if (!out)
    io_error(path, "write failed");
}

std::string snapshot_name(const std::string &stem, std::size_t step, int width) {
  std::ostringstream os;
  os << stem << '_' << std::setw(width) << std::setfill('0') << step << ".vtk";
  return os.str();
}

} // namespace pdfrac

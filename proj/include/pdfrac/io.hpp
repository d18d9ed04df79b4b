#pragma once

#include "pdfrac/diagnostics.hpp"
#include "pdfrac/geometry.hpp"
#include "pdfrac/nonlocal.hpp"

#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pdfrac {

inline constexpr const char *kCsvHeader =
    "t,kinetic,pd,total,augmented,pe,ge,crack_length,max_z,u_l2,v_l2";

/// Appends DiagnosticRecord rows (17 significant digits) to a CSV file whose
/// first line is kCsvHeader.
class CsvWriter {
public:
  explicit CsvWriter(const std::filesystem::path &path);
  ~CsvWriter();
  CsvWriter(const CsvWriter &) = delete;
  CsvWriter &operator=(const CsvWriter &) = delete;

  void append(const DiagnosticRecord &record);
  void flush();
  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
  std::FILE *file_ = nullptr;
};

std::string format_csv_row(const DiagnosticRecord &record);
std::vector<DiagnosticRecord> read_csv(const std::filesystem::path &path);

/// Legacy VTK ASCII POLYDATA with one vertex per node and point arrays
/// displacement, velocity, damage and theta.
void write_vtk(const std::filesystem::path &path, const Grid &grid, const FieldState &state,
               std::span<const double> damage, std::span<const double> theta);

/// "<stem>_<step zero-padded to `width`>.vtk"
std::string snapshot_name(const std::string &stem, std::size_t step, int width = 8);

} // namespace pdfrac

#pragma once

#include "pdfrac/vec2.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace pdfrac {

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Vec2 &p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

struct DomainSpec {
  Rect box;
  std::vector<Segment> cracks;

  void validate() const;
};

/// True when the open bond segment (p, q) crosses the crack segment [a, b].
/// Points within `tol` of the crack line count as lying on its right-hand
/// side (seen from a towards b), so a node sitting on a crack is attached to
/// exactly one crack face.
bool bond_crosses_crack(const Vec2 &p, const Vec2 &q, const Segment &crack, double tol);

/// Uniform lattice D ∩ (hZ)^2. Node i owns the cell [x_i - h/2, x_i + h/2]^2
/// clipped to the domain box, so the cells tile the box exactly.
class Grid {
public:
  Grid(const Rect &box, double h);

  double h() const { return h_; }
  const Rect &box() const { return box_; }
  std::size_t size() const { return coords_.size(); }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  /// Lattice index of the first column / row (x = h * ix0).
  long ix0() const { return ix0_; }
  long iy0() const { return iy0_; }

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(col);
  }
  int column(std::size_t node) const { return static_cast<int>(node % static_cast<std::size_t>(nx_)); }
  int row(std::size_t node) const { return static_cast<int>(node / static_cast<std::size_t>(nx_)); }

  const Vec2 &coord(std::size_t node) const { return coords_[node]; }
  std::span<const Vec2> coords() const { return coords_; }
  /// Area of the clipped cell of a node (h^2 in the interior).
  double volume(std::size_t node) const { return volumes_[node]; }
  std::span<const double> volumes() const { return volumes_; }

  /// Clipped 1-D cell boundaries along x (size nx + 1) and y (size ny + 1).
  const std::vector<double> &x_breaks() const { return x_breaks_; }
  const std::vector<double> &y_breaks() const { return y_breaks_; }

  /// Absolute tolerance used for geometric predicates on this grid.
  double tolerance() const { return 1e-9 * h_; }

private:
  Rect box_;
  double h_;
  long ix0_ = 0;
  long iy0_ = 0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<Vec2> coords_;
  std::vector<double> volumes_;
  std::vector<double> x_breaks_;
  std::vector<double> y_breaks_;
};

Grid build_grid(const DomainSpec &spec, double h, double horizon);

/// Compressed per-node neighbor lists, sorted by neighbor index.
struct NeighborTable {
  std::vector<std::size_t> offsets;   // size N + 1
  std::vector<std::uint32_t> neighbor;
  std::vector<double> distance;       // |x_j - x_i|
  std::vector<Vec2> direction;        // e_ij = (x_j - x_i) / |x_j - x_i|
  std::vector<double> volume_fraction; // partial-volume weight in [0, 1]
  std::vector<std::uint8_t> visible;  // 0 when the bond crosses a crack

  std::size_t nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t bonds() const { return neighbor.size(); }
  std::size_t begin(std::size_t i) const { return offsets[i]; }
  std::size_t end(std::size_t i) const { return offsets[i + 1]; }

  friend bool operator==(const NeighborTable &, const NeighborTable &) = default;
};

/// Partial-volume weight for a neighbor at the given distance:
/// 1 inside horizon - h/2, linear ramp to 0 at horizon + h/2.
double volume_fraction(double distance, double horizon, double h);

/// Neighbor search with cell binning.
NeighborTable build_neighbors(const Grid &grid, double horizon, std::span<const Segment> cracks);

/// O(N^2) all-pairs construction with identical output; used as an oracle.
NeighborTable build_neighbors_all_pairs(const Grid &grid, double horizon,
                                        std::span<const Segment> cracks);

/// Cache key for a neighbor table built from (spec, h, horizon).
std::uint64_t neighbor_cache_key(const DomainSpec &spec, double h, double horizon);
void save_neighbor_table(const std::filesystem::path &path, std::uint64_t key,
                         const NeighborTable &table);
/// Returns false when the file is missing or was written for another key.
bool load_neighbor_table(const std::filesystem::path &path, std::uint64_t key,
                         NeighborTable &table);

enum class BoundaryWeightMode { Indicator, LinearTaper };

/// omega at every node: 1 in indicator mode, min(1, dist(x, boundary) / horizon)
/// in taper mode.
std::vector<double> boundary_weight(const Grid &grid, const DomainSpec &spec,
                                    BoundaryWeightMode mode, double horizon);

using ScalarField = std::function<double(const Vec2 &)>;

/// Cell averages of a field by composite tensor-product Gauss-Legendre
/// quadrature (`points` per direction on each of `pieces` sub-intervals).
std::vector<double> project_to_cells(const ScalarField &field, const Grid &grid, int points = 3,
                                     int pieces = 1);

} // namespace pdfrac

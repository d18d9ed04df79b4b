#include "pdfrac/geometry.hpp"

#include "pdfrac/errors.hpp"
#include "pdfrac/log.hpp"
#include "pdfrac/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace pdfrac {

void DomainSpec::validate() const {
  if (!(box.x1 > box.x0) || !(box.y1 > box.y0))
    throw ConfigError("domain extents must be strictly ordered");
  const double tol = 1e-12 * std::max(box.width(), box.height());
  for (const auto &c : cracks)
    if (!box.contains(c.a, tol) || !box.contains(c.b, tol))
      throw ConfigError("crack segment lies outside the domain");
}

bool bond_crosses_crack(const Vec2 &p, const Vec2 &q, const Segment &crack, double tol) {
  const Vec2 along = crack.b - crack.a;
  const double len = norm(along);
  if (len == 0.0)
    return false;
  auto side = [&](const Vec2 &pt) { return cross(along, pt - crack.a) / len > tol; };
  if (side(p) == side(q))
    return false;

  const Vec2 bond = q - p;
  const double blen = norm(bond);
  const double oa = cross(bond, crack.a - p) / blen;
  const double ob = cross(bond, crack.b - p) / blen;
  const bool both_left = oa > tol && ob > tol;
  const bool both_right = oa < -tol && ob < -tol;
  return !both_left && !both_right;
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(const Rect &box, double h) : box_(box), h_(h) {
  if (!(h > 0.0))
    throw ConfigError("mesh size must be positive");
  constexpr double snap = 1e-9;
  ix0_ = static_cast<long>(std::ceil(box.x0 / h - snap));
  iy0_ = static_cast<long>(std::ceil(box.y0 / h - snap));
  const long ix1 = static_cast<long>(std::floor(box.x1 / h + snap));
  const long iy1 = static_cast<long>(std::floor(box.y1 / h + snap));
  if (ix1 < ix0_ || iy1 < iy0_)
    throw ConfigError("grid is empty: no lattice point inside the domain");
  nx_ = static_cast<int>(ix1 - ix0_ + 1);
  ny_ = static_cast<int>(iy1 - iy0_ + 1);

  auto breaks = [h](double lo, double hi, long first, int count) {
    std::vector<double> b(static_cast<std::size_t>(count) + 1);
    b.front() = lo;
    for (int k = 1; k < count; ++k)
      b[static_cast<std::size_t>(k)] = h * static_cast<double>(first + k - 1) + 0.5 * h;
    b.back() = hi;
    return b;
  };
  x_breaks_ = breaks(box.x0, box.x1, ix0_, nx_);
  y_breaks_ = breaks(box.y0, box.y1, iy0_, ny_);

  auto widths = [h](const std::vector<double> &b) {
    std::vector<double> w(b.size() - 1);
    for (std::size_t k = 0; k < w.size(); ++k)
      w[k] = (k == 0 || k + 1 == w.size()) ? b[k + 1] - b[k] : h;
    return w;
  };
  const auto wx = widths(x_breaks_);
  const auto wy = widths(y_breaks_);

  coords_.reserve(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  volumes_.reserve(coords_.capacity());
  for (int r = 0; r < ny_; ++r)
    for (int c = 0; c < nx_; ++c) {
      coords_.push_back({h * static_cast<double>(ix0_ + c), h * static_cast<double>(iy0_ + r)});
      volumes_.push_back(wx[static_cast<std::size_t>(c)] * wy[static_cast<std::size_t>(r)]);
    }
}

Grid build_grid(const DomainSpec &spec, double h, double horizon) {
  spec.validate();
  if (!(h < horizon))
    warn("mesh size h is not smaller than the horizon");
  return Grid(spec.box, h);
}

// ---------------------------------------------------------------------------
// Neighbor table

double volume_fraction(double distance, double horizon, double h) {
  if (distance <= horizon - 0.5 * h)
    return 1.0;
  if (distance <= horizon + 0.5 * h)
    return (horizon + 0.5 * h - distance) / h;
  return 0.0;
}

namespace {

struct Candidate {
  std::uint32_t j;
  double dist;
  Vec2 dir;
};

void append_bond(NeighborTable &t, const Grid &grid, std::size_t i, const Candidate &c,
                 double horizon, std::span<const Segment> cracks) {
  t.neighbor.push_back(c.j);
  t.distance.push_back(c.dist);
  t.direction.push_back(c.dir);
  t.volume_fraction.push_back(volume_fraction(c.dist, horizon, grid.h()));
  bool visible = true;
  for (const auto &crack : cracks)
    if (bond_crosses_crack(grid.coord(i), grid.coord(c.j), crack, grid.tolerance())) {
      visible = false;
      break;
    }
  t.visible.push_back(visible ? 1 : 0);
}

bool make_candidate(const Grid &grid, std::size_t i, std::size_t j, double cutoff, Candidate &out) {
  if (i == j)
    return false;
  const Vec2 d = grid.coord(j) - grid.coord(i);
  const double dist = norm(d);
  if (dist > cutoff)
    return false;
  out = {static_cast<std::uint32_t>(j), dist, Vec2{d.x / dist, d.y / dist}};
  return true;
}

} // namespace

NeighborTable build_neighbors(const Grid &grid, double horizon, std::span<const Segment> cracks) {
  if (!(horizon > 0.0))
    throw DomainError("horizon must be positive");
  const double cutoff = horizon + 0.5 * grid.h();
  const std::size_t n = grid.size();

  // Bins of width `cutoff`, so every neighbor lies in the 3x3 block around
  // the bin of the node.
  const Rect &box = grid.box();
  const int bx = std::max(1, static_cast<int>(std::ceil(box.width() / cutoff)));
  const int by = std::max(1, static_cast<int>(std::ceil(box.height() / cutoff)));
  auto bin_of = [&](const Vec2 &p) {
    const int cx = std::clamp(static_cast<int>((p.x - box.x0) / cutoff), 0, bx - 1);
    const int cy = std::clamp(static_cast<int>((p.y - box.y0) / cutoff), 0, by - 1);
    return std::pair{cx, cy};
  };
  std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(bx) *
                                               static_cast<std::size_t>(by));
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = bin_of(grid.coord(i));
    bins[static_cast<std::size_t>(cy) * bx + cx].push_back(static_cast<std::uint32_t>(i));
  }

  NeighborTable t;
  t.offsets.reserve(n + 1);
  t.offsets.push_back(0);
  std::vector<Candidate> found;
  for (std::size_t i = 0; i < n; ++i) {
    found.clear();
    const auto [cx, cy] = bin_of(grid.coord(i));
    for (int oy = -1; oy <= 1; ++oy)
      for (int ox = -1; ox <= 1; ++ox) {
        const int qx = cx + ox;
        const int qy = cy + oy;
        if (qx < 0 || qy < 0 || qx >= bx || qy >= by)
          continue;
        for (std::uint32_t j : bins[static_cast<std::size_t>(qy) * bx + qx]) {
          Candidate c;
          if (make_candidate(grid, i, j, cutoff, c))
            found.push_back(c);
        }
      }
    std::sort(found.begin(), found.end(),
              [](const Candidate &a, const Candidate &b) { return a.j < b.j; });
    for (const auto &c : found)
      append_bond(t, grid, i, c, horizon, cracks);
    t.offsets.push_back(t.neighbor.size());
  }
  return t;
}

NeighborTable build_neighbors_all_pairs(const Grid &grid, double horizon,
                                        std::span<const Segment> cracks) {
  const double cutoff = horizon + 0.5 * grid.h();
  NeighborTable t;
  t.offsets.push_back(0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      Candidate c;
      if (make_candidate(grid, i, j, cutoff, c))
        append_bond(t, grid, i, c, horizon, cracks);
    }
    t.offsets.push_back(t.neighbor.size());
  }
  return t;
}

// ---------------------------------------------------------------------------
// Binary cache

namespace {

constexpr char kMagic[8] = {'P', 'D', 'N', 'B', 'R', 'S', '0', '1'};

void hash_bytes(std::uint64_t &h, const void *data, std::size_t size) {
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t k = 0; k < size; ++k) {
    h ^= p[k];
    h *= 1099511628211ULL;
  }
}

void hash_double(std::uint64_t &h, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  hash_bytes(h, &bits, sizeof bits);
}

template <class T> void write_vec(std::ostream &os, const std::vector<T> &v) {
  const std::uint64_t n = v.size();
  os.write(reinterpret_cast<const char *>(&n), sizeof n);
  os.write(reinterpret_cast<const char *>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

template <class T> bool read_vec(std::istream &is, std::vector<T> &v) {
  std::uint64_t n = 0;
  if (!is.read(reinterpret_cast<char *>(&n), sizeof n))
    return false;
  v.resize(n);
  return static_cast<bool>(
      is.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(n * sizeof(T))));
}

} // namespace

std::uint64_t neighbor_cache_key(const DomainSpec &spec, double h, double horizon) {
  std::uint64_t key = 14695981039346656037ULL;
  for (double v : {spec.box.x0, spec.box.x1, spec.box.y0, spec.box.y1, h, horizon})
    hash_double(key, v);
  for (const auto &c : spec.cracks)
    for (double v : {c.a.x, c.a.y, c.b.x, c.b.y})
      hash_double(key, v);
  return key;
}

void save_neighbor_table(const std::filesystem::path &path, std::uint64_t key,
                         const NeighborTable &table) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw std::runtime_error("cannot open neighbor cache for writing: " + path.string());
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char *>(&key), sizeof key);
  write_vec(os, table.offsets);
  write_vec(os, table.neighbor);
  write_vec(os, table.distance);
  write_vec(os, table.direction);
  write_vec(os, table.volume_fraction);
  write_vec(os, table.visible);
  if (!os)
    throw std::runtime_error("failed writing neighbor cache: " + path.string());
}

bool load_neighbor_table(const std::filesystem::path &path, std::uint64_t key,
                         NeighborTable &table) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    return false;
  char magic[sizeof kMagic];
  std::uint64_t stored = 0;
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    return false;
  if (!is.read(reinterpret_cast<char *>(&stored), sizeof stored) || stored != key)
    return false;
  NeighborTable t;
  if (!read_vec(is, t.offsets) || !read_vec(is, t.neighbor) || !read_vec(is, t.distance) ||
      !read_vec(is, t.direction) || !read_vec(is, t.volume_fraction) || !read_vec(is, t.visible))
    return false;
  table = std::move(t);
  return true;
}

// ---------------------------------------------------------------------------
// Boundary weight and projection

std::vector<double> boundary_weight(const Grid &grid, const DomainSpec &spec,
                                    BoundaryWeightMode mode, double horizon) {
  std::vector<double> w(grid.size(), 1.0);
  if (mode == BoundaryWeightMode::Indicator)
    return w;
  const Rect &b = spec.box;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 &p = grid.coord(i);
    const double dist = std::min({p.x - b.x0, b.x1 - p.x, p.y - b.y0, b.y1 - p.y});
    w[i] = std::clamp(dist / horizon, 0.0, 1.0);
  }
  return w;
}

std::vector<double> project_to_cells(const ScalarField &field, const Grid &grid, int points,
                                     int pieces) {
  if (pieces < 1)
    throw DomainError("projection needs at least one sub-interval");
  const GaussRule rule = gauss_legendre(points);
  std::vector<double> avg(grid.size());
  const auto &xb = grid.x_breaks();
  const auto &yb = grid.y_breaks();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto c = static_cast<std::size_t>(grid.column(i));
    const auto r = static_cast<std::size_t>(grid.row(i));
    const double xa = xb[c];
    const double ya = yb[r];
    const double dx = (xb[c + 1] - xa) / pieces;
    const double dy = (yb[r + 1] - ya) / pieces;
    double sum = 0.0;
    for (int py = 0; py < pieces; ++py)
      for (std::size_t qy = 0; qy < rule.nodes.size(); ++qy) {
        const double y = ya + dy * (py + 0.5 * (rule.nodes[qy] + 1.0));
        for (int px = 0; px < pieces; ++px)
          for (std::size_t qx = 0; qx < rule.nodes.size(); ++qx) {
            const double x = xa + dx * (px + 0.5 * (rule.nodes[qx] + 1.0));
            sum += rule.weights[qx] * rule.weights[qy] * field({x, y});
          }
      }
    // Weights sum to 2 per direction per piece.
    avg[i] = sum / (4.0 * pieces * pieces);
  }
  return avg;
}

} // namespace pdfrac

#pragma once

// Boundary-adapted sampling grid: rings at r_k = 1 - 2^{-k s} whose angular
// step shrinks proportionally to 1 - r_k, so cells are quasi-uniform in the
// pseudohyperbolic metric.  The cells are the vertices of an explicit
// triangulation of the covered disk (ring fans merged band by band), which
// gives connected-component labeling its adjacency and the hole counts an
// exact Euler characteristic V - E + F.

#include <array>
#include <cstdint>
#include <vector>

#include "innerlevel/common.hpp"

namespace innerlevel {

// s such that the deepest ring reaches 1 - 1e-6 at L = 20
inline constexpr double kDefaultRingExponent = 0.9965784284662087;

struct GridCell {
  cplx center{0.0, 0.0};
  std::int32_t ring = 0;         // -1 for seeded cells
  std::int32_t angle_index = 0;  // -1 for seeded cells
  double diameter = 0.0;
};

class WhitneyGrid {
 public:
  int level() const { return level_; }
  double ring_exponent() const { return s_; }
  double deepest_radius() const { return ring_radii_.back(); }
  const std::vector<double>& ring_radii() const { return ring_radii_; }
  const std::vector<GridCell>& cells() const { return cells_; }
  std::size_t cell_count() const { return cells_.size(); }
  std::size_t seed_count() const { return seed_count_; }

  const std::vector<std::array<std::uint32_t, 2>>& edges() const { return edges_; }
  const std::vector<std::array<std::uint32_t, 3>>& faces() const { return faces_; }

  bool outermost(std::uint32_t cell) const { return cells_[cell].ring == level_; }

  std::size_t ring_begin(int k) const { return ring_begin_[static_cast<std::size_t>(k)]; }
  std::size_t ring_size(int k) const {
    return ring_begin_[static_cast<std::size_t>(k) + 1] - ring_begin_[static_cast<std::size_t>(k)];
  }

  // CSR adjacency over the triangulation edges
  std::pair<const std::uint32_t*, const std::uint32_t*> neighbors(std::uint32_t cell) const {
    return {adj_.data() + adj_start_[cell], adj_.data() + adj_start_[cell + 1]};
  }

  friend WhitneyGrid build_grid(int L, double s, const std::vector<cplx>& seeds);

 private:
  int level_ = 0;
  double s_ = kDefaultRingExponent;
  std::vector<double> ring_radii_;
  std::vector<std::size_t> ring_begin_;  // size L+2, cells of ring k at [begin[k], begin[k+1])
  std::vector<GridCell> cells_;
  std::vector<std::array<std::uint32_t, 2>> edges_;
  std::vector<std::array<std::uint32_t, 3>> faces_;
  std::vector<std::size_t> band_face_begin_;  // faces of band k at [begin[k], begin[k+1])
  std::size_t seed_count_ = 0;
  std::vector<std::uint32_t> adj_start_;
  std::vector<std::uint32_t> adj_;

  void build_adjacency() {
    std::vector<std::uint32_t> degree(cells_.size() + 1, 0);
    for (const auto& e : edges_) {
      ++degree[e[0]];
      ++degree[e[1]];
    }
    adj_start_.assign(cells_.size() + 1, 0);
    for (std::size_t i = 0; i < cells_.size(); ++i) adj_start_[i + 1] = adj_start_[i] + degree[i];
    adj_.assign(adj_start_.back(), 0);
    std::vector<std::uint32_t> cursor(adj_start_.begin(), adj_start_.end() - 1);
    for (const auto& e : edges_) {
      adj_[cursor[e[0]]++] = e[1];
      adj_[cursor[e[1]]++] = e[0];
    }
  }
};

namespace detail {

inline bool point_in_triangle(cplx p, cplx a, cplx b, cplx c) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  double d1 = cross(b - a, p - a);
  double d2 = cross(c - b, p - b);
  double d3 = cross(a - c, p - c);
  bool has_neg = (d1 < -1e-18) || (d2 < -1e-18) || (d3 < -1e-18);
  bool has_pos = (d1 > 1e-18) || (d2 > 1e-18) || (d3 > 1e-18);
  return !(has_neg && has_pos);
}

}  // namespace detail

// Deterministic grid constructor.  Seed points (typically the explicit zeros
// of the function under study) are inserted as extra sample vertices by star
// subdivision of their containing triangle, so coarse levels cannot miss a
// sublevel component around an isolated zero.
inline WhitneyGrid build_grid(int L, double s, const std::vector<cplx>& seeds = {}) {
  if (L < 2) throw Error("build_grid: need L >= 2");
  if (!(s > 0.0)) throw Error("build_grid: ring exponent must be positive");

  WhitneyGrid g;
  g.level_ = L;
  g.s_ = s;

  // ring radii and sizes; cell-count overflow guard
  const double angular_cells_base = 16.0;
  std::vector<std::size_t> ring_n(static_cast<std::size_t>(L) + 1);
  double total = 0.0;
  for (int k = 0; k <= L; ++k) {
    g.ring_radii_.push_back(1.0 - std::pow(2.0, -s * static_cast<double>(k)));
    ring_n[static_cast<std::size_t>(k)] =
        k == 0 ? 1
               : static_cast<std::size_t>(
                     std::ceil(angular_cells_base * std::pow(2.0, s * static_cast<double>(k))));
    total += static_cast<double>(ring_n[static_cast<std::size_t>(k)]);
  }
  if (total > 1e8) throw Error("build_grid: cell count would exceed 1e8");

  g.ring_begin_.assign(static_cast<std::size_t>(L) + 2, 0);
  for (int k = 0; k <= L; ++k)
    g.ring_begin_[static_cast<std::size_t>(k) + 1] =
        g.ring_begin_[static_cast<std::size_t>(k)] + ring_n[static_cast<std::size_t>(k)];

  // cells with conservative diameters
  for (int k = 0; k <= L; ++k) {
    double r = g.ring_radii_[static_cast<std::size_t>(k)];
    std::size_t n = ring_n[static_cast<std::size_t>(k)];
    double below = k == 0 ? 0.0 : g.ring_radii_[static_cast<std::size_t>(k) - 1];
    double above = k == L ? r : g.ring_radii_[static_cast<std::size_t>(k) + 1];
    double radial = k == 0 ? g.ring_radii_[1] : 0.5 * (above - below) + (k == L ? 0.5 * (r - below) : 0.0);
    double chord = n > 1 ? 2.0 * r * std::sin(kPi / static_cast<double>(n)) : 2.0 * g.ring_radii_[1];
    double diam = std::hypot(chord, radial);
    for (std::size_t i = 0; i < n; ++i) {
      GridCell c;
      c.ring = k;
      c.angle_index = static_cast<std::int32_t>(i);
      c.center = k == 0 ? cplx(0.0, 0.0)
                        : std::polar(r, kTwoPi * static_cast<double>(i) / static_cast<double>(n));
      c.diameter = diam;
      g.cells_.push_back(c);
    }
  }

  // within-ring edges
  for (int k = 1; k <= L; ++k) {
    std::uint32_t base = static_cast<std::uint32_t>(g.ring_begin_[static_cast<std::size_t>(k)]);
    std::uint32_t n = static_cast<std::uint32_t>(ring_n[static_cast<std::size_t>(k)]);
    for (std::uint32_t i = 0; i < n; ++i)
      g.edges_.push_back({base + i, base + (i + 1) % n});
  }

  // band triangulations by angular merge (the center fan is the nA == 1 case)
  g.band_face_begin_.assign(static_cast<std::size_t>(L) + 1, 0);
  for (int k = 0; k < L; ++k) {
    g.band_face_begin_[static_cast<std::size_t>(k)] = g.faces_.size();
    std::uint32_t baseA = static_cast<std::uint32_t>(g.ring_begin_[static_cast<std::size_t>(k)]);
    std::uint32_t baseB = static_cast<std::uint32_t>(g.ring_begin_[static_cast<std::size_t>(k) + 1]);
    std::size_t nA = ring_n[static_cast<std::size_t>(k)];
    std::size_t nB = ring_n[static_cast<std::size_t>(k) + 1];
    if (nA == 1) {
      for (std::size_t j = 0; j < nB; ++j) {
        std::uint32_t b0 = baseB + static_cast<std::uint32_t>(j);
        std::uint32_t b1 = baseB + static_cast<std::uint32_t>((j + 1) % nB);
        g.faces_.push_back({baseA, b0, b1});
        g.edges_.push_back({baseA, b0});
      }
      continue;
    }
    g.edges_.push_back({baseA, baseB});
    std::size_t i = 0, j = 0;
    while (i < nA || j < nB) {
      double nextA = (static_cast<double>(i) + 1.0) / static_cast<double>(nA);
      double nextB = (static_cast<double>(j) + 1.0) / static_cast<double>(nB);
      std::uint32_t ai = baseA + static_cast<std::uint32_t>(i % nA);
      std::uint32_t bj = baseB + static_cast<std::uint32_t>(j % nB);
      if (j == nB || (i < nA && nextA <= nextB)) {
        std::uint32_t an = baseA + static_cast<std::uint32_t>((i + 1) % nA);
        g.faces_.push_back({ai, bj, an});
        if (i + 1 < nA || j < nB) g.edges_.push_back({an, bj});
        ++i;
      } else {
        std::uint32_t bn = baseB + static_cast<std::uint32_t>((j + 1) % nB);
        g.faces_.push_back({ai, bj, bn});
        if (j + 1 < nB || i < nA) g.edges_.push_back({ai, bn});
        ++j;
      }
    }
  }
  g.band_face_begin_[static_cast<std::size_t>(L)] = g.faces_.size();

  // seeds: star-subdivide the containing triangle; points outside the
  // covered disk or duplicating an existing vertex are skipped
  std::vector<std::vector<std::size_t>> extra_faces(static_cast<std::size_t>(L));
  for (cplx p : seeds) {
    double r = std::abs(p);
    if (r >= g.ring_radii_.back() - 1e-12) continue;
    int band = 0;
    while (band + 1 < L && g.ring_radii_[static_cast<std::size_t>(band) + 1] <= r) ++band;
    bool duplicate = false;
    for (std::size_t c = g.ring_begin_[static_cast<std::size_t>(band)];
         c < g.ring_begin_[static_cast<std::size_t>(band) + 2] && !duplicate; ++c)
      if (std::abs(g.cells_[c].center - p) < 1e-12) duplicate = true;
    for (std::size_t c = g.ring_begin_.back(); c < g.cells_.size() && !duplicate; ++c)
      if (std::abs(g.cells_[c].center - p) < 1e-12) duplicate = true;
    if (duplicate) continue;

    auto try_faces = [&](std::size_t lo, std::size_t hi, std::size_t& out) {
      for (std::size_t f = lo; f < hi; ++f) {
        const auto& t = g.faces_[f];
        if (detail::point_in_triangle(p, g.cells_[t[0]].center, g.cells_[t[1]].center,
                                      g.cells_[t[2]].center)) {
          out = f;
          return true;
        }
      }
      return false;
    };
    std::size_t face_idx = SIZE_MAX;
    bool hit = try_faces(g.band_face_begin_[static_cast<std::size_t>(band)],
                         band + 1 <= L ? g.band_face_begin_[static_cast<std::size_t>(band) + 1]
                                       : g.faces_.size(),
                         face_idx);
    if (!hit)
      for (std::size_t f : extra_faces[static_cast<std::size_t>(band)])
        if (!hit && detail::point_in_triangle(p, g.cells_[g.faces_[f][0]].center,
                                              g.cells_[g.faces_[f][1]].center,
                                              g.cells_[g.faces_[f][2]].center)) {
          face_idx = f;
          hit = true;
        }

    GridCell seed_cell;
    seed_cell.center = p;
    seed_cell.ring = -1;
    seed_cell.angle_index = -1;
    std::uint32_t sc = static_cast<std::uint32_t>(g.cells_.size());

    if (!hit) {
      // chord sliver between the polygon and the circle: hang the seed off
      // the nearest vertex with a tree edge (keeps the Euler count intact)
      std::size_t nearest = 0;
      double best = 1e18;
      for (std::size_t c = g.ring_begin_[static_cast<std::size_t>(band)];
           c < g.ring_begin_[std::min<std::size_t>(static_cast<std::size_t>(band) + 2,
                                                   g.ring_begin_.size() - 1)];
           ++c) {
        double d = std::abs(g.cells_[c].center - p);
        if (d < best) {
          best = d;
          nearest = c;
        }
      }
      seed_cell.diameter = g.cells_[nearest].diameter;
      g.cells_.push_back(seed_cell);
      g.edges_.push_back({static_cast<std::uint32_t>(nearest), sc});
      ++g.seed_count_;
      continue;
    }

    std::array<std::uint32_t, 3> tri = g.faces_[face_idx];
    seed_cell.diameter = std::max({std::abs(g.cells_[tri[0]].center - p),
                                   std::abs(g.cells_[tri[1]].center - p),
                                   std::abs(g.cells_[tri[2]].center - p)});
    g.cells_.push_back(seed_cell);
    ++g.seed_count_;
    g.faces_[face_idx] = {tri[0], tri[1], sc};
    g.faces_.push_back({tri[1], tri[2], sc});
    g.faces_.push_back({tri[2], tri[0], sc});
    extra_faces[static_cast<std::size_t>(band)].push_back(face_idx);
    extra_faces[static_cast<std::size_t>(band)].push_back(g.faces_.size() - 2);
    extra_faces[static_cast<std::size_t>(band)].push_back(g.faces_.size() - 1);
    for (int v = 0; v < 3; ++v) g.edges_.push_back({tri[static_cast<std::size_t>(v)], sc});
  }

  g.build_adjacency();
  return g;
}

}  // namespace innerlevel

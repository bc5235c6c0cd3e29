#pragma once

// Raster export: per-cell CSV, a 16-bit PGM resampled onto a Cartesian
// image, and a marching-squares contour polyline CSV.  All of it is for
// plotting; verdicts never depend on these files.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "innerlevel/level_sets.hpp"

namespace innerlevel {

inline void write_raster_csv(const std::string& path, const LevelSetRaster& l,
                             const ComponentLabels& labels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << "re,im,modulus,mask,label,uncertain\n";
  const auto& cells = l.raster->grid->cells();
  char buf[160];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d,%d\n", cells[i].center.real(),
                  cells[i].center.imag(), l.raster->modulus[i], static_cast<int>(l.mask[i]),
                  static_cast<int>(labels.label[i]), static_cast<int>(l.uncertain[i]));
    f << buf;
  }
}

namespace detail {

// nearest-cell lookup on the polar grid; returns SIZE_MAX outside coverage
inline std::size_t nearest_cell(const WhitneyGrid& g, cplx p) {
  double r = std::abs(p);
  if (r >= g.deepest_radius()) return SIZE_MAX;
  int k = 0;
  const auto& radii = g.ring_radii();
  while (k + 1 <= g.level() && radii[static_cast<std::size_t>(k + 1)] <= r) ++k;
  // pick the closer of rings k and k+1 by radius
  int ring = k;
  if (k + 1 <= g.level() &&
      std::fabs(radii[static_cast<std::size_t>(k + 1)] - r) < std::fabs(radii[static_cast<std::size_t>(k)] - r))
    ring = k + 1;
  std::size_t n = g.ring_size(ring);
  if (n == 1) return g.ring_begin(ring);
  double theta = normalize_angle(std::arg(p));
  std::size_t idx =
      static_cast<std::size_t>(std::llround(theta / kTwoPi * static_cast<double>(n))) % n;
  return g.ring_begin(ring) + idx;
}

}  // namespace detail

// 16-bit grayscale image of the modulus (0 -> black, 1 -> white); pixels
// outside the covered disk are white.
inline void write_raster_pgm(const std::string& path, const ModulusRaster& raster,
                             int size = 512) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << "P2\n" << size << " " << size << "\n65535\n";
  const WhitneyGrid& g = *raster.grid;
  for (int row = 0; row < size; ++row) {
    std::string line;
    for (int col = 0; col < size; ++col) {
      double x = -1.0 + 2.0 * (static_cast<double>(col) + 0.5) / static_cast<double>(size);
      double y = 1.0 - 2.0 * (static_cast<double>(row) + 0.5) / static_cast<double>(size);
      std::size_t cell = detail::nearest_cell(g, cplx(x, y));
      int v = 65535;
      if (cell != SIZE_MAX && raster.valid[cell]) {
        double m = std::min(1.0, std::max(0.0, raster.modulus[cell]));
        v = static_cast<int>(std::lround(m * 65535.0));
      }
      line += std::to_string(v);
      line += col + 1 < size ? ' ' : '\n';
    }
    f << line;
  }
}

struct ContourSegment {
  double x1, y1, x2, y2;
};

// Marching squares on a Cartesian resample of |u|; cells outside the
// covered disk are treated as above every level, so contours stay inside.
inline std::vector<ContourSegment> contour_segments(const ModulusRaster& raster, double eta,
                                                    int size = 256) {
  const WhitneyGrid& g = *raster.grid;
  std::vector<double> field(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 2.0);
  auto at = [&](int ix, int iy) -> double& {
    return field[static_cast<std::size_t>(iy) * static_cast<std::size_t>(size) +
                 static_cast<std::size_t>(ix)];
  };
  auto coord = [&](int i) { return -1.0 + 2.0 * (static_cast<double>(i) + 0.5) / size; };
  for (int iy = 0; iy < size; ++iy)
    for (int ix = 0; ix < size; ++ix) {
      std::size_t cell = detail::nearest_cell(g, cplx(coord(ix), coord(iy)));
      if (cell != SIZE_MAX && raster.valid[cell]) at(ix, iy) = raster.modulus[cell];
    }
  std::vector<ContourSegment> segs;
  auto interp = [&](double a, double b) { return (eta - a) / (b - a); };
  for (int iy = 0; iy + 1 < size; ++iy)
    for (int ix = 0; ix + 1 < size; ++ix) {
      double v00 = at(ix, iy), v10 = at(ix + 1, iy), v01 = at(ix, iy + 1),
             v11 = at(ix + 1, iy + 1);
      int mask = (v00 < eta ? 1 : 0) | (v10 < eta ? 2 : 0) | (v11 < eta ? 4 : 0) |
                 (v01 < eta ? 8 : 0);
      if (mask == 0 || mask == 15) continue;
      double x0 = coord(ix), x1 = coord(ix + 1), y0 = coord(iy), y1 = coord(iy + 1);
      // edge crossing points (bottom, right, top, left in grid orientation)
      cplx pb(x0 + (x1 - x0) * interp(v00, v10), y0);
      cplx pr(x1, y0 + (y1 - y0) * interp(v10, v11));
      cplx pt(x0 + (x1 - x0) * interp(v01, v11), y1);
      cplx pl(x0, y0 + (y1 - y0) * interp(v00, v01));
      auto add = [&](cplx a, cplx b) {
        segs.push_back({a.real(), a.imag(), b.real(), b.imag()});
      };
      switch (mask) {
        case 1: case 14: add(pl, pb); break;
        case 2: case 13: add(pb, pr); break;
        case 3: case 12: add(pl, pr); break;
        case 4: case 11: add(pr, pt); break;
        case 6: case 9:  add(pb, pt); break;
        case 7: case 8:  add(pl, pt); break;
        case 5:  add(pl, pb); add(pr, pt); break;
        case 10: add(pb, pr); add(pl, pt); break;
        default: break;
      }
    }
  return segs;
}

inline void write_contour_csv(const std::string& path, const std::vector<ContourSegment>& segs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << "x1,y1,x2,y2\n";
  char buf[160];
  for (const auto& s : segs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.x1, s.y1, s.x2, s.y2);
    f << buf;
  }
}

}  // namespace innerlevel

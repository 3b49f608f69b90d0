#ifndef QSWELD_IO_HPP
#define QSWELD_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qsweld/grid.hpp"

namespace qsweld {

enum class GridKind : std::uint8_t { Beltrami = 1, PlaneMap = 2, Scalar = 3 };

/// Binary grid container: "QWGR", version u32, N u32, L f64, kind u8, then
/// N*N (re, im) f64 pairs, row-major, little-endian.
struct GridContainer {
  static constexpr std::uint32_t kVersion = 1;
  GridSpec grid;
  GridKind kind = GridKind::PlaneMap;
  std::vector<Complex> values;
};

void write_grid(const std::string& path, const GridContainer& c);
GridContainer read_grid(const std::string& path);

void save(const std::string& path, const BeltramiField& mu);
void save(const std::string& path, const PlaneMap& f);
BeltramiField load_beltrami(const std::string& path, double support_radius = -1.0);
PlaneMap load_plane_map(const std::string& path);

/// "# x,y,re,im" then one node per line; stride subsamples both axes.
void write_field_csv(const std::string& path, const GridSpec& grid,
                     const std::vector<Complex>& values, int stride = 1);
/// "# index,re,im"
void write_polyline_csv(const std::string& path, const std::vector<Complex>& points);
std::vector<Complex> read_polyline_csv(const std::string& path);

/// %.17g
std::string format_double(double v);
/// Re-serializes JSON text with every floating-point number at 17
/// significant digits and keys in sorted order; `indent` < 0 is compact.
std::string canonical_json(const std::string& text, int indent = 2);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace qsweld

#endif  // QSWELD_IO_HPP

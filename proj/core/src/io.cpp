#include "qsweld/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qsweld {

namespace {

static_assert(std::endian::native == std::endian::little,
              "grid containers are written by byte copy on little-endian hosts");

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorCode::Io, "truncated grid container");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

void dump17(const nlohmann::json& j, std::string& out, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump17(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      // Short numeric arrays stay on one line.
      bool flat = j.size() <= 4;
      for (const auto& e : j) flat = flat && e.is_primitive();
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat && indent >= 0 ? ", " : ",";
        if (!flat) newline(depth + 1);
        dump17(j[i], out, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) { out += "null"; return; }
      out += format_double(v);
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonical_json(const std::string& text, int indent) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("JSON: ") + e.what());
  }
  std::string out;
  dump17(j, out, indent, 0);
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

void write_grid(const std::string& path, const GridContainer& c) {
  if (c.values.size() != c.grid.size())
    throw Error(ErrorCode::DimensionMismatch, "container values do not match the grid");
  std::string out = "QWGR";
  put<std::uint32_t>(out, GridContainer::kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.grid.n));
  put<double>(out, c.grid.half_width);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(c.kind));
  out.reserve(out.size() + c.values.size() * 16);
  for (const Complex& v : c.values) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  write_file(path, out);
}

GridContainer read_grid(const std::string& path) {
  const std::string in = read_file(path);
  if (in.size() < 21 || in.compare(0, 4, "QWGR") != 0)
    throw Error(ErrorCode::Io, path + " is not a grid container");
  std::size_t pos = 4;
  GridContainer c;
  const auto version = get<std::uint32_t>(in, pos);
  if (version != GridContainer::kVersion)
    throw Error(ErrorCode::Io, "unsupported grid container version");
  c.grid.n = static_cast<int>(get<std::uint32_t>(in, pos));
  c.grid.half_width = get<double>(in, pos);
  const auto kind = get<std::uint8_t>(in, pos);
  if (kind < 1 || kind > 3) throw Error(ErrorCode::Io, "unknown grid kind");
  c.kind = static_cast<GridKind>(kind);
  c.grid.validate();
  if (in.size() != pos + c.grid.size() * 16)
    throw Error(ErrorCode::Io, "grid container size does not match its header");
  c.values.resize(c.grid.size());
  for (Complex& v : c.values) {
    const double re = get<double>(in, pos);
    const double im = get<double>(in, pos);
    v = {re, im};
  }
  return c;
}

void save(const std::string& path, const BeltramiField& mu) {
  write_grid(path, {mu.grid, GridKind::Beltrami, mu.values});
}

void save(const std::string& path, const PlaneMap& f) {
  write_grid(path, {f.grid, GridKind::PlaneMap, f.values});
}

BeltramiField load_beltrami(const std::string& path, double support_radius) {
  GridContainer c = read_grid(path);
  if (c.kind != GridKind::Beltrami) throw Error(ErrorCode::Io, path + " does not hold a Beltrami field");
  const double r = support_radius >= 0.0 ? support_radius : c.grid.half_width * std::sqrt(2.0);
  return BeltramiField::make(c.grid, std::move(c.values), r);
}

PlaneMap load_plane_map(const std::string& path) {
  GridContainer c = read_grid(path);
  if (c.kind != GridKind::PlaneMap) throw Error(ErrorCode::Io, path + " does not hold a plane map");
  return {c.grid, std::move(c.values), Normalization::Custom, std::nullopt};
}

void write_field_csv(const std::string& path, const GridSpec& grid,
                     const std::vector<Complex>& values, int stride) {
  if (values.size() != grid.size()) throw Error(ErrorCode::DimensionMismatch, "field size mismatch");
  std::string out = "# x,y,re,im\n";
  for (int k = 0; k < grid.n; k += stride)
    for (int j = 0; j < grid.n; j += stride) {
      const Complex z = grid.node(j, k);
      const Complex v = values[grid.index(j, k)];
      out += format_double(z.real()) + ',' + format_double(z.imag()) + ',' +
             format_double(v.real()) + ',' + format_double(v.imag()) + '\n';
    }
  write_file(path, out);
}

void write_polyline_csv(const std::string& path, const std::vector<Complex>& points) {
  std::string out = "# index,re,im\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    out += std::to_string(i) + ',' + format_double(points[i].real()) + ',' +
           format_double(points[i].imag()) + '\n';
  write_file(path, out);
}

std::vector<Complex> read_polyline_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<Complex> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string idx, re, im;
    if (!std::getline(ls, idx, ',') || !std::getline(ls, re, ',') || !std::getline(ls, im, ','))
      throw Error(ErrorCode::Io, "malformed polyline row in " + path);
    pts.emplace_back(std::stod(re), std::stod(im));
  }
  return pts;
}

}  // namespace qsweld

#include "qsweld/surfaces.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "json.hpp"
#include "qsweld/io.hpp"

namespace qsweld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Complex> circle_points(const Disk& d, int samples) {
  std::vector<Complex> pts(samples);
  for (int s = 0; s < samples; ++s) pts[s] = d.center + std::polar(d.radius, kTwoPi * s / samples);
  return pts;
}

double mean_offset(const CircleMap& k) {
  const int m = k.size();
  double acc = 0.0;
  for (int s = 0; s < m; ++s) acc += k.lift_samples()[s] - kTwoPi * s / m;
  return acc / m;
}

// Complex structure carried by one cap, pulled back to the removed disk.
// With y = 1 / M(z), the chart z -> Theta^{-1}(y) is conformal on the cap.
class CapStructure {
 public:
  CapStructure(const Disk& disk, const CircleMap& rigging, double cap_radius)
      : disk_(disk), m_(disk.collar()), rigging_(rigging), cap_radius_(cap_radius) {
    if (!(cap_radius > 0.0 && cap_radius < 1.0))
      throw Error(ErrorCode::InvalidArgument, "cap radius must lie in (0, 1)");
    if (rigging.is_rotation()) {
      rotation_ = true;
      alpha_ = rigging.basepoint_value();
    } else {
      const CircleMap kappa = reflect(invert(rigging));
      alpha_ = mean_offset(kappa);
      theta_.emplace(CircleMap::rotation(alpha_, kappa.size()), kappa, cap_radius, 1.0);
    }
  }

  [[nodiscard]] Complex mu(Complex z) const {
    if (rotation_ || !disk_.contains(z)) return 0.0;
    const Complex u = m_(z);
    if (is_infinite(u)) return 0.0;
    const Complex y = 1.0 / u;
    if (std::abs(y) < cap_radius_) return 0.0;
    const Jet t = theta_->jet(theta_->inverse(y));
    const Complex mu_inv = -t.dzbar / std::conj(t.dz);
    const Complex dphi = -m_.derivative(z) / (u * u);
    return mu_inv * std::conj(dphi) / dphi;
  }

  // phi~ of the cap: on the cap Theta^{-1} o J o M, on the collar
  // rho <= |M| <= 1 of the surface J o psi_ext o M; NaN elsewhere.
  [[nodiscard]] Complex local(Complex z, double collar_rho) const {
    const Complex u = m_(z);
    if (is_infinite(u)) return 0.0;
    const double r = std::abs(u);
    if (r > 1.0) {
      const Complex y = 1.0 / u;
      if (rotation_) return y * std::polar(1.0, -alpha_);
      return theta_->inverse(y);
    }
    if (r < collar_rho || r == 0.0) return {kNaN, kNaN};
    const double g = rigging_.lift(wrap_angle(std::arg(u)));
    return 1.0 / std::polar(r, g);
  }

 private:
  Disk disk_;
  Mobius m_;
  CircleMap rigging_;
  double cap_radius_;
  bool rotation_ = false;
  double alpha_ = 0.0;
  std::optional<AnnulusInterpolation> theta_;
};

// Preimages under the welding series, seeded from the previous node of the
// same row or, failing that, from a coarse polar table of images.
class SeriesInverter {
 public:
  SeriesInverter(const WeldingResult& weld, Side side) : weld_(weld), side_(side) {
    for (int a = 1; a <= 24; ++a) {
      const double r = side == Side::X ? a / 24.5 : 24.5 / a;
      for (int b = 0; b < 96; ++b) {
        const Complex u = std::polar(r, kTwoPi * b / 96);
        table_.emplace_back(u, eval(u));
      }
    }
  }

  [[nodiscard]] Complex eval(Complex u) const {
    return side_ == Side::X ? weld_.F_at(u) : weld_.G_at(u);
  }
  [[nodiscard]] Jet jet(Complex u) const {
    return side_ == Side::X ? weld_.F_jet(u) : weld_.G_jet(u);
  }

  Complex solve(Complex target, std::optional<Complex> guess) const {
    auto newton = [&](Complex g) {
      return side_ == Side::X ? weld_.F_inverse(target, g) : weld_.G_inverse(target, g);
    };
    if (guess) {
      try {
        return newton(*guess);
      } catch (const Error&) {
      }
    }
    Complex best = table_.front().first;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& [u, v] : table_)
      if (std::abs(v - target) < dist) {
        dist = std::abs(v - target);
        best = u;
      }
    return newton(best);
  }

 private:
  const WeldingResult& weld_;
  Side side_;
  std::vector<std::pair<Complex, Complex>> table_;
};

double distance_to_polyline(const std::vector<Complex>& p, Complex z) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = p.size();
  for (std::size_t s = 0; s < n; ++s) {
    const Complex a = p[s], b = p[(s + 1) % n];
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0.0 ? ((z - a) * std::conj(ab)).real() / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::abs(z - (a + t * ab)));
  }
  return best;
}

std::vector<Complex> curve_invariants(const std::vector<std::vector<Complex>>& curves) {
  if (curves.size() == 2) {
    const bool first_inner = point_in_polygon(curves[1], curves[0].front());
    const double m = first_inner ? modulus(curves[0], curves[1]) : modulus(curves[1], curves[0]);
    return {Complex{m, 0.0}};
  }
  return boundary_invariants(curves);
}

void check_index(const RiggedSurface& s, int k, const char* what) {
  if (k < 0 || k >= s.boundary_count())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " boundary index out of range");
}

// Pull the marking of one side back to its collar coordinate and reflect it
// across the unit circle so that the solution preserves S^1.
BeltramiField symmetrized_collar_marking(const RiggedSurface& s, int k, const GridSpec& grid) {
  const Mobius m = s.disks[k].collar();
  const Mobius minv = m.inverse();
  auto inside = [&](Complex u) -> Complex {
    const Complex z = minv(u);
    if (is_infinite(z) || !s.contains(z)) return 0.0;
    const Complex mu = s.marking_at(z);
    if (mu == Complex{0.0}) return 0.0;
    const Complex d = minv.derivative(u);
    return mu * std::conj(d) / d;
  };
  std::vector<Complex> vals(grid.size());
  for (int r = 0; r < grid.n; ++r)
    for (int c = 0; c < grid.n; ++c) {
      const Complex u = grid.node(c, r);
      const double a = std::abs(u);
      if (a <= 1.0) {
        vals[grid.index(c, r)] = inside(u);
      } else {
        const Complex v = 1.0 / std::conj(u);
        vals[grid.index(c, r)] = std::conj(inside(v)) * (u * u) / (std::conj(u) * std::conj(u));
      }
    }
  return BeltramiField::make(grid, std::move(vals), grid.half_width * std::sqrt(2.0));
}

// Circle map induced on S^1 by a map preserving the unit circle. The grid
// interpolant ripples at the cell frequency, so the periodic part of the lift
// is low-passed to modes |n| <= 1 / (2h) before use.
CircleMap boundary_lift(const PlaneMap& w, int samples) {
  std::vector<double> dev(samples);
  double prev = std::arg(w(Complex{1.0, 0.0}));
  for (int s = 0; s < samples; ++s) {
    const double t = kTwoPi * s / samples;
    const double a = std::arg(w(std::polar(1.0, t)));
    prev += angle_difference(a, prev);
    dev[s] = prev - t;
  }
  const int modes = std::max(8, static_cast<int>(0.5 / w.grid.spacing()));
  std::vector<Complex> c(modes + 1);
  for (int n = 0; n <= modes; ++n) {
    Complex acc = 0.0;
    for (int s = 0; s < samples; ++s) acc += dev[s] * std::polar(1.0, -kTwoPi * n * s / samples);
    c[n] = acc / static_cast<double>(samples);
  }
  std::vector<double> lift(samples + 1);
  for (int s = 0; s < samples; ++s) {
    const double t = kTwoPi * s / samples;
    double v = c[0].real();
    for (int n = 1; n <= modes; ++n) v += 2.0 * (c[n] * std::polar(1.0, n * t)).real();
    lift[s] = t + v;
  }
  lift[samples] = lift[0] + kTwoPi;
  return CircleMap::from_samples(std::move(lift));
}

}  // namespace

// ---- Disk / RiggedSurface ----------------------------------------------------

Mobius Disk::collar() const {
  if (contains_infinity) return Mobius::affine(1.0 / radius, -center / radius);
  return {0.0, radius, 1.0, -center};
}

bool RiggedSurface::contains(Complex z) const {
  if (is_infinite(z))
    return std::none_of(disks.begin(), disks.end(), [](const Disk& d) { return d.contains_infinity; });
  return std::none_of(disks.begin(), disks.end(), [&](const Disk& d) { return d.contains(z); });
}

Complex RiggedSurface::marking_at(Complex z) const {
  if (!marking || !contains(z)) return 0.0;
  // Bilinear over the neighbouring nodes that lie on the surface, so values
  // next to a boundary are not diluted by the zeros stored in the holes.
  const GridSpec& g = marking->grid;
  const auto [u, v] = g.fractional_index(z);
  const int j = static_cast<int>(std::floor(u));
  const int k = static_cast<int>(std::floor(v));
  if (j < 0 || k < 0 || j + 1 >= g.n || k + 1 >= g.n) return 0.0;
  const double s = u - j, t = v - k;
  Complex acc = 0.0;
  double wsum = 0.0;
  for (int dj = 0; dj < 2; ++dj)
    for (int dk = 0; dk < 2; ++dk) {
      if (!contains(g.node(j + dj, k + dk))) continue;
      const double w = (dj ? s : 1.0 - s) * (dk ? t : 1.0 - t);
      acc += w * marking->values[g.index(j + dj, k + dk)];
      wsum += w;
    }
  return wsum > 0.0 ? acc / wsum : Complex{0.0};
}

void RiggedSurface::validate(const GridSpec* grid) const {
  const std::size_t n = disks.size();
  if (orientations.size() != n || riggings.size() != n)
    throw Error(ErrorCode::InvalidArgument, "disks, orientations and riggings differ in length");
  const double gap = grid ? 2.0 * grid->spacing() : 0.0;
  int exterior = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!(disks[a].radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "disk radius must be positive");
    exterior += disks[a].contains_infinity;
    for (std::size_t b = a + 1; b < n; ++b) {
      const Disk& p = disks[a];
      const Disk& q = disks[b];
      const double d = std::abs(p.center - q.center);
      double sep;
      if (p.contains_infinity && q.contains_infinity) sep = -1.0;
      else if (p.contains_infinity) sep = p.radius - d - q.radius;
      else if (q.contains_infinity) sep = q.radius - d - p.radius;
      else sep = d - p.radius - q.radius;
      if (!(sep > gap)) throw Error(ErrorCode::InvalidArgument, "removed disks overlap or touch");
    }
  }
  if (exterior > 1) throw Error(ErrorCode::InvalidArgument, "at most one disk may contain infinity");
  if (marking && grid && !(marking->grid == *grid))
    throw Error(ErrorCode::DimensionMismatch, "marking grid differs from the working grid");
  if (marking && marking->sup_norm() >= 1.0)
    throw Error(ErrorCode::BudgetExceeded, "marking is not admissible");
}

RiggedSurface RiggedSurface::circle_domain(Disk outer, std::vector<Disk> holes, int samples) {
  RiggedSurface s;
  outer.contains_infinity = true;
  s.disks.push_back(outer);
  for (Disk& d : holes) {
    d.contains_infinity = false;
    s.disks.push_back(d);
  }
  s.orientations.assign(s.disks.size(), Orientation::Outgoing);
  s.riggings.assign(s.disks.size(), CircleMap::identity(samples));
  s.validate();
  return s;
}

RiggedSurface RiggedSurface::annulus(double r_inner, double r_outer, Orientation inner,
                                     Orientation outer, int samples) {
  if (!(r_inner > 0.0 && r_outer > r_inner))
    throw Error(ErrorCode::RadiiOrder, "annulus radii must satisfy 0 < r_in < r_out");
  RiggedSurface s;
  s.disks = {{0.0, r_inner, false}, {0.0, r_outer, true}};
  s.orientations = {inner, outer};
  s.riggings.assign(2, CircleMap::identity(samples));
  return s;
}

// ---- sewing ------------------------------------------------------------------

Complex SewnSurface::realize(Side side, Complex z) const {
  if (side == Side::X) return atlas.weld.F_at(atlas.collar_x(z));
  const Complex v = atlas.collar_y(z);
  if (v == Complex{0.0}) return kInfinity;
  return atlas.weld.G_at(1.0 / v);
}

Jet SewnSurface::realize_jet(Side side, Complex z) const {
  if (side == Side::X) {
    const Jet f = atlas.weld.F_jet(atlas.collar_x(z));
    return {f.value, f.dz * atlas.collar_x.derivative(z), 0.0};
  }
  const Complex v = atlas.collar_y(z);
  const Jet g = atlas.weld.G_jet(1.0 / v);
  return {g.value, g.dz * (-1.0 / (v * v)) * atlas.collar_y.derivative(z), 0.0};
}

SewnSurface sew(const RiggedSurface& x, int i, const RiggedSurface& y, int j, const GridSpec& grid,
                const SewOptions& opt) {
  x.validate();
  y.validate();
  check_index(x, i, "X");
  check_index(y, j, "Y");
  if (x.orientations[i] != Orientation::Outgoing)
    throw Error(ErrorCode::OrientationMismatch, "the X boundary must be outgoing");
  if (y.orientations[j] != Orientation::Incoming)
    throw Error(ErrorCode::OrientationMismatch, "the Y boundary must be incoming");

  SewnSurface s;
  s.x = x;
  s.y = y;
  s.i = i;
  s.j = j;
  s.atlas.collar_x = x.disks[i].collar();
  s.atlas.collar_y = y.disks[j].collar();
  s.atlas.h = compose(reflect(invert(y.riggings[j])), x.riggings[i]);
  s.atlas.weld = weld(s.atlas.h, grid, opt.weld_tol, opt.weld);
  s.seam = s.atlas.weld.seam;

  // zeta_1 and zeta_2 must agree on the identified boundary points.
  double mismatch = 0.0;
  const int samples = 4 * static_cast<int>(s.seam.size());
  for (int k = 0; k < samples; ++k) {
    const double t = kTwoPi * k / samples;
    const Complex a = s.atlas.weld.F_at(std::polar(1.0, t));
    const Complex b = s.atlas.weld.G_at(std::polar(1.0, s.atlas.h.lift(t)));
    mismatch = std::max(mismatch, std::abs(a - b));
  }
  s.atlas.chart_mismatch = mismatch;
  if (mismatch > opt.chart_tol)
    throw Error(ErrorCode::ChartMismatch,
                "seam charts disagree by " + format_double(mismatch));

  auto add = [&](Side side, int k) {
    const RiggedSurface& src = side == Side::X ? x : y;
    SewnBoundary b{side, k, src.orientations[k], src.riggings[k], {}};
    for (const Complex& p : circle_points(src.disks[k], opt.curve_samples))
      b.curve.push_back(s.realize(side, p));
    s.boundaries.push_back(std::move(b));
  };
  for (int k = 0; k < i; ++k) add(Side::X, k);
  for (int k = 0; k < j; ++k) add(Side::Y, k);
  for (int k = j + 1; k < y.boundary_count(); ++k) add(Side::Y, k);
  for (int k = i + 1; k < x.boundary_count(); ++k) add(Side::X, k);
  return s;
}

// ---- caps --------------------------------------------------------------------

Complex cap_beltrami(const Disk& disk, const CircleMap& rigging, double cap_radius, Complex z) {
  return CapStructure(disk, rigging, cap_radius).mu(z);
}

PuncturedSurface sew_caps(const RiggedSurface& x, const GridSpec& grid, const CapOptions& opt) {
  grid.validate();
  x.validate(&grid);
  std::vector<CapStructure> caps;
  caps.reserve(x.disks.size());
  for (int k = 0; k < x.boundary_count(); ++k)
    caps.emplace_back(x.disks[k], x.riggings[k], opt.cap_radius);

  std::vector<Complex> vals(grid.size());
  for (int r = 0; r < grid.n; ++r)
    for (int c = 0; c < grid.n; ++c) {
      const Complex z = grid.node(c, r);
      Complex mu = 0.0;
      if (x.contains(z)) {
        mu = x.marking ? x.marking->values[grid.index(c, r)] : Complex{0.0};
      } else {
        for (int k = 0; k < x.boundary_count(); ++k)
          if (x.disks[k].contains(z)) {
            mu = caps[k].mu(z);
            break;
          }
      }
      vals[grid.index(c, r)] = mu;
    }

  PuncturedSurface out;
  out.total_mu = BeltramiField::make(grid, std::move(vals), grid.half_width * std::sqrt(2.0));
  out.w = solve_beltrami(out.total_mu, opt.solve_tol, opt.max_iter, &out.stats);
  for (const Disk& d : x.disks) {
    const Complex p = d.puncture();
    out.base_points.push_back(p);
    out.marked_points.push_back(is_infinite(p) ? kInfinity : out.w(p));
  }
  if (opt.local_coordinates) {
    const double rho = 1.0 - opt.collar;
    for (const CapStructure& cap : caps)
      out.local_coords.push_back(PlaneMap::sample(grid, [&](Complex z) { return cap.local(z, rho); }));
  }
  return out;
}

// ---- Beltrami-level sewing ---------------------------------------------------

BeltramiField S_beltrami(const RiggedSurface& xm, const RiggedSurface& ym, const SewnSurface& sewn,
                         const GridSpec& grid) {
  grid.validate();
  std::vector<Complex> vals(grid.size(), Complex{0.0});
  const bool need_x = xm.marking && !xm.marking->is_zero();
  const bool need_y = ym.marking && !ym.marking->is_zero();
  if (!need_x && !need_y) return BeltramiField::zero(grid);

  const std::vector<Complex>& seam = sewn.seam;
  const Complex centre = std::accumulate(seam.begin(), seam.end(), Complex{0.0}) /
                         static_cast<double>(seam.size());
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (const Complex& p : seam) {
    rmin = std::min(rmin, std::abs(p - centre));
    rmax = std::max(rmax, std::abs(p - centre));
  }
  const double hcell = grid.spacing();
  const SeriesInverter fx(sewn.atlas.weld, Side::X), gy(sewn.atlas.weld, Side::Y);
  const Mobius mx_inv = sewn.atlas.collar_x.inverse();
  const Mobius my_inv = sewn.atlas.collar_y.inverse();

  for (int r = 0; r < grid.n; ++r) {
    std::optional<Complex> prev_x, prev_y;
    for (int c = 0; c < grid.n; ++c) {
      const Complex p = grid.node(c, r);
      const double rc = std::abs(p - centre);
      bool inside;
      if (rc < rmin - hcell) {
        inside = true;
      } else if (rc > rmax + hcell) {
        inside = false;
      } else {
        if (distance_to_polyline(seam, p) < 0.5 * hcell) {
          prev_x.reset();
          prev_y.reset();
          continue;  // seam cell
        }
        inside = point_in_polygon(seam, p);
      }
      Complex mu = 0.0;
      if (inside && need_x) {
        const Complex u = fx.solve(p, prev_x);
        prev_x = u;
        const Complex z = mx_inv(u);
        if (!is_infinite(z) && xm.contains(z)) {
          const Complex d = fx.jet(u).dz * sewn.atlas.collar_x.derivative(z);
          mu = xm.marking_at(z) * d / std::conj(d);
        }
      } else if (!inside && need_y) {
        const Complex u = gy.solve(p, prev_y);
        prev_y = u;
        const Complex v = 1.0 / u;
        const Complex z = my_inv(v);
        if (!is_infinite(z) && ym.contains(z)) {
          const Complex d = gy.jet(u).dz * (-1.0 / (v * v)) * sewn.atlas.collar_y.derivative(z);
          mu = ym.marking_at(z) * d / std::conj(d);
        }
      }
      vals[grid.index(c, r)] = mu;
    }
  }
  return BeltramiField::make(grid, std::move(vals), grid.half_width * std::sqrt(2.0));
}

std::vector<Complex> S_T(const RiggedSurface& xm, int i, const RiggedSurface& ym, int j,
                         const GridSpec& grid, const SewOptions& opt) {
  const SewnSurface sewn = sew(xm, i, ym, j, grid, opt);
  return invariants(sewn, S_beltrami(xm, ym, sewn, grid));
}

std::vector<Complex> S_T_commuted(const RiggedSurface& xm, int i, const RiggedSurface& ym, int j,
                                  const GridSpec& grid, const SewOptions& opt) {
  xm.validate();
  ym.validate();
  check_index(xm, i, "X");
  check_index(ym, j, "Y");
  if (xm.orientations[i] != Orientation::Outgoing || ym.orientations[j] != Orientation::Incoming)
    throw Error(ErrorCode::OrientationMismatch, "sewing needs an outgoing X and incoming Y boundary");

  struct Uniformized {
    std::optional<PlaneMap> w;
    CircleMap rigging = CircleMap::identity(16);
    Complex operator()(Complex u) const { return w ? (*w)(u) : u; }
  };
  auto uniformize = [&](const RiggedSurface& s, int k) {
    Uniformized out;
    out.rigging = s.riggings[k];
    if (!s.marking || s.marking->is_zero()) return out;
    out.w = solve_beltrami(symmetrized_collar_marking(s, k, grid), opt.weld.solve_tol, opt.weld.max_iter);
    const CircleMap phi = boundary_lift(*out.w, std::max(1024, s.riggings[k].size()));
    out.rigging = compose(s.riggings[k], invert(phi));
    return out;
  };
  const Uniformized ux = uniformize(xm, i), uy = uniformize(ym, j);
  const CircleMap h = compose(reflect(invert(uy.rigging)), ux.rigging);
  const WeldingResult wr = weld(h, grid, opt.weld_tol, opt.weld);

  const Mobius mx = xm.disks[i].collar(), my = ym.disks[j].collar();
  std::vector<std::vector<Complex>> curves;
  auto add = [&](Side side, int k) {
    std::vector<Complex> curve;
    for (const Complex& p : circle_points((side == Side::X ? xm : ym).disks[k], opt.curve_samples)) {
      if (side == Side::X) {
        curve.push_back(wr.F_at(ux(mx(p))));
      } else {
        const Complex v = uy(my(p));
        curve.push_back(v == Complex{0.0} ? kInfinity : wr.G_at(1.0 / v));
      }
    }
    curves.push_back(std::move(curve));
  };
  for (int k = 0; k < i; ++k) add(Side::X, k);
  for (int k = 0; k < j; ++k) add(Side::Y, k);
  for (int k = j + 1; k < ym.boundary_count(); ++k) add(Side::Y, k);
  for (int k = i + 1; k < xm.boundary_count(); ++k) add(Side::X, k);
  return curve_invariants(curves);
}

// ---- invariants ----------------------------------------------------------------

std::vector<Complex> invariants(const std::vector<Complex>& marked) {
  if (marked.size() < 4) return {};
  const std::vector<Complex> n = normalized_configuration(marked);
  return {n.begin() + 3, n.end()};
}

std::vector<Complex> invariants(const PuncturedSurface& s) { return invariants(s.marked_points); }

std::vector<Complex> invariants(const SewnSurface& s, const BeltramiField& marking) {
  std::vector<std::vector<Complex>> curves;
  std::optional<PlaneMap> w;
  if (!marking.is_zero()) w = solve_beltrami(marking);
  for (const SewnBoundary& b : s.boundaries) {
    std::vector<Complex> c = b.curve;
    if (w)
      for (Complex& p : c) p = (*w)(p);
    curves.push_back(std::move(c));
  }
  return curve_invariants(curves);
}

std::vector<Complex> boundary_invariants(const std::vector<std::vector<Complex>>& curves) {
  std::vector<Complex> out;
  for (const auto& c : curves) {
    const CircleFit f = fit_circle(c);
    out.push_back(f.center);
    out.emplace_back(f.radius, 0.0);
  }
  return out;
}

bool point_in_polygon(const std::vector<Complex>& poly, Complex z) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
    const Complex p = poly[a], q = poly[b];
    if ((p.imag() > z.imag()) != (q.imag() > z.imag())) {
      const double x = p.real() + (z.imag() - p.imag()) * (q.real() - p.real()) / (q.imag() - p.imag());
      if (z.real() < x) in = !in;
    }
  }
  return in;
}

double modulus(const std::vector<Complex>& inner, const std::vector<Complex>& outer, int degree) {
  if (inner.size() < 8 || outer.size() < 8)
    throw Error(ErrorCode::InvalidArgument, "modulus needs at least 8 points per boundary");
  for (const Complex& p : inner)
    if (!std::isfinite(std::abs(p)) || !point_in_polygon(outer, p))
      throw Error(ErrorCode::NonNested, "inner boundary is not inside the outer one");
  for (const Complex& p : outer)
    if (point_in_polygon(inner, p)) throw Error(ErrorCode::NonNested, "boundaries cross");

  // Area centroid of the inner curve as the logarithmic pole.
  Complex p = 0.0;
  double area = 0.0;
  for (std::size_t a = 0, n = inner.size(); a < n; ++a) {
    const Complex u = inner[a], v = inner[(a + 1) % n];
    const double cr = u.real() * v.imag() - v.real() * u.imag();
    area += cr;
    p += cr * (u + v);
  }
  p /= 3.0 * area;
  if (!point_in_polygon(inner, p))
    p = std::accumulate(inner.begin(), inner.end(), Complex{0.0}) / static_cast<double>(inner.size());

  double r_in = std::numeric_limits<double>::infinity(), r_out = 0.0;
  for (const Complex& z : inner) r_in = std::min(r_in, std::abs(z - p));
  for (const Complex& z : outer) r_out = std::max(r_out, std::abs(z - p));

  const int rows = static_cast<int>(inner.size() + outer.size());
  const int cols = 2 + 4 * degree;
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd rhs(rows);
  int row = 0;
  auto fill = [&](const std::vector<Complex>& curve, double target) {
    const std::size_t n = curve.size();
    for (std::size_t a = 0; a < n; ++a) {
      const Complex z = curve[a];
      // Square root of the local arc length: a trapezoid-weighted L2 fit.
      const double wgt =
          std::sqrt(0.5 * (std::abs(curve[(a + 1) % n] - z) + std::abs(z - curve[(a + n - 1) % n])));
      const Complex d = z - p;
      A(row, 0) = wgt;
      A(row, 1) = wgt * std::log(std::abs(d));
      Complex up = 1.0, dn = 1.0;
      for (int k = 1; k <= degree; ++k) {
        up *= d / r_out;
        dn *= r_in / d;
        A(row, 2 + 4 * (k - 1)) = wgt * up.real();
        A(row, 3 + 4 * (k - 1)) = wgt * up.imag();
        A(row, 4 + 4 * (k - 1)) = wgt * dn.real();
        A(row, 5 + 4 * (k - 1)) = wgt * dn.imag();
      }
      rhs(row) = wgt * target;
      ++row;
    }
  };
  fill(inner, 0.0);
  fill(outer, 1.0);
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
  if (!(c(1) > 0.0)) throw Error(ErrorCode::NonNested, "harmonic measure fit has no positive flux");
  return 1.0 / (kTwoPi * c(1));
}

// ---- Dehn twists -------------------------------------------------------------

Complex compose_beltrami(Complex mu_f, const Jet& t) {
  return (t.dzbar + mu_f * std::conj(t.dz)) / (t.dz + mu_f * std::conj(t.dzbar));
}

RiggedSurface dehn_twist_boundary(const RiggedSurface& x, int i, double width, const GridSpec& grid,
                                  double turns) {
  grid.validate();
  x.validate();
  check_index(x, i, "twist");
  const double rho = 1.0 - width;
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "collar width must lie in (0, 1)");

  const Disk& d = x.disks[i];
  const double a = d.contains_infinity ? rho * d.radius : d.radius;
  const double b = d.contains_infinity ? d.radius : d.radius / rho;
  for (int k = 0; k < x.boundary_count(); ++k) {
    if (k == i) continue;
    const Disk& e = x.disks[k];
    const double dist = std::abs(e.center - d.center);
    const bool clear = e.contains_infinity ? dist + b <= e.radius
                                           : (dist + e.radius <= a || dist - e.radius >= b);
    if (!clear) throw Error(ErrorCode::CollarTooWide, "twist collar meets boundary " + std::to_string(k));
  }

  const Mobius m = d.collar();
  const Mobius minv = m.inverse();
  const double beta = kTwoPi * turns / std::log(1.0 / rho);
  std::vector<Complex> vals(grid.size());
  for (int r = 0; r < grid.n; ++r)
    for (int c = 0; c < grid.n; ++c) {
      const Complex z = grid.node(c, r);
      const double dz = std::abs(z - d.center);
      if (!(dz > a && dz < b) || !x.contains(z)) {
        vals[grid.index(c, r)] = x.marking_at(z);
        continue;
      }
      const Complex u = m(z);
      const double ru = std::abs(u);
      const double phase = beta * std::log(ru / rho);
      const Complex rot = std::polar(1.0, phase);
      const Complex tu = u * rot;
      const Complex t_u = rot * Complex{1.0, 0.5 * beta};
      const Complex t_ubar = rot * Complex{0.0, 0.5 * beta} * (u / std::conj(u));
      const Complex dm = m.derivative(z);
      const Complex di = minv.derivative(tu);
      const Jet jt{minv(tu), di * t_u * dm, di * t_ubar * std::conj(dm)};
      vals[grid.index(c, r)] = compose_beltrami(x.marking_at(jt.value), jt);
    }
  RiggedSurface out = x;
  out.marking = BeltramiField::make(grid, std::move(vals), grid.half_width * std::sqrt(2.0));
  return out;
}

// ---- JSON --------------------------------------------------------------------

std::string to_json(const RiggedSurface& s, const std::string& marking_path) {
  std::string out = "{\n  \"disks\": [";
  for (std::size_t k = 0; k < s.disks.size(); ++k) {
    const Disk& d = s.disks[k];
    out += k ? ", " : "";
    out += "{\"c\": [" + format_double(d.center.real()) + ", " + format_double(d.center.imag()) +
           "], \"r\": " + format_double(d.radius);
    if (d.contains_infinity) out += ", \"exterior\": true";
    out += "}";
  }
  out += "],\n  \"orientations\": [";
  for (std::size_t k = 0; k < s.orientations.size(); ++k)
    out += std::string(k ? ", " : "") + (s.orientations[k] == Orientation::Incoming ? "\"in\"" : "\"out\"");
  out += "],\n  \"riggings\": [";
  for (std::size_t k = 0; k < s.riggings.size(); ++k) out += (k ? ", " : "") + to_json(s.riggings[k]);
  out += "]";
  if (!marking_path.empty()) out += ",\n  \"marking\": " + nlohmann::json(marking_path).dump();
  out += "\n}\n";
  return out;
}

RiggedSurface rigged_surface_from_json(const std::string& text, const std::string& base_dir) {
  RiggedSurface s;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& d : j.at("disks")) {
      Disk disk;
      disk.center = {d.at("c").at(0).get<double>(), d.at("c").at(1).get<double>()};
      disk.radius = d.at("r").get<double>();
      disk.contains_infinity = d.value("exterior", false);
      s.disks.push_back(disk);
    }
    for (const auto& o : j.at("orientations")) {
      const std::string v = o.get<std::string>();
      if (v == "in") s.orientations.push_back(Orientation::Incoming);
      else if (v == "out") s.orientations.push_back(Orientation::Outgoing);
      else throw Error(ErrorCode::InvalidArgument, "orientation must be \"in\" or \"out\"");
    }
    for (const auto& r : j.at("riggings")) s.riggings.push_back(circle_map_from_json(r.dump()));
    if (j.contains("marking") && !j["marking"].get<std::string>().empty()) {
      std::filesystem::path p = j["marking"].get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      s.marking = load_beltrami(p.string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("surface JSON: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace qsweld

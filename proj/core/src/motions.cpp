#include "qsweld/motions.hpp"

#include <algorithm>
#include <limits>

namespace qsweld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Jet chain(const Jet& outer, const Jet& inner) {
  return {outer.value, outer.dz * inner.dz + outer.dzbar * std::conj(inner.dzbar),
          outer.dz * inner.dzbar + outer.dzbar * std::conj(inner.dz)};
}

}  // namespace

// ---- holomorphic motion of a plane map ---------------------------------------

MotionFamily::MotionFamily(MotionRecipe recipe, BeltramiField mu, double tol, int max_iter)
    : recipe_(recipe), mu_(std::move(mu)), solve_tol_(tol), max_iter_(max_iter) {
  // rho^t degenerates where ell - t + t / a = 0.
  const Complex a = recipe_.a;
  if (std::abs(a - 1.0) > 1e-15) {
    const Complex t0 = recipe_.ell * a / (a - 1.0);
    radius_ = std::min(1.0, std::abs(t0));
  }
}

std::pair<Complex, Complex> MotionFamily::affine_part(Complex t) const {
  const double l = recipe_.ell;
  const Complex a = recipe_.a, b = recipe_.b;
  return {(l - t + t / a) / l, -t * b / (a * l)};
}

PlaneMap MotionFamily::sample(Complex t, SolveStats* stats) const {
  if (std::abs(t) >= radius_)
    throw Error(ErrorCode::DegenerateAffine,
                "|t| = " + std::to_string(std::abs(t)) + " is outside the motion radius " +
                    std::to_string(radius_));
  const Complex scale = t / recipe_.ell;
  std::vector<Complex> vals(mu_.values);
  for (Complex& v : vals) v *= scale;
  const BeltramiField mt = BeltramiField::make(mu_.grid, std::move(vals), mu_.support_radius);
  PlaneMap w = solve_beltrami(mt, solve_tol_, max_iter_, stats);
  const auto [alpha, beta] = affine_part(t);
  for (Complex& v : w.values) v = alpha * v + beta;
  if (w.far_field) {
    w.far_field->scale *= alpha;
    w.far_field->shift = alpha * w.far_field->shift + beta;
  }
  w.normalization = Normalization::Custom;
  return w;
}

MotionFamily embed_in_motion(const PlaneMap& u, const MotionOptions& opt) {
  u.grid.validate();
  BeltramiField mu = dilatation(u);
  const double support = opt.support_radius >= 0.0 ? opt.support_radius : 0.5 * u.grid.half_width;
  mu = BeltramiField::make(u.grid, std::move(mu.values), support);
  MotionRecipe r;
  r.k = mu.sup_norm();
  if (r.k >= 0.9) throw Error(ErrorCode::BudgetExceeded, "sup |mu(u)| must stay below 0.9");
  r.ell = 0.5 * (r.k + 1.0);
  const Complex u0 = u(Complex{0.0}), u1 = u(Complex{1.0});
  if (!(std::abs(u1 - u0) > 0.0)) throw Error(ErrorCode::DegenerateAffine, "u(0) = u(1)");
  r.a = 1.0 / (u1 - u0);
  r.b = -r.a * u0;
  return MotionFamily(r, std::move(mu), opt.solve_tol, opt.max_iter);
}

// ---- rigging families ----------------------------------------------------------

RiggingFamily::RiggingFamily(CircleMap base, std::vector<FourierMode> direction, double radius,
                             Complex translation)
    : base_(std::move(base)), direction_(std::move(direction)), radius_(radius),
      translation_(translation) {}

double RiggingFamily::lift(Complex t, double theta) const {
  Complex eta = 0.0;
  for (const FourierMode& m : direction_) eta += m.coeff * std::polar(1.0, m.n * theta);
  return base_.lift(theta) + (t * eta).real();
}

CircleMap RiggingFamily::at(Complex t) const {
  if (direction_.empty()) return base_;
  const int m = std::max(base_.size(), 256);
  std::vector<double> s(m + 1);
  for (int i = 0; i <= m; ++i) s[i] = lift(t, kTwoPi * i / m);
  s[m] = s[0] + kTwoPi;
  return CircleMap::from_samples(std::move(s));
}

RiggingFamily rigging_family(const CircleMap& base, std::vector<FourierMode> direction, double radius,
                             Complex translation) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "family radius must be positive");
  constexpr int kScan = 4096;
  for (int i = 0; i < kScan; ++i) {
    const double th = kTwoPi * i / kScan;
    Complex deta = 0.0;
    for (const FourierMode& m : direction) deta += m.coeff * Complex{0.0, double(m.n)} * std::polar(1.0, m.n * th);
    if (base.lift_derivative(th) - radius * std::abs(deta) <= 0.0)
      throw Error(ErrorCode::MonotonicityLost,
                  "g_t stops increasing near theta = " + std::to_string(th) + " for |t| <= radius");
  }
  RiggingFamily fam(base, std::move(direction), radius, translation);
  // The derivative bound is exact for the lift; confirm on the sampled
  // boundary of the t-disk that the stored samples stay increasing.
  for (int k = 0; k < 16; ++k) {
    try {
      (void)fam.at(std::polar(radius, kTwoPi * k / 16));
    } catch (const Error& e) {
      throw Error(ErrorCode::MonotonicityLost, e.what());
    }
  }
  return fam;
}

// ---- cut-out families --------------------------------------------------------

CutoutFamily::CutoutFamily(RiggedSurface base, int boundary, RiggingFamily family, double factor)
    : base_(std::move(base)), boundary_(boundary), family_(std::move(family)) {
  if (boundary < 0 || boundary >= base_.boundary_count())
    throw Error(ErrorCode::InvalidArgument, "cut-out boundary index out of range");
  const Disk& d = base_.disks[boundary];
  if (d.contains_infinity) throw Error(ErrorCode::InvalidArgument, "cut-out boundary must be a bounded disk");
  if (!(factor > 1.0)) throw Error(ErrorCode::InvalidArgument, "outer factor must exceed 1");
  outer_ = factor * d.radius;
  for (int k = 0; k < base_.boundary_count(); ++k) {
    if (k == boundary) continue;
    const Disk& e = base_.disks[k];
    const double dist = std::abs(e.center - d.center);
    const bool clear = e.contains_infinity ? dist + outer_ < e.radius : dist - e.radius > outer_;
    if (!clear) throw Error(ErrorCode::InvalidArgument, "working annulus meets another boundary");
  }
  check(family_.radius());
}

void CutoutFamily::check(Complex t) const {
  // Tr_t stays injective on A_0 while |t c| < r log(R_0 / r); this also keeps
  // the moved disk inside |z - p| < R_0.
  const double r = base_.disks[boundary_].radius;
  if (std::abs(t) * std::abs(family_.translation()) >= r * std::log(outer_ / r))
    throw Error(ErrorCode::CutoutEscapes, "moved disk leaves the working annulus");
}

RiggedSurface CutoutFamily::surface(Complex t) const {
  check(t);
  RiggedSurface s = base_;
  s.disks[boundary_].center += t * family_.translation();
  s.riggings[boundary_] = family_.at(t);
  return s;
}

AnnulusInterpolation CutoutFamily::interpolation(Complex t) const {
  const Disk& d = base_.disks[boundary_];
  const CircleMap edge = compose(invert(family_.at(t)), base_.riggings[boundary_]);
  return {CircleMap::identity(edge.size()), edge, d.radius / outer_, 1.0};
}

Jet CutoutFamily::jet_with(const AnnulusInterpolation& theta, Complex t, Complex z) const {
  const Disk& d = base_.disks[boundary_];
  const double rz = std::abs(z - d.center);
  if (rz > outer_) return {z, 1.0, 0.0};
  if (rz < d.radius) return {Complex{kNaN, kNaN}, Complex{kNaN, kNaN}, Complex{kNaN, kNaN}};
  const Mobius m = d.collar();
  const Mobius minv = m.inverse();
  const Jet th = theta.jet(m(z));
  const Complex dm = m.derivative(z);
  const Complex di = minv.derivative(th.value);
  const Jet a{minv(th.value), di * th.dz * dm, di * th.dzbar * std::conj(dm)};

  const double lg = std::log(outer_ / d.radius);
  const Complex tc = t * family_.translation();
  const Complex q = a.value - d.center;
  const double s = std::log(std::abs(q) / d.radius) / lg;
  const Jet tr{a.value + tc * (1.0 - s), 1.0 - tc / (2.0 * lg * q), -tc / (2.0 * lg * std::conj(q))};
  return chain(tr, a);
}

Jet CutoutFamily::comparison_jet(Complex t, Complex z) const {
  check(t);
  return jet_with(interpolation(t), t, z);
}

PlaneMap CutoutFamily::comparison_map(Complex t, const GridSpec& grid) const {
  check(t);
  const AnnulusInterpolation theta = interpolation(t);
  return PlaneMap::sample(grid, [&](Complex z) { return jet_with(theta, t, z).value; });
}

BeltramiField CutoutFamily::comparison_dilatation(Complex t, const GridSpec& grid) const {
  check(t);
  const Disk& d = base_.disks[boundary_];
  const AnnulusInterpolation theta = interpolation(t);
  std::vector<Complex> vals(grid.size());
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const Complex z = grid.node(j, k);
      const double rz = std::abs(z - d.center);
      vals[grid.index(j, k)] = (rz < d.radius || rz > outer_) ? Complex{0.0} : jet_with(theta, t, z).mu();
    }
  return BeltramiField::make(grid, std::move(vals), grid.half_width * std::sqrt(2.0));
}

RiggedSurface CutoutFamily::pullback(Complex t, const GridSpec& grid) const {
  RiggedSurface s = base_;
  BeltramiField mu = comparison_dilatation(t, grid);
  if (base_.marking && !base_.marking->is_zero()) {
    const AnnulusInterpolation theta = interpolation(t);
    // mu(f o F_t) with f carrying the base marking.
    for (int k = 0; k < grid.n; ++k)
      for (int j = 0; j < grid.n; ++j) {
        const Complex z = grid.node(j, k);
        const Jet jt = jet_with(theta, t, z);
        mu.values[grid.index(j, k)] =
            s.contains(z) ? compose_beltrami(base_.marking_at(jt.value), jt) : Complex{0.0};
      }
    mu = BeltramiField::make(grid, std::move(mu.values), grid.half_width * std::sqrt(2.0));
  }
  s.marking = std::move(mu);
  return s;
}

CutoutFamily family_of_cutouts(const RiggedSurface& surface, int boundary, const RiggingFamily& family,
                               double outer_factor) {
  surface.validate();
  return CutoutFamily(surface, boundary, family, outer_factor);
}

}  // namespace qsweld

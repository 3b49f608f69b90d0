#ifndef QSWELD_SURFACES_HPP
#define QSWELD_SURFACES_HPP

#include <optional>
#include <string>
#include <vector>

#include "qsweld/circle_map.hpp"
#include "qsweld/mobius.hpp"
#include "qsweld/welding.hpp"

namespace qsweld {

enum class Orientation { Incoming, Outgoing };

/// A round disk removed from the sphere. With contains_infinity the removed
/// set is the exterior {|z - c| >= r} and the surface lies inside the circle.
struct Disk {
  Complex center;
  double radius = 1.0;
  bool contains_infinity = false;

  [[nodiscard]] bool contains(Complex z) const {
    const double d = std::abs(z - center);
    return contains_infinity ? d > radius : d < radius;
  }
  /// Collar normalization: the boundary circle goes to S^1 and the surface
  /// side to the unit disk. r / (z - c) for bounded disks, (z - c) / r otherwise.
  [[nodiscard]] Mobius collar() const;
  /// The point sent to infinity by the collar map (c, or infinity).
  [[nodiscard]] Complex puncture() const { return contains_infinity ? kInfinity : center; }
};

/// Genus-zero bordered surface: the sphere minus disjoint round disks, with a
/// rigging per boundary (a circle map in that boundary's collar coordinate),
/// orientation tags and a Beltrami marking on the surface.
struct RiggedSurface {
  std::vector<Disk> disks;
  std::vector<Orientation> orientations;
  std::vector<CircleMap> riggings;
  std::optional<BeltramiField> marking;  // absent means zero

  [[nodiscard]] int boundary_count() const { return static_cast<int>(disks.size()); }
  [[nodiscard]] bool contains(Complex z) const;
  /// Marking value at z: bilinear over the surrounding nodes that lie on the
  /// surface; zero off the surface or without a marking.
  [[nodiscard]] Complex marking_at(Complex z) const;
  /// Throws InvalidArgument on inconsistent sizes or overlapping disks. With
  /// a grid, disks must also be separated by two grid cells.
  void validate(const GridSpec* grid = nullptr) const;

  /// Sphere minus bounded disks plus the exterior of an outer circle.
  static RiggedSurface circle_domain(Disk outer, std::vector<Disk> holes, int rigging_samples = 256);
  static RiggedSurface annulus(double r_inner, double r_outer, Orientation inner, Orientation outer,
                               int rigging_samples = 256);
};

enum class Side { X, Y };

/// Charts of a sewn surface around the seam: zeta_1 = F o M_X on the X side
/// and zeta_2 = G o J o M_Y on the Y side, where M are the collar maps.
struct SeamAtlas {
  Mobius collar_x;
  Mobius collar_y;
  CircleMap h = CircleMap::identity(16);
  WeldingResult weld;
  double chart_mismatch = 0.0;
  double window_inner = 0.9;  // collar radii of the checked overlap window
  double window_outer = 1.0;
};

struct SewnBoundary {
  Side side;
  int source_index;
  Orientation orientation;
  CircleMap rigging;           // in the source collar coordinate
  std::vector<Complex> curve;  // realized boundary polyline
};

struct SewnSurface {
  RiggedSurface x;
  RiggedSurface y;
  int i = 0;
  int j = 0;
  SeamAtlas atlas;
  std::vector<SewnBoundary> boundaries;  // order: X_1..X_{i-1}, Y_1..Y_{j-1}, Y_{j+1}.., X_{i+1}..
  std::vector<Complex> seam;

  /// Realization chart of a point of X or Y.
  [[nodiscard]] Complex realize(Side side, Complex z) const;
  [[nodiscard]] Jet realize_jet(Side side, Complex z) const;
};

struct SewOptions {
  WeldOptions weld;
  double weld_tol = 1e-3;
  double chart_tol = 1e-3;
  int curve_samples = 512;
};

/// Sews outgoing boundary i of X to incoming boundary j of Y through
/// h = J o g_Y^{-1} o J o g_X. Throws OrientationMismatch, ChartMismatch and
/// propagated welding errors.
SewnSurface sew(const RiggedSurface& x, int i, const RiggedSurface& y, int j, const GridSpec& grid,
                const SewOptions& options = {});

/// Sphere with punctures obtained by capping every boundary.
struct PuncturedSurface {
  std::vector<Complex> base_points;    // punctures in the base chart (centre or infinity)
  std::vector<Complex> marked_points;  // after uniformization
  BeltramiField total_mu;              // marking on X and cap structure on the disks
  PlaneMap w;
  SolveStats stats;
  std::vector<PlaneMap> local_coords;  // in the base chart; NaN away from cap and collar
};

struct CapOptions {
  double cap_radius = 0.5;  // rho_c: the cap is a rotation inside this radius
  double collar = 0.5;      // collar of the local coordinates, as a fraction of the rim
  double solve_tol = 1e-11;
  int max_iter = 2000;
  bool local_coordinates = false;
};

/// Caps every boundary. Each removed disk B_k is filled with the cap glued by
/// its rigging: the cap structure on B_k is the pullback of the disk by
/// z -> Theta_k^{-1}(1 / M_k(z)), where Theta_k extends J o g_k^{-1} o J into
/// the unit disk by annulus interpolation and is a rotation inside rho_c. One
/// Beltrami solve then uniformizes the capped sphere.
PuncturedSurface sew_caps(const RiggedSurface& x, const GridSpec& grid, const CapOptions& options = {});

/// Cap structure of a single boundary on B_k, zero elsewhere.
Complex cap_beltrami(const Disk& disk, const CircleMap& rigging, double cap_radius, Complex z);

/// Beltrami field on the realization: pushforward of mu (X side) and nu
/// (Y side) through the seam charts; holes and seam cells are zero.
BeltramiField S_beltrami(const RiggedSurface& x_marked, const RiggedSurface& y_marked,
                         const SewnSurface& sewn, const GridSpec& grid);

/// Invariants of the deformed sewn surface: the modulus when two boundaries
/// survive, otherwise best-fit centre and radius (as a complex pair) per boundary.
std::vector<Complex> S_T(const RiggedSurface& x_marked, int i, const RiggedSurface& y_marked, int j,
                         const GridSpec& grid, const SewOptions& options = {});

/// Same quantity by the other order: uniformize each side with its marking
/// reflected across the sewing circle, transport the riggings and re-weld.
std::vector<Complex> S_T_commuted(const RiggedSurface& x_marked, int i, const RiggedSurface& y_marked,
                                  int j, const GridSpec& grid, const SewOptions& options = {});

/// Marked-point invariants: positions left after sending the first three
/// marked points to 0, 1, infinity. Empty for fewer than four points.
std::vector<Complex> invariants(const PuncturedSurface& s);
std::vector<Complex> invariants(const std::vector<Complex>& marked_points);
/// Sewn-surface invariants under w^marking (marking on the realization grid).
std::vector<Complex> invariants(const SewnSurface& s, const BeltramiField& marking);
std::vector<Complex> boundary_invariants(const std::vector<std::vector<Complex>>& curves);

/// Conformal modulus of the doubly connected region between two Jordan
/// polylines, mod A(r, 1) = log(1/r) / 2pi. Harmonic measure is fitted by
/// least squares in a Trefftz basis (1, log|z - p|, Re/Im (z - p)^{+-k}).
/// Throws NonNested unless `inner` lies inside `outer`.
double modulus(const std::vector<Complex>& inner, const std::vector<Complex>& outer, int degree = 24);

bool point_in_polygon(const std::vector<Complex>& poly, Complex z);

/// Replaces the marking of X by that of f o T, T the boundary Dehn twist
/// (r, theta) -> (r, theta + 2 pi turns s(r)) on the collar rho < |u| < 1 of
/// boundary i (u the collar coordinate, rho = 1 - collar_width, s the log
/// ramp). Riggings are unchanged. Throws CollarTooWide.
RiggedSurface dehn_twist_boundary(const RiggedSurface& x, int i, double collar_width,
                                  const GridSpec& grid, double turns = 1.0);

/// Dilatation of f o T from mu_f and the jet of T at z.
Complex compose_beltrami(Complex mu_outer_at_T, const Jet& inner);

std::string to_json(const RiggedSurface& s, const std::string& marking_path = "");
/// Parses the surface JSON; a non-empty "marking" path is loaded relative to base_dir.
RiggedSurface rigged_surface_from_json(const std::string& text, const std::string& base_dir = ".");

}  // namespace qsweld

#endif  // QSWELD_SURFACES_HPP

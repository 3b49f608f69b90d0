#ifndef QSWELD_MOTIONS_HPP
#define QSWELD_MOTIONS_HPP

#include <vector>

#include "qsweld/beltrami.hpp"
#include "qsweld/surfaces.hpp"

namespace qsweld {

struct MotionRecipe {
  Complex a{1.0};  // sigma(z) = a z + b makes sigma o u fix 0 and 1
  Complex b{0.0};
  double ell = 0.5;
  double k = 0.0;  // sup |mu(u)|
};

/// u^t = rho^t o w^{n t mu(u)} with n = 1 / ell and
/// rho^t(z) = ((ell - t) z + t sigma^{-1}(z)) / ell. u^0 = id and u^ell = u.
class MotionFamily {
 public:
  MotionFamily(MotionRecipe recipe, BeltramiField mu, double solve_tol, int max_iter);

  [[nodiscard]] const MotionRecipe& recipe() const { return recipe_; }
  [[nodiscard]] double t_star() const { return recipe_.ell; }
  /// Largest |t| for which rho^t stays non-degenerate, capped at 1.
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] const BeltramiField& mu() const { return mu_; }
  /// Throws DegenerateAffine when |t| >= radius().
  [[nodiscard]] PlaneMap sample(Complex t, SolveStats* stats = nullptr) const;
  /// rho^t as an affine map z -> alpha z + beta.
  [[nodiscard]] std::pair<Complex, Complex> affine_part(Complex t) const;

 private:
  MotionRecipe recipe_;
  BeltramiField mu_;
  double solve_tol_;
  int max_iter_;
  double radius_ = 1.0;
};

struct MotionOptions {
  double support_radius = -1.0;  // dilatation kept inside this radius; < 0 means L/2
  double solve_tol = 1e-10;
  int max_iter = 2000;
};

/// Throws BudgetExceeded if sup |mu(u)| >= 0.9.
MotionFamily embed_in_motion(const PlaneMap& u, const MotionOptions& options = {});

/// Lift perturbation eta(theta) = sum_m coeff_m e^{i n_m theta}.
struct FourierMode {
  int n = 1;
  Complex coeff{0.0};
};

/// g_t = g_0 + Re(t eta), real-affine in (Re t, Im t), together with a
/// translation t c of the disk the rigging lives on.
class RiggingFamily {
 public:
  RiggingFamily(CircleMap base, std::vector<FourierMode> direction, double radius,
                Complex translation = 0.0);

  [[nodiscard]] const CircleMap& base() const { return base_; }
  [[nodiscard]] const std::vector<FourierMode>& direction() const { return direction_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] Complex translation() const { return translation_; }
  [[nodiscard]] double lift(Complex t, double theta) const;
  [[nodiscard]] CircleMap at(Complex t) const;

 private:
  CircleMap base_;
  std::vector<FourierMode> direction_;
  double radius_;
  Complex translation_;
};

/// Throws MonotonicityLost if some g_t with |t| <= radius fails to be
/// increasing (checked through min_theta g_0' - radius |eta'|).
RiggingFamily rigging_family(const CircleMap& base, std::vector<FourierMode> direction, double radius,
                             Complex translation = 0.0);

/// Cut-out surfaces Sigma_t: boundary `boundary` (a bounded disk of radius r
/// centred at p) is moved to p + t c and re-rigged by g_t. The comparison map
/// F_t: Sigma_0 -> Sigma_t is the identity off A_0 = {r <= |z - p| <= R_0}
/// and on A_0 equals
///   z -> Tr_t(M_0^{-1}(Theta_t(M_0(z)))),
/// Theta_t the annulus interpolation between the identity at r / R_0 and
/// g_t^{-1} o g_0 on the unit circle, Tr_t(z) = z + t c (1 - s(z)) with s the
/// log ramp across A_0.
class CutoutFamily {
 public:
  CutoutFamily(RiggedSurface base, int boundary, RiggingFamily family, double outer_factor = 2.0);

  [[nodiscard]] const RiggedSurface& base() const { return base_; }
  [[nodiscard]] int boundary() const { return boundary_; }
  [[nodiscard]] const RiggingFamily& family() const { return family_; }
  [[nodiscard]] double outer_radius() const { return outer_; }

  /// Throws CutoutEscapes if the moved disk leaves the working annulus.
  [[nodiscard]] RiggedSurface surface(Complex t) const;
  /// Jet of F_t; the identity beyond A_0 and NaN inside the base disk.
  [[nodiscard]] Jet comparison_jet(Complex t, Complex z) const;
  [[nodiscard]] PlaneMap comparison_map(Complex t, const GridSpec& grid) const;
  /// mu(F_t) from the exact jets, zero off A_0.
  [[nodiscard]] BeltramiField comparison_dilatation(Complex t, const GridSpec& grid) const;
  /// Sigma_0 carrying the marking mu(F_t) and the base rigging: the same point
  /// of moduli as surface(t).
  [[nodiscard]] RiggedSurface pullback(Complex t, const GridSpec& grid) const;

 private:
  void check(Complex t) const;
  [[nodiscard]] AnnulusInterpolation interpolation(Complex t) const;
  [[nodiscard]] Jet jet_with(const AnnulusInterpolation& theta, Complex t, Complex z) const;

  RiggedSurface base_;
  int boundary_;
  RiggingFamily family_;
  double outer_;
};

/// Throws CutoutEscapes if some |t| <= radius moves the disk out of A_0, and
/// InvalidArgument unless the boundary is a bounded disk whose annulus A_0
/// avoids the other boundaries.
CutoutFamily family_of_cutouts(const RiggedSurface& surface, int boundary, const RiggingFamily& family,
                               double outer_factor = 2.0);

}  // namespace qsweld

#endif  // QSWELD_MOTIONS_HPP

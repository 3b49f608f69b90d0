#ifndef QSWELD_WELDING_HPP
#define QSWELD_WELDING_HPP

#include <memory>
#include <vector>

#include "qsweld/beltrami.hpp"
#include "qsweld/circle_map.hpp"

namespace qsweld {

/// Power series sum_n a_n z^n of a map holomorphic on the unit disk.
struct InteriorSeries {
  std::vector<Complex> a;
  [[nodiscard]] Jet jet(Complex z) const;
};

/// lead z + sum_{n >= 0} b_n z^{-n} of a map holomorphic on |z| > 1 with a
/// simple pole at infinity.
struct ExteriorSeries {
  Complex lead{1.0};
  std::vector<Complex> b;
  [[nodiscard]] Jet jet(Complex z) const;
};

struct WeldOptions {
  int fit_samples = 512;      // samples on the fitting circles
  int seam_samples = 1024;    // S
  double fit_offset = 4.0;    // fitting circles at 1 -/+ fit_offset * h
  double solve_tol = 1e-10;
  int max_iter = 2000;
};

/// F, G conformal on the unit disk and its exterior with G^{-1} o F = h on the
/// unit circle. F is w o H^{-1} where H extends h^{-1} to the disk and w solves
/// the Beltrami equation for mu_H; G is w on the exterior. The grid maps are
/// the raw samples; the series are fitted on circles just inside and outside
/// the unit circle and are what boundary evaluation uses.
struct WeldingResult {
  PlaneMap F;  // NaN outside the closed disk
  PlaneMap G;  // NaN inside the open disk
  std::vector<Complex> seam;
  double residual = 0.0;
  double qs_estimate = 1.0;
  SolveStats stats;
  double mu_sup = 0.0;
  InteriorSeries f_series;
  ExteriorSeries g_series;
  PlaneMap w;

  [[nodiscard]] Jet F_jet(Complex z) const { return f_series.jet(z); }
  [[nodiscard]] Jet G_jet(Complex z) const { return g_series.jet(z); }
  [[nodiscard]] Complex F_at(Complex z) const { return f_series.jet(z).value; }
  [[nodiscard]] Complex G_at(Complex z) const { return g_series.jet(z).value; }
  [[nodiscard]] Complex F_inverse(Complex target, Complex guess) const;
  [[nodiscard]] Complex G_inverse(Complex target, Complex guess) const;
};

/// Welds h. Throws ResidualTooLarge (message carries the achieved residual)
/// when the welding residual exceeds tol; weld_diagnostic never does.
WeldingResult weld(const CircleMap& h, const GridSpec& grid, double tol,
                   const WeldOptions& options = {});
WeldingResult weld_diagnostic(const CircleMap& h, const GridSpec& grid,
                              const WeldOptions& options = {});

/// sup over `samples` angles of |G^{-1}(F(e^{i theta})) - e^{i h(theta)}|.
double welding_residual(const WeldingResult& result, const CircleMap& h, int samples);
inline double welding_residual(const WeldingResult& result, const CircleMap& h) {
  return welding_residual(result, h, 4 * static_cast<int>(result.seam.size()));
}

struct QuasicircleReport {
  double turning_constant = 1.0;
  bool refinement_stable = true;
};

/// Bounded-turning statistic: sup over pairs (a, c) of the smaller over the
/// two arcs of max_b (|a - b| + |b - c|) / |a - c|. Computed on at most 512
/// points; stability compares against every other point. Throws
/// SelfIntersecting when two non-adjacent segments cross.
QuasicircleReport quasicircle_check(const std::vector<Complex>& seam);
double turning_constant(const std::vector<Complex>& polyline);
bool self_intersects(const std::vector<Complex>& polyline);

struct CircleFit {
  Complex center;
  double radius = 0.0;
  double max_deviation = 0.0;  // max | |p - center| - radius |
};
/// Algebraic least-squares circle fit.
CircleFit fit_circle(const std::vector<Complex>& points);

}  // namespace qsweld

#endif  // QSWELD_WELDING_HPP

#ifndef QSWELD_HOLOTEST_HPP
#define QSWELD_HOLOTEST_HPP

#include <functional>
#include <string>
#include <vector>

#include "qsweld/common.hpp"

namespace qsweld {

/// Centre plus concentric rings of equally spaced parameter values. Samples
/// are stored in points() order: the centre, then ring by ring.
struct Stencil {
  Complex center{0.0};
  std::vector<double> radii;
  int angles_per_ring = 8;
  std::vector<std::vector<Complex>> samples;

  /// Radii {0.3, 0.6} * radius, eight angles.
  static Stencil standard(Complex center, double radius);
  [[nodiscard]] std::vector<Complex> points() const;
  /// Fills samples by evaluating f at every point.
  void sample(const std::function<std::vector<Complex>(Complex)>& f);
};

struct HoloThresholds {
  double cr = 1e-3;
  double morera = 1e-3;
  double epsilon = 1e-9;  // relative to the mean sample modulus
};

struct HoloVerdict {
  double cr = 0.0;
  double morera = 0.0;
  bool pass = false;
  HoloThresholds thresholds;
  std::vector<double> cr_components;
  std::vector<double> morera_components;
  std::vector<Complex> dt;     // fitted df/dt per component
  std::vector<Complex> dtbar;  // fitted df/dt-bar per component
};

/// Least-squares fit f ~ f0 + A (t - t0) + B conj(t - t0) over the stencil;
/// cr = |B| / (|A| + eps * mean|f|). morera is the largest ring value of
/// |sum f dt| / (2 pi r mean|f|). Throws IllConditioned for fewer than two
/// rings or eight angles, duplicate or collinear points; MissingSample and
/// DimensionMismatch for incomplete samples.
HoloVerdict cr_residual(const Stencil& stencil, const HoloThresholds& thresholds = {});

/// Reads a family manifest {"stencil": {"center", "radii", "angles"},
/// "t_samples": [[re, im], ...], "outputs": [...]} where each output is an
/// inline object or a path (relative to base_dir) to a JSON file. `selector`
/// names the field holding a complex value [re, im] or a list of them; real
/// values are refused with RealValuedSelector. Returns the verdict JSON
/// {cr, morera, pass, thresholds, components, inputs} with FNV-1a hashes of
/// every output.
std::string holomorphy_report(const std::string& manifest_text, const std::string& selector,
                              const std::string& base_dir = ".", const HoloThresholds& thresholds = {});

}  // namespace qsweld

#endif  // QSWELD_HOLOTEST_HPP

#ifndef QSWELD_BELTRAMI_HPP
#define QSWELD_BELTRAMI_HPP

#include "qsweld/grid.hpp"

namespace qsweld {

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

/// Normalized solution w^mu of w_zbar = mu w_z fixing 0, 1 and infinity.
///
/// phi = w_zbar solves phi = mu (1 + S phi), iterated as a Neumann series with
/// the Beurling transform S applied as the Fourier multiplier conj(xi)/xi on a
/// 2x padded grid. w = z + C phi with C the Cauchy transform, evaluated by an
/// aperiodic convolution with the cell-averaged kernel 1/(pi z). The result
/// carries a far-field expansion valid outside the support of mu.
///
/// Throws BudgetExceeded if sup|mu| > 0.95 or the support does not fit in
/// the inner half of the window, NoConvergence if the fixed-point residual is
/// still above tol after max_iter sweeps.
PlaneMap solve_beltrami(const BeltramiField& mu, double tol = 1e-10, int max_iter = 2000,
                        SolveStats* stats = nullptr);

/// Centered-difference dilatation f_zbar / f_z. The outer two rings of nodes
/// and nodes whose stencil touches an undefined sample are set to zero.
/// Throws DegenerateJacobian where |f_z| < 1e-12 or the Jacobian is not positive.
BeltramiField dilatation(const PlaneMap& f);

/// K = (1 + k) / (1 - k)
double maximal_dilatation(double k);
double maximal_dilatation(const BeltramiField& mu);

/// (1/2) log K of the representative w^g o (w^f)^{-1}. Its dilatation at
/// w^f(z) has modulus |g - f| / |1 - conj(f) g| evaluated at z, so the bound is
/// computed node by node without forming the composition.
double teichmuller_distance_upper(const BeltramiField& f_mu, const BeltramiField& g_mu);

/// Affine renormalization w -> (w - w(0)) / (w(1) - w(0)) using the grid
/// interpolant (nodes are used directly when 0 and 1 are nodes).
PlaneMap normalize01(const PlaneMap& w);

/// Number of threads handed to FFTW, taken from QSWELD_THREADS (default 1).
int fft_threads();

}  // namespace qsweld

#endif  // QSWELD_BELTRAMI_HPP

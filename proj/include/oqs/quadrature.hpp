// quadrature.hpp — panel Gauss-Legendre integration, adaptive refinement, and
// the breakpoint lattices used by the oscillatory finite-window integrals.
#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "oqs/chain_params.hpp"

namespace oqs {

struct QuadratureSpec {
    double rel_tol = 1e-12;     // relative tolerance for adaptive panels
    double abs_tol = 1e-14;     // absolute tolerance floor
    int max_panels = 200000;    // panel budget per integral
    double pv_excision = 1e-3;  // half-width for principal-value excision

    bool operator==(const QuadratureSpec&) const = default;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
        if (max_panels < 64)
            throw std::invalid_argument("QuadratureSpec: max_panels must be >= 64");
        if (!(pv_excision > 0.0))
            throw std::invalid_argument("QuadratureSpec: pv_excision must be > 0");
    }
};

// Shared evaluation nodes for a panel decomposition: ten-point Gauss-Legendre
// on each panel, so integrals of different kernels over the same panels are
// plain weighted sums over one node set.
struct PanelNodes {
    std::vector<double> x;  // abscissae
    std::vector<double> w;  // weights
};

// Build nodes from sorted panel breakpoints.
PanelNodes panel_nodes(const std::vector<double>& breakpoints);

// Breakpoints for the window [-omega_c, omega_c] subdivided at every zero and
// extremum of the sinc factors centred on the mode energies (pi/delta_t
// lattice per mode, plus the window ends and the kernel kink at 0).  Throws
// when the panel count would exceed the budget.
std::vector<double> oscillatory_breakpoints(const NormalModes& modes,
                                            double omega_c, double delta_t,
                                            const QuadratureSpec& quad);

// Adaptive Gauss-Legendre on [a, b]: bisect until the two-half refinement
// agrees with the single panel within tolerance.  Throws if the panel budget
// is exhausted before convergence.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, const QuadratureSpec& quad);

// Cauchy principal value of  int_0^inf J(w)/(epsilon - w) dw  with the Ohmic
// density J(w) = w exp(-w/omega_c).  Symmetric excision of the pole at three
// shrinking half-widths followed by Richardson extrapolation; tail truncated
// at 40 omega_c.  For epsilon outside (0, tail) the integrand is smooth and a
// plain adaptive pass is used.
double lamb_shift_pv(double epsilon, const ChainParams& params,
                     const QuadratureSpec& quad);

}  // namespace oqs

#pragma once

#include <vector>

#include "lasersim/channel.hpp"
#include "lasersim/fock.hpp"

namespace lasersim {

// Fixed-step fourth-order Runge-Kutta configuration. dt <= 0 selects the
// default 1e-3 / max(g, kappa, 1).
struct IntegrationConfig {
    double dt = 0.0;
    double boundary_tolerance = 1e-8; // max allowed population at the top two levels
};

// Right-hand side of the master equation
//   g (2 a+ rho a - a a+ rho - rho a a+) + kappa (2 a rho a+ - a+a rho - rho a+a)
// with truncated operator products, so the result is exactly trace-free.
FockOperator liouvillian_apply(const DensityMatrix& rho, const LaserParams& params);

// RK4 integration to time t with Hermitian symmetrization each step. A second
// run at dt/2 must agree entrywise within 1e-8 or the step-size gate throws.
DensityMatrix evolve(const DensityMatrix& rho0, const LaserParams& params, double t,
                     const IntegrationConfig& config = {});

// Single integration pass over an increasing time grid (times[0] >= 0),
// returning the state at every grid point; the dt/2 gate is applied at each
// of them. Much cheaper than repeated evolve() calls from t = 0.
std::vector<DensityMatrix> evolve_series(const DensityMatrix& rho0, const LaserParams& params,
                                         const std::vector<double>& times,
                                         const IntegrationConfig& config = {});

} // namespace lasersim

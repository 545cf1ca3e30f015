#pragma once

#include <optional>

#include "lasersim/channel.hpp"

namespace lasersim {

enum class RegimeKind {
    damping_dominated, // kappa > g
    balanced,          // kappa = g
    gain_dominated,    // kappa < g
};

// Long-time behavior of the entropy: a finite constant, logarithmic growth
// offset + ln t, or linear growth slope * t + intercept.
struct EntropyAsymptote {
    enum class Kind { constant, logarithmic, linear } kind;
    double constant = 0.0;  // kind == constant
    double offset = 0.0;    // kind == logarithmic: S ~ offset + ln t
    double slope = 0.0;     // kind == linear
    double intercept = 0.0; // kind == linear
};

struct Regime {
    RegimeKind kind;
    std::optional<double> n_asymptote; // finite only when damping-dominated
    EntropyAsymptote entropy;
    // Photon-number growth descriptors for the non-saturating regimes.
    std::optional<double> n_slope;       // balanced: <n> = intercept + slope * t
    std::optional<double> n_prefactor;   // gain: <n> ~ prefactor * e^(rate * t)
    std::optional<double> n_growth_rate; // gain
};

// <n>(t) = g (1 - e^(-2(kappa-g)t)) / (kappa - g) + |z|^2 e^(-2(kappa-g)t),
// with the balanced branch |z|^2 + 2 g t evaluated exactly.
double mean_photon_closed(Complex z, const LaserParams& params, double t);

// Entropy of the evolved state in units of k_B; independent of z.
double entropy_closed(const LaserParams& params, double t);

// Entropy per expected photon, S / <n>. Undefined at <n> = 0.
double specific_entropy(Complex z, const LaserParams& params, double t);

Regime asymptotics(Complex z, const LaserParams& params);

// Temperature whose Bose-Einstein occupancy matches the steady-state photon
// number g/(kappa-g); requires kappa > g > 0. hbar_omega_over_kb sets the
// physical scale (entropy itself is dimensionless).
double equivalent_temperature(const LaserParams& params, double hbar_omega_over_kb);

} // namespace lasersim

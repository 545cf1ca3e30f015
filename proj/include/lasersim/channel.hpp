#pragma once

#include "lasersim/fock.hpp"

namespace lasersim {

// Cavity gain and loss rates (both >= 0, units 1/time).
struct LaserParams {
    double g = 0.0;
    double kappa = 0.0;
};

// The three scalar coefficients parameterizing the channel at time t.
// Always satisfy t3 = 1 - g*t1, 0 < t2 <= 1, 0 < t3 <= 1, g*t1 in [0,1).
struct ChannelCoefficients {
    double t1 = 0.0;
    double t2 = 1.0;
    double t3 = 1.0;
    double t = 0.0;
};

ChannelCoefficients coefficients(const LaserParams& params, double t);

// Operator-sum family M(i,j) = c_ij * t2^(a+a) * (a+)^j a^i with
//   c_ij = sqrt(kappa^i g^j t3 t1^(i+j) / (i! j! t2^(2j))).
// Operators are materialized on demand; the channel application and the
// completeness audit evaluate the sum in factored form without ever storing
// the full family.
class KrausSet {
public:
    KrausSet(LaserParams params, double t, int dim, int i_max, int j_max);

    int dim() const { return dim_; }
    int i_max() const { return i_max_; }
    int j_max() const { return j_max_; }
    const LaserParams& params() const { return params_; }
    double t() const { return t_; }
    const ChannelCoefficients& coeffs() const { return coeffs_; }

    // The (i, j) member of the family as a dense matrix.
    FockOperator op(int i, int j) const;

private:
    LaserParams params_;
    double t_;
    int dim_;
    int i_max_;
    int j_max_;
    ChannelCoefficients coeffs_;
};

KrausSet kraus_set(const LaserParams& params, double t, int dim, int i_max, int j_max);

// Adaptive construction: i_max = dim, j_max doubled from dim until the
// completeness defect at probe_dim drops below tol, capped at 4*dim.
// probe_dim <= 0 selects the default dim/2.
KrausSet auto_kraus_set(const LaserParams& params, double t, int dim, double tol = 1e-8,
                        int probe_dim = 0);

// Max-abs deviation of sum(M+ M) from the identity on the leading
// probe_dim x probe_dim block. Requires probe_dim <= dim/2.
double completeness_defect(const KrausSet& ks, int probe_dim);

// rho(t) = sum M rho0 M+. Requires rho0 population above dim/2 to be
// negligible; the trace deficit of the result is |1 - trace|.
DensityMatrix apply_channel(const KrausSet& ks, const DensityMatrix& rho0);

enum class ClosedPath {
    triple, // product of displacement-like exponential, geometric middle, adjoint
    single, // one matrix exponential of the combined generator
};

// Closed-form evolved state for a coherent input |z><z|. Both paths agree
// entrywise within 1e-9; g = 0 and t = 0 return the exact limiting pure
// coherent states instead of evaluating the singular logarithm.
DensityMatrix rho_coherent_closed(Complex z, const LaserParams& params, double t, int dim,
                                  ClosedPath path);

} // namespace lasersim

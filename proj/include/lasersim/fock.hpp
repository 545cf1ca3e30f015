#pragma once

#include <complex>

#include <Eigen/Dense>

#include "lasersim/errors.hpp"

namespace lasersim {

using Complex = std::complex<double>;

// Operators on a Fock space truncated to levels 0..dim-1. Row/column indices
// are photon numbers; all truncation artifacts live at the top level.
using FockOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// A validated density matrix: Hermitian, unit trace (within trace_tolerance),
// positive semidefinite up to numerical noise (min eigenvalue >= -1e-10).
class DensityMatrix {
public:
    explicit DensityMatrix(FockOperator rho, double trace_tolerance = 1e-8);

    const FockOperator& matrix() const { return rho_; }
    double trace_tolerance() const { return trace_tolerance_; }
    Eigen::Index dim() const { return rho_.rows(); }

private:
    FockOperator rho_;
    double trace_tolerance_;
};

// Ladder operator a: entry sqrt(n) at (n-1, n).
FockOperator annihilation(int dim);

// a^dagger (conjugate transpose of the ladder operator).
FockOperator creation(int dim);

// a^dagger a; exactly diag(0, 1, ..., dim-1) in the truncated space.
FockOperator number_operator(int dim);

// Coherent-state amplitudes c_n = e^{-|z|^2/2} z^n / sqrt(n!), n < dim,
// computed in log space. If renormalize, divided by the truncated norm.
StateVector coherent_vector(Complex z, int dim, bool renormalize = false);

// exp(M) for a general (possibly non-normal) square complex matrix.
FockOperator matrix_exponential(const FockOperator& m);

// S = -sum(lambda ln lambda) over the eigenvalues of the Hermitian part,
// clamped to [0,1]; eigenvalues below -1e-10 are treated as an error.
double von_neumann_entropy(const DensityMatrix& rho);

// Tr[rho * obs]; imaginary part stays below 1e-10 for Hermitian obs.
Complex expectation(const DensityMatrix& rho, const FockOperator& obs);

// Largest diagonal population among the top two Fock levels; the headroom
// diagnostic used by the channel and integrator modules.
double boundary_population(const FockOperator& rho);

} // namespace lasersim

#pragma once

#include "lasersim/fock.hpp"

namespace lasersim {

// Symmetric quadratic form on 2n phase-space-doubled modes, with any time
// factor already absorbed into the matrix.
class QuadraticForm {
public:
    QuadraticForm(int n_modes, FockOperator gamma);

    int n_modes() const { return n_modes_; }
    const FockOperator& gamma() const { return gamma_; }

private:
    int n_modes_;
    FockOperator gamma_;
};

// n x n blocks of a symplectic matrix [[Q, L], [N, P]].
struct SymplecticBlocks {
    int n_modes;
    FockOperator q, l, n, p;
};

// Data of the normal-ordered factorization
//   prefactor * exp(pair_creation on creation pairs)
//             * ordered middle from log_middle
//             * exp(pair_annihilation on annihilation pairs).
struct NormalOrderData {
    Complex prefactor;        // 1/sqrt(det P)
    FockOperator pair_creation;      // -L P^{-1}
    FockOperator log_middle;         // ln(P~^{-1})
    FockOperator pair_annihilation;  // P^{-1} N
};

// Block matrix [[0, -I], [I, 0]] of size 2n x 2n.
FockOperator pi_matrix(int n_modes);

// The 4x4 symmetric form t * [[2g J2, -(g+kappa) I2], [-(g+kappa) I2, 2kappa J2]]
// in mode order (tilde, real).
QuadraticForm laser_gamma(double g, double kappa, double t);

// exp(gamma * Pi) partitioned into blocks.
SymplecticBlocks blocks_numeric(const QuadraticForm& gamma);

// Closed-form blocks for the laser form, with an exact branch at g = kappa.
SymplecticBlocks laser_blocks_closed(double g, double kappa, double t);

// Max residual of the four block relations
// Q L~ = L Q~, Q P~ - L N~ = I, N P~ = P N~, P Q~ - N L~ = I  (~ = transpose).
double symplectic_defect(const SymplecticBlocks& blocks);

NormalOrderData normal_order_data(const SymplecticBlocks& blocks);

// Unnormalized maximally-correlated two-mode vector: entry 1 at every
// (n, n) pair, length dim^2, index = n_real * dim + n_tilde.
StateVector eta_zero_vector(int dim);

// Exponentiates the two-mode generator of the master equation directly and
// compares it against the factored form
//   t3 * exp(g t1 a+ at+) * diag(t2^(n_r + n_t)) * exp(kappa t1 a at)
// on the sub-block with all four photon indices < dim/2.
// Returns the max entrywise deviation there.
double factorization_check(double g, double kappa, double t, int dim);

} // namespace lasersim

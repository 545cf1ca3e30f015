#include "lasersim/symplectic.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "lasersim/channel.hpp"

namespace lasersim {

namespace {

// sinh(x)/x without cancellation near zero.
double sinhc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

bool degenerate_rates(double g, double kappa) {
    return std::abs(kappa - g) <= 1e-9 * std::max({kappa, g, 1.0});
}

} // namespace

QuadraticForm::QuadraticForm(int n_modes, FockOperator gamma)
    : n_modes_(n_modes), gamma_(std::move(gamma)) {
    if (n_modes_ < 1) throw DomainError("QuadraticForm: n_modes must be >= 1");
    if (gamma_.rows() != 2 * n_modes_ || gamma_.cols() != 2 * n_modes_) {
        std::ostringstream os;
        os << "QuadraticForm: matrix is " << gamma_.rows() << "x" << gamma_.cols()
           << ", expected " << 2 * n_modes_ << "x" << 2 * n_modes_;
        throw ShapeError(os.str());
    }
    if (!gamma_.allFinite()) throw DomainError("QuadraticForm: non-finite entries");
    const double scale = std::max(1.0, gamma_.cwiseAbs().maxCoeff());
    const double asym = (gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-14 * scale) {
        std::ostringstream os;
        os << "QuadraticForm: symmetry defect " << asym;
        throw DomainError(os.str());
    }
}

FockOperator pi_matrix(int n_modes) {
    if (n_modes < 1) throw DomainError("pi_matrix: n_modes must be >= 1");
    const int n = n_modes;
    FockOperator pi = FockOperator::Zero(2 * n, 2 * n);
    pi.topRightCorner(n, n) = -FockOperator::Identity(n, n);
    pi.bottomLeftCorner(n, n) = FockOperator::Identity(n, n);
    return pi;
}

QuadraticForm laser_gamma(double g, double kappa, double t) {
    if (!(g >= 0) || !(kappa >= 0) || !(t >= 0) || !std::isfinite(g) || !std::isfinite(kappa) ||
        !std::isfinite(t))
        throw DomainError("laser_gamma: rates and time must be finite and nonnegative");
    FockOperator j2(2, 2);
    j2 << 0, 1, 1, 0;
    const FockOperator i2 = FockOperator::Identity(2, 2);
    FockOperator gamma = FockOperator::Zero(4, 4);
    gamma.topLeftCorner(2, 2) = 2.0 * g * j2;
    gamma.topRightCorner(2, 2) = -(g + kappa) * i2;
    gamma.bottomLeftCorner(2, 2) = -(g + kappa) * i2;
    gamma.bottomRightCorner(2, 2) = 2.0 * kappa * j2;
    return QuadraticForm(2, t * gamma);
}

SymplecticBlocks blocks_numeric(const QuadraticForm& gamma) {
    const int n = gamma.n_modes();
    const FockOperator m = matrix_exponential(gamma.gamma() * pi_matrix(n));
    return SymplecticBlocks{n, m.topLeftCorner(n, n), m.topRightCorner(n, n),
                            m.bottomLeftCorner(n, n), m.bottomRightCorner(n, n)};
}

SymplecticBlocks laser_blocks_closed(double g, double kappa, double t) {
    if (!(g >= 0) || !(kappa >= 0) || !(t >= 0))
        throw DomainError("laser_blocks_closed: rates and time must be nonnegative");
    double q, l, n, p;
    const double d = (g - kappa) * t;
    // The linear branch is the exact d -> 0 limit, so it also covers t = 0
    // (where the generic expressions hit 0/0) for any rate pair.
    if (degenerate_rates(g, kappa) || d == 0.0) {
        q = 1.0 - (g + kappa) * t;
        p = 1.0 + (g + kappa) * t;
        l = -2.0 * g * t;
        n = 2.0 * kappa * t;
    } else {
        q = 1.0 + t * (g * std::expm1(-d) - kappa * std::expm1(d)) / d;
        p = 1.0 + t * (g * std::expm1(d) - kappa * std::expm1(-d)) / d;
        const double sh = sinhc(d);
        l = -2.0 * g * t * sh;
        n = 2.0 * kappa * t * sh;
    }
    FockOperator j2(2, 2);
    j2 << 0, 1, 1, 0;
    const FockOperator i2 = FockOperator::Identity(2, 2);
    return SymplecticBlocks{2, q * i2, l * j2, n * j2, p * i2};
}

double symplectic_defect(const SymplecticBlocks& b) {
    const FockOperator id = FockOperator::Identity(b.n_modes, b.n_modes);
    const double r1 = (b.q * b.l.transpose() - b.l * b.q.transpose()).cwiseAbs().maxCoeff();
    const double r2 = (b.q * b.p.transpose() - b.l * b.n.transpose() - id).cwiseAbs().maxCoeff();
    const double r3 = (b.n * b.p.transpose() - b.p * b.n.transpose()).cwiseAbs().maxCoeff();
    const double r4 = (b.p * b.q.transpose() - b.n * b.l.transpose() - id).cwiseAbs().maxCoeff();
    return std::max({r1, r2, r3, r4});
}

NormalOrderData normal_order_data(const SymplecticBlocks& blocks) {
    const Complex det_p = blocks.p.determinant();
    if (std::abs(det_p) <= 1e-12)
        throw NumericalError("normal_order_data: singular lower-right block");
    if (std::abs(det_p.imag()) > 1e-8 * std::abs(det_p) || det_p.real() <= 0.0) {
        std::ostringstream os;
        os << "normal_order_data: det P = (" << det_p.real() << ", " << det_p.imag()
           << ") is not positive; no principal branch";
        throw NumericalError(os.str());
    }
    const FockOperator p_inv = blocks.p.inverse();
    NormalOrderData data;
    data.prefactor = 1.0 / std::sqrt(det_p.real());
    data.pair_creation = -blocks.l * p_inv;
    data.log_middle = FockOperator(blocks.p.transpose().inverse()).log();
    data.pair_annihilation = p_inv * blocks.n;
    if (!data.log_middle.allFinite())
        throw NumericalError("normal_order_data: matrix logarithm failed");
    return data;
}

StateVector eta_zero_vector(int dim) {
    if (dim < 1) throw DomainError("eta_zero_vector: dim must be >= 1");
    StateVector v = StateVector::Zero(Eigen::Index(dim) * dim);
    for (int n = 0; n < dim; ++n) v(Eigen::Index(n) * dim + n) = 1.0;
    return v;
}

double factorization_check(double g, double kappa, double t, int dim) {
    if (dim < 1) throw DomainError("factorization_check: dim must be >= 1");
    if (Eigen::Index(dim) * dim > 4096)
        throw DomainError("factorization_check: dim^2 exceeds 4096");
    if (t * std::max(g, kappa) > 1.0)
        throw DomainError("factorization_check: t*max(g,kappa) must be <= 1");

    const ChannelCoefficients c = coefficients(LaserParams{g, kappa}, t);
    const FockOperator a = annihilation(dim);
    const FockOperator ad = creation(dim);
    const FockOperator id = FockOperator::Identity(dim, dim);

    // Two-mode index map: (real mode) x (tilde mode), index = n_real*dim + n_tilde.
    const FockOperator cr_pair = Eigen::kroneckerProduct(ad, ad).eval(); // a+ at+
    const FockOperator an_pair = Eigen::kroneckerProduct(a, a).eval();   // a at
    const FockOperator aad = a * ad; // truncated product: top level reads zero
    const FockOperator nop = number_operator(dim);
    const FockOperator gen =
        g * (2.0 * cr_pair - Eigen::kroneckerProduct(aad, id) - Eigen::kroneckerProduct(id, aad)) +
        kappa *
            (2.0 * an_pair - Eigen::kroneckerProduct(nop, id) - Eigen::kroneckerProduct(id, nop));

    const FockOperator u_brute = matrix_exponential(t * gen);

    // Headroom: evolve the vectorized vacuum and inspect the truncation boundary.
    const Eigen::Index d2 = Eigen::Index(dim) * dim;
    StateVector vac = StateVector::Zero(d2);
    vac(0) = 1.0;
    const StateVector evolved = u_brute * vac;
    double boundary = 0.0;
    for (int nr = 0; nr < dim; ++nr)
        for (int nt = 0; nt < dim; ++nt)
            if (nr == dim - 1 || nt == dim - 1)
                boundary = std::max(boundary, std::abs(evolved(Eigen::Index(nr) * dim + nt)));
    if (boundary > 1e-8) {
        std::ostringstream os;
        os << "factorization_check: boundary population " << boundary << " at g=" << g
           << " kappa=" << kappa << " t=" << t << " dim=" << dim;
        throw HeadroomError(os.str());
    }

    // Factored side: t3 * exp(g t1 a+ at+) * diag(t2^(nr+nt)) * exp(kappa t1 a at).
    FockOperator middle = FockOperator::Zero(d2, d2);
    for (int nr = 0; nr < dim; ++nr)
        for (int nt = 0; nt < dim; ++nt) {
            const Eigen::Index k = Eigen::Index(nr) * dim + nt;
            middle(k, k) = std::pow(c.t2, nr + nt);
        }
    const FockOperator u_fact = c.t3 * (matrix_exponential(g * c.t1 * cr_pair) *
                                        (middle * matrix_exponential(kappa * c.t1 * an_pair)));

    const int half = dim / 2;
    double dev = 0.0;
    for (int nr = 0; nr < half; ++nr)
        for (int nt = 0; nt < half; ++nt)
            for (int mr = 0; mr < half; ++mr)
                for (int mt = 0; mt < half; ++mt) {
                    const Eigen::Index r = Eigen::Index(nr) * dim + nt;
                    const Eigen::Index s = Eigen::Index(mr) * dim + mt;
                    dev = std::max(dev, std::abs(u_brute(r, s) - u_fact(r, s)));
                }
    return dev;
}

} // namespace lasersim

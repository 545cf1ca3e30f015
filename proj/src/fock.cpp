#include "lasersim/fock.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace lasersim {

namespace {

void require_square(const FockOperator& m, const char* what) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << ": matrix is " << m.rows() << "x" << m.cols() << ", expected square";
        throw ShapeError(os.str());
    }
}

} // namespace

DensityMatrix::DensityMatrix(FockOperator rho, double trace_tolerance)
    : rho_(std::move(rho)), trace_tolerance_(trace_tolerance) {
    require_square(rho_, "DensityMatrix");
    if (rho_.rows() < 1) throw DomainError("DensityMatrix: empty matrix");
    if (!rho_.allFinite()) throw NumericalError("DensityMatrix: non-finite entries");
    if (trace_tolerance_ <= 0) throw DomainError("DensityMatrix: trace_tolerance must be positive");

    const double scale = rho_.cwiseAbs().maxCoeff();
    const double herm_defect = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-12 * scale) {
        std::ostringstream os;
        os << "DensityMatrix: Hermiticity defect " << herm_defect << " exceeds 1e-12 * " << scale;
        throw NumericalError(os.str());
    }

    const double trace_err = std::abs(rho_.trace() - Complex(1.0));
    if (trace_err > trace_tolerance_) {
        std::ostringstream os;
        os << "DensityMatrix: |trace - 1| = " << trace_err << " exceeds tolerance "
           << trace_tolerance_;
        throw NumericalError(os.str());
    }

    Eigen::SelfAdjointEigenSolver<FockOperator> es(0.5 * (rho_ + rho_.adjoint()),
                                                   Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("DensityMatrix: eigensolver failed");
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-10) {
        std::ostringstream os;
        os << "DensityMatrix: min eigenvalue " << min_eig << " below -1e-10";
        throw NumericalError(os.str());
    }
}

FockOperator annihilation(int dim) {
    if (dim < 1) throw DomainError("annihilation: dim must be >= 1");
    FockOperator a = FockOperator::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

FockOperator creation(int dim) { return annihilation(dim).adjoint(); }

FockOperator number_operator(int dim) {
    if (dim < 1) throw DomainError("number_operator: dim must be >= 1");
    FockOperator n = FockOperator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = double(k);
    return n;
}

StateVector coherent_vector(Complex z, int dim, bool renormalize) {
    if (dim < 1) throw DomainError("coherent_vector: dim must be >= 1");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("coherent_vector: non-finite amplitude");

    StateVector v = StateVector::Zero(dim);
    const double r = std::abs(z);
    if (r == 0.0) {
        v(0) = 1.0;
        return v;
    }
    const double phase = std::arg(z);
    const double log_r = std::log(r);
    for (int n = 0; n < dim; ++n) {
        // ln|c_n| = -|z|^2/2 + n ln|z| - ln(n!)/2, phases accumulate as n*arg(z)
        const double log_mag = -0.5 * r * r + n * log_r - 0.5 * std::lgamma(double(n) + 1.0);
        if (log_mag > 700.0) throw OverflowError("coherent_vector: amplitude overflow");
        v(n) = std::polar(std::exp(log_mag), phase * n);
    }
    if (renormalize) {
        const double norm = v.norm();
        if (norm == 0.0) throw NumericalError("coherent_vector: truncated norm underflowed");
        v /= norm;
    }
    return v;
}

FockOperator matrix_exponential(const FockOperator& m) {
    require_square(m, "matrix_exponential");
    if (!m.allFinite()) throw DomainError("matrix_exponential: non-finite entries");
    return m.exp(); // scaling-and-squaring Pade, fine for non-normal inputs
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const FockOperator herm = 0.5 * (rho.matrix() + rho.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<FockOperator> es(herm, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        std::ostringstream os;
        os << "von_neumann_entropy: eigensolver failed on a " << rho.dim() << "x" << rho.dim()
           << " matrix, max |entry| = " << herm.cwiseAbs().maxCoeff();
        throw NumericalError(os.str());
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double lam = es.eigenvalues()(i);
        if (lam < -1e-10) {
            std::ostringstream os;
            os << "von_neumann_entropy: eigenvalue " << lam << " below -1e-10";
            throw NumericalError(os.str());
        }
        lam = std::min(std::max(lam, 0.0), 1.0);
        if (lam > 0.0) s -= lam * std::log(lam);
    }
    return std::max(s, 0.0);
}

Complex expectation(const DensityMatrix& rho, const FockOperator& obs) {
    require_square(obs, "expectation");
    if (rho.dim() != obs.rows()) {
        std::ostringstream os;
        os << "expectation: dimension mismatch " << rho.dim() << " vs " << obs.rows();
        throw ShapeError(os.str());
    }
    // Tr[rho * obs] = sum_{mn} rho(m,n) obs(n,m), without forming the product.
    return rho.matrix().cwiseProduct(obs.transpose()).sum();
}

double boundary_population(const FockOperator& rho) {
    require_square(rho, "boundary_population");
    const Eigen::Index d = rho.rows();
    double pop = std::abs(rho(d - 1, d - 1));
    if (d >= 2) pop = std::max(pop, std::abs(rho(d - 2, d - 2)));
    return pop;
}

} // namespace lasersim

#include "lasersim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lasersim {

namespace {

void validate_inputs(const LaserParams& p, double t, const char* who) {
    if (!std::isfinite(p.g) || !std::isfinite(p.kappa) || p.g < 0.0 || p.kappa < 0.0) {
        std::ostringstream os;
        os << who << ": rates must be finite and nonnegative (g=" << p.g
           << ", kappa=" << p.kappa << ")";
        throw DomainError(os.str());
    }
    if (!std::isfinite(t) || t < 0.0) {
        std::ostringstream os;
        os << who << ": time must be finite and nonnegative (t=" << t << ")";
        throw DomainError(os.str());
    }
}

bool degenerate_rates(double g, double kappa) {
    return std::abs(kappa - g) <= 1e-9 * std::max({kappa, g, 1.0});
}

// out = a s a+: shift toward the vacuum corner. O(dim^2).
FockOperator lower_sandwich(const FockOperator& s) {
    const Eigen::Index d = s.rows();
    FockOperator out = FockOperator::Zero(d, d);
    for (Eigen::Index m = 0; m + 1 < d; ++m)
        for (Eigen::Index n = 0; n + 1 < d; ++n)
            out(m, n) = std::sqrt(double((m + 1) * (n + 1))) * s(m + 1, n + 1);
    return out;
}

// out = a+ s a: shift away from the vacuum corner. O(dim^2).
FockOperator raise_sandwich(const FockOperator& s) {
    const Eigen::Index d = s.rows();
    FockOperator out = FockOperator::Zero(d, d);
    for (Eigen::Index m = 1; m < d; ++m)
        for (Eigen::Index n = 1; n < d; ++n)
            out(m, n) = std::sqrt(double(m * n)) * s(m - 1, n - 1);
    return out;
}

} // namespace

ChannelCoefficients coefficients(const LaserParams& params, double t) {
    validate_inputs(params, t, "coefficients");
    ChannelCoefficients c;
    c.t = t;
    if (t == 0.0) return c; // (0, 1, 1)
    const double g = params.g;
    const double kappa = params.kappa;
    if (degenerate_rates(g, kappa)) {
        const double denom = 1.0 + 2.0 * g * t;
        c.t1 = 2.0 * t / denom;
        c.t2 = 1.0 / denom;
        c.t3 = c.t2;
    } else if (kappa > g) {
        const double d = kappa - g;
        const double denom = kappa - g * std::exp(-2.0 * d * t);
        c.t1 = -std::expm1(-2.0 * d * t) / denom;
        c.t2 = d * std::exp(-d * t) / denom;
        c.t3 = d / denom;
    } else {
        // Gain-dominated: rewrite with the decaying exponential so nothing
        // overflows at large t.
        const double e = g - kappa;
        const double v = std::exp(-2.0 * e * t);
        const double denom = g - kappa * v;
        c.t1 = -std::expm1(-2.0 * e * t) / denom;
        c.t2 = e * std::exp(-e * t) / denom;
        c.t3 = e * v / denom;
    }
    return c;
}

KrausSet::KrausSet(LaserParams params, double t, int dim, int i_max, int j_max)
    : params_(params), t_(t), dim_(dim), i_max_(i_max), j_max_(j_max),
      coeffs_(coefficients(params, t)) {
    if (dim_ < 1) throw DomainError("KrausSet: dim must be >= 1");
    if (i_max_ < 0 || i_max_ > dim_) throw DomainError("KrausSet: need 0 <= i_max <= dim");
    if (j_max_ < 0) throw DomainError("KrausSet: j_max must be >= 0");
    if (coeffs_.t2 <= 0.0 || coeffs_.t3 <= 0.0)
        throw NumericalError("KrausSet: channel coefficients underflowed to zero "
                             "(effectively infinite time); no finite operator family exists");
}

FockOperator KrausSet::op(int i, int j) const {
    if (i < 0 || i > i_max_ || j < 0 || j > j_max_)
        throw DomainError("KrausSet::op: index out of range");
    FockOperator m = FockOperator::Zero(dim_, dim_);
    const double xi = params_.kappa * coeffs_.t1;
    const double xj = params_.g * coeffs_.t1;
    if ((i > 0 && xi == 0.0) || (j > 0 && xj == 0.0)) return m;
    const double lt2 = std::log(coeffs_.t2);
    // ln of the squared scalar prefactor, kept in log space throughout.
    const double log_c2 = (i > 0 ? i * std::log(xi) : 0.0) + (j > 0 ? j * std::log(xj) : 0.0) +
                          std::log(coeffs_.t3) - std::lgamma(i + 1.0) - std::lgamma(j + 1.0) -
                          2.0 * j * lt2;
    for (int n = i; n < dim_; ++n) {
        const int row = n - i + j;
        if (row >= dim_) break; // the raising ladder left the truncated space
        const double log_entry = 0.5 * (log_c2 + std::lgamma(n + 1.0) -
                                        2.0 * std::lgamma(n - i + 1.0) +
                                        std::lgamma(n - i + j + 1.0)) +
                                 row * lt2;
        if (log_entry > 700.0) {
            std::ostringstream os;
            os << "KrausSet::op(" << i << ", " << j << "): entry overflows at n=" << n;
            throw OverflowError(os.str());
        }
        m(row, n) = std::exp(log_entry);
    }
    return m;
}

KrausSet kraus_set(const LaserParams& params, double t, int dim, int i_max, int j_max) {
    return KrausSet(params, t, dim, i_max, j_max);
}

KrausSet auto_kraus_set(const LaserParams& params, double t, int dim, double tol, int probe_dim) {
    if (dim < 2) throw DomainError("auto_kraus_set: dim must be >= 2");
    const int probe = probe_dim > 0 ? probe_dim : dim / 2;
    double last_defect = -1.0;
    for (int j_max = dim; j_max <= 4 * dim; j_max *= 2) {
        KrausSet ks(params, t, dim, dim, j_max);
        last_defect = completeness_defect(ks, probe);
        if (last_defect < tol) return ks;
    }
    std::ostringstream os;
    os << "auto_kraus_set: completeness defect " << last_defect << " still above " << tol
       << " at j_max=" << 4 * dim << " (g=" << params.g << ", kappa=" << params.kappa
       << ", t=" << t << ", dim=" << dim << "); increase dim";
    throw ConvergenceError(os.str());
}

double completeness_defect(const KrausSet& ks, int probe_dim) {
    if (probe_dim < 1 || probe_dim > ks.dim() / 2)
        throw DomainError("completeness_defect: need 1 <= probe_dim <= dim/2");
    // M+M is exactly diagonal for every family member, so the audit reduces
    // to scalar sums: <n| M+ M |n> = c_ij^2 n!/(n-i)! (n-i+j)!/(n-i)! t2^(2(n-i)),
    // zero whenever the ladder leaves the truncated space.
    const double xi = ks.params().kappa * ks.coeffs().t1;
    const double xj = ks.params().g * ks.coeffs().t1;
    const double lt2 = std::log(ks.coeffs().t2);
    const double lt3 = std::log(ks.coeffs().t3);
    double worst = 0.0;
    for (int n = 0; n < probe_dim; ++n) {
        double sum = 0.0;
        for (int i = 0; i <= std::min(ks.i_max(), n); ++i) {
            if (i > 0 && xi == 0.0) break;
            for (int j = 0; j <= ks.j_max(); ++j) {
                if (j > 0 && xj == 0.0) break;
                if (n - i + j >= ks.dim()) break;
                const double lg = (i > 0 ? i * std::log(xi) : 0.0) +
                                  (j > 0 ? j * std::log(xj) : 0.0) + lt3 -
                                  std::lgamma(i + 1.0) - std::lgamma(j + 1.0) +
                                  std::lgamma(n + 1.0) - 2.0 * std::lgamma(n - i + 1.0) +
                                  std::lgamma(n - i + j + 1.0) + 2.0 * (n - i) * lt2;
                sum += std::exp(lg);
            }
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

DensityMatrix apply_channel(const KrausSet& ks, const DensityMatrix& rho0) {
    const int dim = ks.dim();
    if (rho0.dim() != dim) {
        std::ostringstream os;
        os << "apply_channel: state dim " << rho0.dim() << " != set dim " << dim;
        throw ShapeError(os.str());
    }
    double tail = 0.0;
    for (Eigen::Index n = dim / 2; n < dim; ++n)
        tail = std::max(tail, std::abs(rho0.matrix()(n, n)));
    if (tail > 1e-10) {
        std::ostringstream os;
        os << "apply_channel: input population " << tail
           << " above level dim/2; enlarge dim for headroom";
        throw HeadroomError(os.str());
    }

    const double t2 = ks.coeffs().t2;
    const double xi = ks.params().kappa * ks.coeffs().t1;
    const double xj = ks.params().g * ks.coeffs().t1;

    // Factored evaluation of sum_ij M rho M+ without materializing any M.
    // With sigma_00 = t2^N rho t2^N, the recursions
    //   sigma_i0 = xi/(i t2^2) * a sigma_(i-1)0 a+
    //   sigma_ij = xj/j       * a+ sigma_i(j-1) a
    // make every sigma_ij equal M_ij rho M_ij+ / t3, so intermediates stay
    // bounded by 1/t3 and nothing overflows.
    Eigen::VectorXd weights(dim);
    for (int n = 0; n < dim; ++n) weights(n) = std::pow(t2, n);
    FockOperator base = weights.asDiagonal() * rho0.matrix() * weights.asDiagonal();
    FockOperator total = FockOperator::Zero(dim, dim);
    for (int i = 0; i <= ks.i_max(); ++i) {
        if (i > 0) {
            if (xi == 0.0 || i >= dim) break;
            base = (xi / (i * t2 * t2)) * lower_sandwich(base);
            if (base.isZero(0.0)) break;
        }
        FockOperator rung = base;
        total += rung;
        for (int j = 1; j <= ks.j_max(); ++j) {
            if (xj == 0.0 || j >= dim) break;
            rung = (xj / j) * raise_sandwich(rung);
            if (rung.isZero(0.0)) break;
            total += rung;
        }
    }
    return DensityMatrix(ks.coeffs().t3 * total, 1e-8);
}

DensityMatrix rho_coherent_closed(Complex z, const LaserParams& params, double t, int dim,
                                  ClosedPath path) {
    if (dim < 1) throw DomainError("rho_coherent_closed: dim must be >= 1");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("rho_coherent_closed: amplitude must be finite");
    const ChannelCoefficients c = coefficients(params, t);
    if (t == 0.0) {
        const StateVector v = coherent_vector(z, dim, true);
        return DensityMatrix(v * v.adjoint());
    }
    if (params.g == 0.0) {
        // Pure loss: the state stays the (shrinking) coherent state; the
        // general formula's logarithm is singular here but the limit is exact.
        const StateVector v = coherent_vector(z * std::exp(-params.kappa * t), dim, true);
        return DensityMatrix(v * v.adjoint());
    }

    const double x = params.g * c.t1; // geometric population ratio, in (0,1)
    const FockOperator a = annihilation(dim);
    const FockOperator ad = creation(dim);
    if (path == ClosedPath::triple) {
        const double scalar = c.t3 * std::exp(params.kappa * c.t1 * std::norm(z) - std::norm(z));
        Eigen::VectorXcd mid(dim);
        for (int n = 0; n < dim; ++n) mid(n) = std::pow(x, double(n));
        const FockOperator left = matrix_exponential(z * c.t2 * ad);
        const FockOperator right = matrix_exponential(std::conj(z) * c.t2 * a);
        return DensityMatrix(scalar * (left * (mid.asDiagonal() * right)));
    }
    // Single-exponential form: the displacement folds into the thermal
    // generator with amplitude scale e^{(g-kappa)t}.
    const double lx = std::log(x);
    const double disp = std::exp((params.g - params.kappa) * t);
    const FockOperator gen = lx * (number_operator(dim) - disp * (z * ad + std::conj(z) * a));
    const double pref = c.t3 * std::exp(std::norm(z) * disp * disp * lx);
    return DensityMatrix(pref * matrix_exponential(gen));
}

} // namespace lasersim

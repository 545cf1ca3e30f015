#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lasersim/fock.hpp"

using namespace lasersim;

namespace {

double maxdev(const FockOperator& a, const FockOperator& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Seeded complex Gaussian matrix, used by the exponential/entropy property tests.
FockOperator random_matrix(int dim, std::mt19937& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    FockOperator m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = Complex(nd(rng), nd(rng));
    return m;
}

} // namespace

TEST_CASE("ladder operators have square-root entries and truncated commutator") {
    FockOperator a2 = annihilation(2);
    CHECK(a2(0, 1) == Complex(1.0));
    CHECK(a2(0, 0) == Complex(0.0));
    CHECK(a2(1, 0) == Complex(0.0));
    CHECK(a2(1, 1) == Complex(0.0));

    CHECK(annihilation(3)(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(maxdev(creation(5), annihilation(5).adjoint()) == 0.0);

    // a a+ - a+ a is the identity except at the top level, where the missing
    // |dim><dim| column turns the diagonal entry into -(dim-1). The products
    // rebuild integers as sqrt(m)*sqrt(m), so allow a couple of ulps.
    FockOperator comm = annihilation(4) * creation(4) - creation(4) * annihilation(4);
    CHECK(maxdev(comm.topLeftCorner(3, 3), FockOperator::Identity(3, 3)) < 3e-15);
    CHECK(comm(3, 3).real() == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(comm(3, 3).imag() == 0.0);

    FockOperator n = number_operator(6);
    for (int k = 0; k < 6; ++k) CHECK(n(k, k) == Complex(double(k)));
    CHECK(maxdev(n, creation(6) * annihilation(6)) < 3e-15);

    CHECK_THROWS_AS(annihilation(0), DomainError);
    CHECK_THROWS_AS(number_operator(-1), DomainError);
}

TEST_CASE("coherent amplitudes: vacuum, first levels, truncated norm") {
    StateVector vac = coherent_vector(0.0, 4);
    CHECK(vac(0) == Complex(1.0));
    CHECK(vac.tail(3).cwiseAbs().maxCoeff() == 0.0);

    StateVector v = coherent_vector(1.0, 2);
    CHECK(v(0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(v(1).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

    // Mean-16 Poisson weights: the tail beyond level 63 is negligible, and the
    // truncated norm must reproduce the independently summed partial mass.
    StateVector w = coherent_vector(4.0, 64);
    double poisson_sum = 0.0;
    for (int n = 0; n < 64; ++n)
        poisson_sum += std::exp(-16.0 + n * std::log(16.0) - std::lgamma(n + 1.0));
    CHECK(w.squaredNorm() == doctest::Approx(poisson_sum).epsilon(1e-13));
    CHECK(w.squaredNorm() >= 1.0 - 1e-10);

    StateVector r = coherent_vector(Complex(1.0, 2.0), 32, true);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // Renormalization preserves the ladder-ratio structure c_{n+1}/c_n = z/sqrt(n+1).
    CHECK(std::abs(r(1) / r(0) - Complex(1.0, 2.0)) < 1e-12);
    CHECK(std::abs(r(2) / r(1) - Complex(1.0, 2.0) / std::sqrt(2.0)) < 1e-12);

    CHECK_THROWS_AS(coherent_vector(1.0, 0), DomainError);
    CHECK_THROWS_AS(coherent_vector(Complex(std::nan(""), 0.0), 4), DomainError);
}

TEST_CASE("matrix exponential: closed cases and inverse property") {
    CHECK(maxdev(matrix_exponential(FockOperator::Zero(3, 3)), FockOperator::Identity(3, 3)) ==
          0.0);

    FockOperator d = FockOperator::Zero(2, 2);
    d(0, 0) = std::log(2.0);
    d(1, 1) = std::log(3.0);
    FockOperator ed = matrix_exponential(d);
    CHECK(ed(0, 0).real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ed(1, 1).real() == doctest::Approx(3.0).epsilon(1e-14));

    FockOperator nil = FockOperator::Zero(2, 2);
    nil(0, 1) = 1.0;
    FockOperator en = matrix_exponential(nil);
    CHECK(en(0, 0) == Complex(1.0));
    CHECK(en(0, 1) == Complex(1.0));
    CHECK(en(1, 0) == Complex(0.0));
    CHECK(en(1, 1) == Complex(1.0));

    CHECK_THROWS_AS(matrix_exponential(FockOperator::Zero(2, 3)), ShapeError);

    // exp(M) exp(-M) = I for non-normal inputs with norm up to 10.
    std::mt19937 rng(9001u);
    std::uniform_real_distribution<double> scale(0.5, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        FockOperator m = random_matrix(6, rng);
        m *= scale(rng) / m.norm();
        FockOperator prod = matrix_exponential(m) * matrix_exponential(-m);
        worst = std::max(worst, maxdev(prod, FockOperator::Identity(6, 6)));
    }
    CHECK(worst < 1e-10); // measured 1.8e-15
}

TEST_CASE("density matrix validation rejects broken inputs") {
    FockOperator ok = FockOperator::Zero(2, 2);
    ok(0, 0) = 0.5;
    ok(1, 1) = 0.5;
    CHECK_NOTHROW(DensityMatrix{ok});

    FockOperator skew = ok;
    skew(0, 1) = Complex(0.0, 1e-3); // missing conjugate partner
    CHECK_THROWS_AS(DensityMatrix{skew}, NumericalError);

    FockOperator off = ok * 1.5; // trace 1.5
    CHECK_THROWS_AS(DensityMatrix{off}, NumericalError);
    CHECK_NOTHROW(DensityMatrix(off, 0.6)); // wide tolerance admits it

    FockOperator neg = ok;
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5; // eigenvalue well below the -1e-10 noise floor
    CHECK_THROWS_AS(DensityMatrix{neg}, NumericalError);

    CHECK_THROWS_AS(DensityMatrix{FockOperator::Zero(2, 3)}, ShapeError);
    CHECK_THROWS_AS(DensityMatrix(ok, -1.0), DomainError);
}

TEST_CASE("entropy: pure, uniform, geometric populations, unitary invariance") {
    FockOperator pure = FockOperator::Zero(4, 4);
    pure(0, 0) = 1.0;
    CHECK(von_neumann_entropy(DensityMatrix{pure}) == 0.0);

    FockOperator half = FockOperator::Zero(2, 2);
    half(0, 0) = 0.5;
    half(1, 1) = 0.5;
    CHECK(von_neumann_entropy(DensityMatrix{half}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));

    // Geometric populations with mean occupancy 2: p_n = (1/3)(2/3)^n. The
    // eigenvalues are the populations themselves, so the entropy must match
    // both the directly summed -sum p ln p and its closed value 3ln3 - 2ln2.
    const int dim = 200;
    FockOperator th = FockOperator::Zero(dim, dim);
    double partial = 0.0;
    for (int n = 0; n < dim; ++n) {
        const double p = std::pow(2.0 / 3.0, n) / 3.0;
        th(n, n) = p;
        partial -= p * std::log(p);
    }
    const double s = von_neumann_entropy(DensityMatrix{th});
    CHECK(s == doctest::Approx(partial).epsilon(1e-12));
    CHECK(s == doctest::Approx(3.0 * std::log(3.0) - 2.0 * std::log(2.0)).epsilon(1e-8));

    // Conjugation by exp(iH) permutes nothing spectrally.
    std::mt19937 rng(42u);
    FockOperator rho = FockOperator::Zero(8, 8);
    for (int n = 0; n < 8; ++n) rho(n, n) = std::pow(0.5, n + 1);
    rho(7, 7) += std::pow(0.5, 8); // close the geometric tail so the trace is 1
    const double s0 = von_neumann_entropy(DensityMatrix{rho});
    for (int k = 0; k < 5; ++k) {
        FockOperator h = random_matrix(8, rng);
        h = 0.5 * (h + h.adjoint().eval());
        FockOperator u = matrix_exponential(Complex(0.0, 1.0) * h);
        const double s1 = von_neumann_entropy(DensityMatrix(u * rho * u.adjoint(), 1e-6));
        CHECK(std::abs(s1 - s0) < 1e-9); // measured 1.1e-15
    }
}

TEST_CASE("expectation values and linearity") {
    const int dim = 64;
    FockOperator vac = FockOperator::Zero(4, 4);
    vac(0, 0) = 1.0;
    CHECK(expectation(DensityMatrix{vac}, number_operator(4)) == Complex(0.0));

    StateVector z2 = coherent_vector(2.0, dim, true);
    DensityMatrix rho(z2 * z2.adjoint());
    Complex n = expectation(rho, number_operator(dim));
    CHECK(n.real() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(std::abs(n.imag()) < 1e-10);

    FockOperator mix = FockOperator::Zero(5, 5);
    mix(0, 0) = 0.5;
    mix(1, 1) = 0.5;
    CHECK(expectation(DensityMatrix{mix}, number_operator(5)) == Complex(0.5));

    CHECK_THROWS_AS(expectation(rho, number_operator(8)), ShapeError);

    std::mt19937 rng(7u);
    FockOperator a = random_matrix(dim, rng);
    FockOperator b = random_matrix(dim, rng);
    Complex lhs = expectation(rho, a + 2.0 * b);
    Complex rhs = expectation(rho, a) + 2.0 * expectation(rho, b);
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
}

TEST_CASE("boundary population reads the top two levels") {
    FockOperator rho = FockOperator::Zero(4, 4);
    rho(0, 0) = 0.7;
    rho(2, 2) = 0.2;
    rho(3, 3) = 0.1;
    CHECK(boundary_population(rho) == 0.2);
    rho(2, 2) = 0.05;
    CHECK(boundary_population(rho) == 0.1);
}

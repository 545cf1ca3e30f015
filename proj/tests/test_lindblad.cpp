#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lasersim/lindblad.hpp"
#include "lasersim/observables.hpp"

using namespace lasersim;

namespace {

double maxdev(const FockOperator& a, const FockOperator& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

DensityMatrix coherent_projector(Complex z, int dim) {
    StateVector v = coherent_vector(z, dim, true);
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix thermal_state(double nbar, int dim) {
    FockOperator rho = FockOperator::Zero(dim, dim);
    const double x = nbar / (nbar + 1.0);
    for (int n = 0; n < dim; ++n) rho(n, n) = std::pow(x, n) / (nbar + 1.0);
    rho /= rho.trace().real(); // close the truncated tail
    return DensityMatrix(rho);
}

} // namespace

TEST_CASE("generator: fixed point, vacuum pumping, rate equation, zero trace") {
    const int dim = 8;
    FockOperator vac = FockOperator::Zero(dim, dim);
    vac(0, 0) = 1.0;

    // Pure loss holds the vacuum still.
    CHECK(liouvillian_apply(DensityMatrix(vac), {0.0, 1.0}).cwiseAbs().maxCoeff() == 0.0);

    // Pure gain pumps one quantum out of it: 2g (|1><1| - |0><0|).
    FockOperator got = liouvillian_apply(DensityMatrix(vac), {1.0, 0.0});
    FockOperator want = FockOperator::Zero(dim, dim);
    want(0, 0) = -2.0;
    want(1, 1) = 2.0;
    CHECK(maxdev(got, want) == 0.0);

    // d<n>/dt on a diagonal state follows 2g(<n>+1) - 2kappa<n>.
    const int dt_dim = 48;
    DensityMatrix th = thermal_state(1.0, dt_dim);
    FockOperator deriv = liouvillian_apply(th, {0.7, 1.2});
    double dn = 0.0, n_now = 0.0;
    for (int n = 0; n < dt_dim; ++n) {
        dn += n * deriv(n, n).real();
        n_now += n * th.matrix()(n, n).real();
    }
    CHECK(dn == doctest::Approx(2.0 * 0.7 * (n_now + 1.0) - 2.0 * 1.2 * n_now).epsilon(1e-10));

    // The truncated products are arranged so the trace vanishes identically;
    // what is left is the roundoff of summing the already-rounded diagonal.
    DensityMatrix busy = coherent_projector(Complex(1.0, 0.5), dim);
    CHECK(std::abs(liouvillian_apply(busy, {0.8, 1.1}).trace()) < 1e-13);

    CHECK_THROWS_AS(liouvillian_apply(th, {-1.0, 1.0}), DomainError);
}

TEST_CASE("integration: known solutions and trace transport") {
    const int dim = 32;
    DensityMatrix rho0 = coherent_projector(1.0, dim);

    DensityMatrix still = evolve(rho0, {1.0, 1.0}, 0.0);
    CHECK(maxdev(still.matrix(), rho0.matrix()) == 0.0);

    // Pure loss keeps a coherent state coherent with shrinking amplitude.
    DensityMatrix damped = evolve(rho0, {0.0, 1.0}, 0.5);
    CHECK(maxdev(damped.matrix(), coherent_projector(std::exp(-0.5), dim).matrix()) < 1e-8);
    CHECK(std::abs(damped.matrix().trace() - Complex(1.0)) < 1e-9);

    // Photon number against the closed-form law in a mixed regime.
    const int dm = 64;
    DensityMatrix evolved = evolve(coherent_projector(2.0, dm), {0.5, 1.0}, 0.4);
    CHECK(expectation(evolved, number_operator(dm)).real() ==
          doctest::Approx(mean_photon_closed(2.0, {0.5, 1.0}, 0.4)).epsilon(1e-7));
    CHECK(std::abs(evolved.matrix().trace() - Complex(1.0)) < 1e-9);
}

TEST_CASE("grid evolution matches single-shot stepping") {
    const int dim = 32;
    DensityMatrix rho0 = coherent_projector(1.0, dim);
    auto series = evolve_series(rho0, {1.0, 1.0}, {0.0, 0.1, 0.2, 0.4});
    REQUIRE(series.size() == 4);
    CHECK(maxdev(series.front().matrix(), rho0.matrix()) == 0.0);
    // Same step size, same arithmetic: segmenting must not change the result.
    CHECK(maxdev(series.back().matrix(), evolve(rho0, {1.0, 1.0}, 0.4).matrix()) < 1e-14);
}

TEST_CASE("step halving converges at fourth order") {
    const int dim = 32;
    DensityMatrix rho0 = coherent_projector(1.0, dim);
    IntegrationConfig c1{2e-3, 1e-8}, c2{1e-3, 1e-8}, c3{5e-4, 1e-8};
    FockOperator r1 = evolve(rho0, {1.0, 1.0}, 0.3, c1).matrix();
    FockOperator r2 = evolve(rho0, {1.0, 1.0}, 0.3, c2).matrix();
    FockOperator r3 = evolve(rho0, {1.0, 1.0}, 0.3, c3).matrix();
    const double d12 = maxdev(r1, r2);
    const double d23 = maxdev(r2, r3);
    CHECK(d23 < 1e-8);
    CHECK(d12 / d23 > 10.0); // measured 16.1, the h^4 signature
    CHECK(d12 / d23 < 24.0);
}

TEST_CASE("configuration and grid validation") {
    const int dim = 16;
    DensityMatrix rho0 = coherent_projector(1.0, dim);
    CHECK_THROWS_AS(evolve_series(rho0, {1.0, 1.0}, {}), DomainError);
    CHECK_THROWS_AS(evolve(rho0, {1.0, 1.0}, -0.5), DomainError);
    CHECK_THROWS_AS(evolve_series(rho0, {1.0, 1.0}, {0.2, 0.1}), DomainError);
    CHECK_THROWS_AS(evolve(rho0, {1.0, 1.0}, 0.1, IntegrationConfig{-1e-3, 1e-8}),
                    DomainError);
    CHECK_THROWS_AS(evolve(rho0, {1.0, 1.0}, 0.1, IntegrationConfig{0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(evolve(rho0, {1.0, 1.0}, 0.1, IntegrationConfig{0.0, 1.0}), DomainError);
}

TEST_CASE("boundary leakage stops the run with a step report") {
    // Pure gain from |z=2> in a 12-level space blows through the top well
    // before t=1.
    DensityMatrix rho0 = coherent_projector(2.0, 12);
    try {
        evolve(rho0, {1.0, 0.0}, 1.0);
        FAIL("expected HeadroomError");
    } catch (const HeadroomError& e) {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
        CHECK(std::string(e.what()).find("enlarge dim") != std::string::npos);
    }
}

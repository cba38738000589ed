#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "opmeans/spectral.hpp"

using namespace opmeans;

namespace {

double max_entry_diff(const HermitianMatrix& x, const HermitianMatrix& y) {
    return (x - y).mat().max_abs_entry();
}

}  // namespace

TEST_CASE("apply on diagonal matrices is entrywise") {
    HermitianMatrix D = HermitianMatrix::diagonal({1.0, 4.0, 9.0});
    HermitianMatrix R = apply(ScalarFunctionSpec::power(0.5), D);
    CHECK(max_entry_diff(R, HermitianMatrix::diagonal({1.0, 2.0, 3.0})) <= 1e-13);

    HermitianMatrix L = apply(ScalarFunctionSpec::logshift(),
                              HermitianMatrix::diagonal({std::exp(1.0) - 1.0}));
    CHECK(L.entry(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("apply commutes with unitary conjugation") {
    for (int rep = 0; rep < 30; ++rep) {
        HermitianMatrix A = random_pd(4, -1.0, 1.0, derive_seed(3, {static_cast<std::uint64_t>(rep)}));
        Rng rng(derive_seed(4, {static_cast<std::uint64_t>(rep)}));
        CMatrix U = random_unitary(4, rng);
        ScalarFunctionSpec f = ScalarFunctionSpec::power(0.3);
        HermitianMatrix lhs = apply(f, HermitianMatrix::symmetrized(U * A.mat() * U.adjoint()));
        HermitianMatrix rhs =
            HermitianMatrix::symmetrized(U * apply(f, A).mat() * U.adjoint());
        CHECK(max_entry_diff(lhs, rhs) <= 1e-10 * (1.0 + opnorm(A)));
    }
}

TEST_CASE("fractional powers form a semigroup") {
    HermitianMatrix A = random_pd(4, -1.0, 1.0, 17);
    HermitianMatrix twice = apply(ScalarFunctionSpec::power(0.5),
                                  apply(ScalarFunctionSpec::power(0.5), A));
    CHECK(max_entry_diff(twice, apply(ScalarFunctionSpec::power(0.25), A)) <= 1e-11);

    CHECK(max_entry_diff(sqrt_pd(A), apply(ScalarFunctionSpec::power(0.5), A)) <= 1e-12);
    CHECK(max_entry_diff(conjugate(sqrt_pd(A), HermitianMatrix::identity(4)), A) <= 1e-11);
    CHECK(max_entry_diff(conjugate(inv_sqrt_pd(A), A), HermitianMatrix::identity(4)) <= 1e-11);
    CHECK(max_entry_diff(power_pd(A, -1.0), inverse(A)) <= 1e-11);
}

TEST_CASE("apply enforces scalar domains") {
    HermitianMatrix singular = HermitianMatrix::diagonal({0.0, 1.0});
    // closed boundary at 0: x^alpha with alpha >= 0 is defined
    CHECK_NOTHROW(apply(ScalarFunctionSpec::power(0.5), singular));
    // open boundary at 0: negative powers reject singular operands
    CHECK_THROWS_AS(apply(ScalarFunctionSpec::power(-0.5), singular), DomainError);
    // logshift is defined down to (-1, inf)
    CHECK_NOTHROW(apply(ScalarFunctionSpec::logshift(), HermitianMatrix::diagonal({-0.5, 2.0})));
    CHECK_THROWS_AS(apply(ScalarFunctionSpec::logshift(), HermitianMatrix::diagonal({-2.0, 2.0})),
                    DomainError);
    // roundoff-level undershoot of a closed boundary is snapped onto it
    CHECK_NOTHROW(apply(ScalarFunctionSpec::power(0.5), HermitianMatrix::diagonal({-1e-15, 1.0})));
}

TEST_CASE("power_pd requires positive definiteness") {
    CHECK_THROWS_AS(power_pd(HermitianMatrix::diagonal({0.0, 1.0}), 0.5), DomainError);
    CHECK_THROWS_AS(sqrt_pd(HermitianMatrix::diagonal({-1.0, 1.0})), DomainError);
}

TEST_CASE("spectral mapping preserves eigenvectors") {
    HermitianMatrix A = random_pd(5, -1.0, 1.0, 23);
    SpectralDecomposition d = eigh(A);
    HermitianMatrix R = apply(ScalarFunctionSpec::power(2.0), A);
    SpectralDecomposition dr = eigh(R);
    for (int i = 0; i < 5; ++i)
        CHECK(dr.eigenvalues[i] ==
              doctest::Approx(d.eigenvalues[i] * d.eigenvalues[i]).epsilon(1e-10));
}

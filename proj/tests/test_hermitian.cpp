#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "opmeans/hermitian.hpp"

using namespace opmeans;

namespace {

HermitianMatrix H2(double a, double b, double c, double d) {
    return HermitianMatrix(2, {a, b, c, d});
}

double max_entry_diff(const HermitianMatrix& x, const HermitianMatrix& y) {
    return (x - y).mat().max_abs_entry();
}

}  // namespace

TEST_CASE("eigh on a 2x2 symmetric example") {
    SpectralDecomposition d = eigh(H2(2, 1, 1, 2));
    REQUIRE(d.eigenvalues.size() == 2);
    CHECK(d.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("eigh on a complex Hermitian matrix") {
    CMatrix m(2);
    m(0, 0) = cx(2, 0);
    m(0, 1) = cx(0, -1);
    m(1, 0) = cx(0, 1);
    m(1, 1) = cx(2, 0);
    SpectralDecomposition d = eigh(HermitianMatrix(m));
    CHECK(d.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("eigh reconstructs random matrices with unitary eigenvectors") {
    int count = 0;
    for (int dim = 1; dim <= 16; ++dim) {
        for (int rep = 0; rep < 63; ++rep) {
            ++count;
            HermitianMatrix A = random_pd(dim, -2.0, 2.0,
                                          derive_seed(42, {static_cast<std::uint64_t>(dim),
                                                           static_cast<std::uint64_t>(rep)}));
            SpectralDecomposition d = eigh(A);
            // ascending order
            for (size_t i = 1; i < d.eigenvalues.size(); ++i)
                REQUIRE(d.eigenvalues[i] >= d.eigenvalues[i - 1]);
            // Q diag(lambda) Q* == A
            HermitianMatrix R(d.reassemble(d.eigenvalues));
            REQUIRE(max_entry_diff(A, R) <= 1e-11 * (1.0 + opnorm(A)));
            // Q* Q == I
            CMatrix QQ = d.eigenvectors.adjoint() * d.eigenvectors;
            REQUIRE((QQ - CMatrix::identity(dim)).max_abs_entry() <= 1e-12);
        }
    }
    CHECK(count == 16 * 63);  // 1008 reconstructions
}

TEST_CASE("loewner_compare verdicts") {
    HermitianMatrix I = HermitianMatrix::identity(2);
    CHECK(loewner_compare(I, 2.0 * I).verdict == OrderVerdict::LEQ);
    CHECK(loewner_compare(2.0 * I, I).verdict == OrderVerdict::GEQ);
    CHECK(loewner_compare(I, I).verdict == OrderVerdict::EQUAL);
    // indefinite difference
    CHECK(loewner_compare(HermitianMatrix::diagonal({1.0, 2.0}),
                          HermitianMatrix::diagonal({2.0, 1.0}))
              .verdict == OrderVerdict::INCOMPARABLE);
}

TEST_CASE("loewner_compare transitivity on a constructed chain") {
    for (int rep = 0; rep < 50; ++rep) {
        HermitianMatrix A = random_pd(3, -1.0, 1.0, derive_seed(7, {static_cast<std::uint64_t>(rep), 0}));
        HermitianMatrix P = random_psd_singular(3, 2, derive_seed(7, {static_cast<std::uint64_t>(rep), 1}));
        HermitianMatrix Q = random_psd_singular(3, 1, derive_seed(7, {static_cast<std::uint64_t>(rep), 2}));
        HermitianMatrix B = A + P;
        HermitianMatrix C = B + Q;
        REQUIRE(loewner_compare(A, B).verdict != OrderVerdict::GEQ);
        REQUIRE(loewner_compare(B, C).verdict != OrderVerdict::GEQ);
        REQUIRE(loewner_compare(A, C).verdict != OrderVerdict::GEQ);
    }
}

TEST_CASE("is_pd and is_psd") {
    CHECK(is_pd(HermitianMatrix::identity(3)));
    CHECK_FALSE(is_pd(H2(1, 1, 1, 1)));  // singular
    CHECK(is_psd(H2(1, 1, 1, 1)));
    CHECK_FALSE(is_psd(H2(3, 1, 1, 0)));  // det = -1
    CHECK_FALSE(is_pd(HermitianMatrix::zero(2)));
    CHECK(is_psd(HermitianMatrix::zero(2)));
}

TEST_CASE("inverse of a 2x2 example") {
    HermitianMatrix inv = inverse(H2(2, 1, 1, 2));
    HermitianMatrix expect = (1.0 / 3.0) * H2(2, -1, -1, 2);
    CHECK(max_entry_diff(inv, expect) <= 1e-14);
    CHECK_THROWS_AS(inverse(H2(1, 1, 1, 1)), DomainError);
}

TEST_CASE("inverse is an involution on random PD matrices") {
    for (int rep = 0; rep < 100; ++rep) {
        HermitianMatrix A = random_pd(4, -1.0, 1.0, derive_seed(11, {static_cast<std::uint64_t>(rep)}));
        CHECK(max_entry_diff(inverse(inverse(A)), A) <= 1e-10 * (1.0 + opnorm(A)));
    }
}

TEST_CASE("congruence by C and C^-1 recovers the original") {
    for (int rep = 0; rep < 50; ++rep) {
        HermitianMatrix A = random_pd(3, -1.0, 1.0, derive_seed(13, {static_cast<std::uint64_t>(rep), 0}));
        HermitianMatrix C = random_pd(3, -1.0, 1.0, derive_seed(13, {static_cast<std::uint64_t>(rep), 1}));
        HermitianMatrix back = conjugate(inverse(C), conjugate(C, A));
        CHECK(max_entry_diff(back, A) <= 1e-8 * (1.0 + opnorm(A)));
    }
}

TEST_CASE("random_pd is deterministic and respects its spectrum range") {
    HermitianMatrix A = random_pd(5, -1.0, 1.0, 99);
    HermitianMatrix B = random_pd(5, -1.0, 1.0, 99);
    CHECK(max_entry_diff(A, B) == 0.0);  // bit-identical
    SpectralDecomposition d = eigh(A);
    CHECK(d.eigenvalues.front() >= 0.1 * (1.0 - 1e-9));
    CHECK(d.eigenvalues.back() <= 10.0 * (1.0 + 1e-9));
}

TEST_CASE("random_psd_singular has the requested rank") {
    HermitianMatrix P = random_psd_singular(4, 2, 5);
    SpectralDecomposition d = eigh(P);
    CHECK(std::abs(d.eigenvalues[0]) <= 1e-12);
    CHECK(std::abs(d.eigenvalues[1]) <= 1e-12);
    CHECK(d.eigenvalues[2] > 1e-6);
    CHECK(d.eigenvalues[3] > 1e-6);
    CHECK(random_psd_singular(3, 0, 1).frobenius() == 0.0);
    CHECK_THROWS_AS(random_psd_singular(3, 3, 1), DomainError);
}

TEST_CASE("random_unitary columns are orthonormal") {
    Rng rng(4);
    CMatrix U = random_unitary(6, rng);
    CHECK((U.adjoint() * U - CMatrix::identity(6)).max_abs_entry() <= 1e-12);
}

TEST_CASE("hermitian construction rejects non-hermitian input") {
    CMatrix m(2);
    m(0, 1) = cx(1, 0);
    m(1, 0) = cx(0.5, 0);
    CHECK_THROWS_AS(HermitianMatrix{m}, DomainError);
    CHECK_NOTHROW(HermitianMatrix::symmetrized(m));
}

TEST_CASE("matrix JSON round trip") {
    HermitianMatrix A = random_pd(3, -1.0, 1.0, 21);
    HermitianMatrix back = matrix_from_json_text(matrix_to_json(A));
    CHECK(max_entry_diff(A, back) == 0.0);  // 17 significant digits are lossless

    HermitianMatrix real = matrix_from_json_text(R"({"dim":2,"re":[[2,1],[1,2]]})");
    CHECK(max_entry_diff(real, H2(2, 1, 1, 2)) == 0.0);
    CHECK_THROWS_AS(matrix_from_json_text("{"), ParseError);
    CHECK_THROWS_AS(matrix_from_json_text(R"({"dim":2,"re":[[1,0]]})"), ParseError);
}

TEST_CASE("opnorm is the largest absolute eigenvalue") {
    CHECK(opnorm(HermitianMatrix::diagonal({-3.0, 2.0})) == doctest::Approx(3.0));
}

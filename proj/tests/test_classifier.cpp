#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "opmeans/classifier.hpp"

using namespace opmeans;

namespace {

ClassifierConfig small_cfg() {
    ClassifierConfig cfg;
    cfg.dims = {2, 3};
    cfg.trials_per_dim = 400;
    cfg.seed = 2024;
    return cfg;
}

}  // namespace

TEST_CASE("loewner_matrix of the identity function is all ones") {
    HermitianMatrix L = loewner_matrix(ScalarFunctionSpec::power(1.0), {1.0, 2.0, 3.0});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(L.entry(i, j).real() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("loewner_matrix of x^2 at (1,2,3) is [x_i + x_j] with min eig 6 - sqrt(42)") {
    HermitianMatrix L = loewner_matrix(ScalarFunctionSpec::power(2.0), {1.0, 2.0, 3.0});
    double expect[3][3] = {{2, 3, 4}, {3, 4, 5}, {4, 5, 6}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(L.entry(i, j).real() == doctest::Approx(expect[i][j]).epsilon(1e-7));
    SpectralDecomposition d = eigh(L);
    CHECK(d.eigenvalues.front() == doctest::Approx(6.0 - std::sqrt(42.0)).epsilon(1e-6));
    CHECK(d.eigenvalues.front() < -0.1);  // a genuine operator-monotonicity certificate
}

TEST_CASE("loewner_matrix of sqrt is PSD") {
    HermitianMatrix L = loewner_matrix(ScalarFunctionSpec::power(0.5), {1.0, 4.0});
    CHECK(L.entry(0, 0).real() == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(L.entry(0, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(L.entry(1, 1).real() == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(eigh(L).eigenvalues.front() >= 0.0);
}

TEST_CASE("loewner_matrix input validation") {
    CHECK_THROWS_AS(loewner_matrix(ScalarFunctionSpec::power(0.5), {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(loewner_matrix(ScalarFunctionSpec::power(0.5), {2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(loewner_matrix(ScalarFunctionSpec::power(0.5), {-1.0, 1.0}), DomainError);
}

TEST_CASE("test_inequality margins on hand examples") {
    HermitianMatrix A(2, {1, 1, 1, 1});
    HermitianMatrix B(2, {2, 1, 1, 1});
    // B - A = diag(1, 0) is PSD, but B^2 - A^2 = [[3,1],[1,0]] has det -1:
    // squaring does not preserve the Loewner order
    CHECK(loewner_compare(A, B).verdict == OrderVerdict::LEQ);
    double viol = test_inequality("monotone", ScalarFunctionSpec::power(2.0), A, B, 0.5, 1e-8);
    CHECK(viol < -0.01);
    // sqrt does preserve it
    CHECK(test_inequality("monotone", ScalarFunctionSpec::power(0.5), A + 0.01 * HermitianMatrix::identity(2),
                          B + 0.01 * HermitianMatrix::identity(2), 0.5, 1e-8) >= -1e-10);

    HermitianMatrix P = random_pd(3, -1.0, 1.0, 100);
    HermitianMatrix Q = random_pd(3, -1.0, 1.0, 101);
    for (const char* id : {"I2", "I3", "I4", "I5", "I6", "I7", "I8", "I9"})
        CHECK(test_inequality(id, ScalarFunctionSpec::power(0.5), P, Q, 0.3, 1e-8) >= -1e-9);
    for (const char* id : {"D2", "D3", "D4", "D5", "D6", "D7"})
        CHECK(test_inequality(id, ScalarFunctionSpec::power(-0.5), P, Q, 0.3, 1e-8) >= -1e-9);
    CHECK_THROWS_AS(test_inequality("I1", ScalarFunctionSpec::power(0.5), P, Q, 0.5, 1e-8),
                    DomainError);
}

TEST_CASE("classify positive controls") {
    ClassifierConfig cfg = small_cfg();
    CHECK(classify(ScalarFunctionSpec::power(0.5), cfg).label == ClassLabel::OmiConsistent);
    CHECK(classify(ScalarFunctionSpec::logshift(), cfg).label == ClassLabel::OmiConsistent);
    CHECK(classify(ScalarFunctionSpec::sym_rep(1.0 / 3.0), cfg).label == ClassLabel::OmiConsistent);
    CHECK(classify(ScalarFunctionSpec::power(-0.5), cfg).label == ClassLabel::OmdConsistent);
    CHECK(classify(ScalarFunctionSpec::power(-1.0), cfg).label == ClassLabel::OmdConsistent);
}

TEST_CASE("classify negative controls yield NEITHER with replayable certificates") {
    ClassifierConfig cfg;
    cfg.dims = {2, 3};
    cfg.trials_per_dim = 2000;
    for (double a : {2.0, -2.0}) {
        Verdict v = classify(ScalarFunctionSpec::power(a), cfg);
        CHECK(v.label == ClassLabel::Neither);
        REQUIRE(!v.certificates.empty());
        const CounterexampleRecord& rec = v.certificates.front();
        // mean-inequality certificates are matrix pairs at the search dims;
        // divided-difference certificates carry the point-grid-sized matrix
        if (rec.inequality_id.rfind("loewner", 0) != 0) CHECK(rec.A.dim() <= 3);
        double replayed = replay_violation(rec, cfg.tol_rel);
        CHECK(replayed == doctest::Approx(rec.violation).epsilon(1e-9));
        CHECK(replayed < -cfg.margin);
    }
}

TEST_CASE("classify on a custom black-box hook") {
    ScalarFunctionSpec f =
        ScalarFunctionSpec::custom("cube", [](double x) { return x * x * x; });
    ClassifierConfig cfg = small_cfg();
    Verdict v = classify(f, cfg);
    CHECK(v.label == ClassLabel::Neither);
}

TEST_CASE("find_counterexample") {
    ClassifierConfig cfg = small_cfg();
    auto hit = find_counterexample("monotone", ScalarFunctionSpec::power(2.0), cfg);
    REQUIRE(hit.has_value());
    CHECK(replay_violation(*hit, cfg.tol_rel) < -cfg.margin);

    ClassifierConfig tiny = small_cfg();
    tiny.trials_per_dim = 100;
    auto none = find_counterexample("I7", ScalarFunctionSpec::power(0.5), tiny);
    CHECK_FALSE(none.has_value());
}

TEST_CASE("verdict and record serialization") {
    ClassifierConfig cfg;
    cfg.dims = {2};
    cfg.trials_per_dim = 2000;
    Verdict v = classify(ScalarFunctionSpec::power(2.0), cfg);
    REQUIRE(!v.certificates.empty());
    std::string vj = verdict_to_json(v);
    CHECK(vj.find("\"label\": \"NEITHER\"") != std::string::npos);
    std::string rj = record_to_json(v.certificates.front());
    CHECK(rj.find("\"inequality_id\"") != std::string::npos);
    CHECK(rj.find("\"violation\"") != std::string::npos);
    CHECK(rj.find("\"seed_path\"") != std::string::npos);
}

TEST_CASE("classification is deterministic for a fixed seed") {
    ClassifierConfig cfg = small_cfg();
    Verdict a = classify(ScalarFunctionSpec::qapm_rep(0.5, 0.3), cfg);
    Verdict b = classify(ScalarFunctionSpec::qapm_rep(0.5, 0.3), cfg);
    CHECK(verdict_to_json(a) == verdict_to_json(b));
    CHECK(a.label == ClassLabel::OmiConsistent);
}

TEST_CASE("config validation") {
    ClassifierConfig cfg;
    cfg.dims = {};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = ClassifierConfig{};
    cfg.trials_per_dim = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = ClassifierConfig{};
    cfg.t_grid = {1.5};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

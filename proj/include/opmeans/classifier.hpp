#pragma once

// Numerical classification of scalar functions as operator monotone
// increasing / decreasing / neither, via mean-based inequality tests and the
// divided-difference (Loewner matrix) oracle, with replayable
// counterexample certificates.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opmeans/hermitian.hpp"
#include "opmeans/means.hpp"
#include "opmeans/scalar_functions.hpp"

namespace opmeans {

struct ClassifierConfig {
    std::vector<int> dims{2, 3, 5};
    int trials_per_dim = 2000;
    std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::uint64_t seed = 1;
    double tol_rel = 1e-8;
    int loewner_points = 6;
    double margin = 1e-7;  // 10 * tol_rel; separates strict evidence from roundoff

    void validate() const;
};

struct CounterexampleRecord {
    std::string inequality_id;
    std::string function_spec;  // textual spec, replayable via parse_function
    HermitianMatrix A;
    HermitianMatrix B;
    std::optional<HermitianMatrix> C;  // third operand for triple-based checks
    double t = 0.5;
    double violation = 0.0;  // normalized most-negative eigenvalue of the defect
    std::uint64_t seed_path = 0;
};

enum class ClassLabel { OmiConsistent, OmdConsistent, Neither, Inconclusive };

std::string to_string(ClassLabel label);

struct EvidenceItem {
    long trials = 0;
    long passes = 0;
    double worst_margin = 1e300;
    double best_margin = -1e300;
};

struct Verdict {
    ClassLabel label = ClassLabel::Inconclusive;
    std::vector<CounterexampleRecord> certificates;
    std::map<std::string, EvidenceItem> evidence;
    long domain_failures = 0;
};

// Fixed symmetric-mean grid used by the I8/I9/D6/D7 style items.
const std::vector<double>& symmetric_r_grid();

// Divided-difference matrix: (f(x_i)-f(x_j))/(x_i-x_j) off the diagonal,
// derivative(f, x_i) on it. Points must be strictly ascending and positive.
HermitianMatrix loewner_matrix(const ScalarFunctionSpec& f, const std::vector<double>& points);

// Signed normalized margin of one inequality at (A, B, t): the smallest
// eigenvalue of (RHS-LHS) for "<=" items, (LHS-RHS) for ">=" items, divided
// by max(1, ||LHS||_2, ||RHS||_2). Nonnegative up to -tol_rel means "holds".
// Supported ids: I2..I9, D2..D7, "monotone" (expects A <= B), "loewner" and
// "loewner-dec" (points taken from B's diagonal).
double test_inequality(const std::string& id, const ScalarFunctionSpec& f,
                       const HermitianMatrix& A, const HermitianMatrix& B, double t,
                       double tol_rel);

// Re-evaluates a record's inequality from its stored data.
double replay_violation(const CounterexampleRecord& rec, double tol_rel = 1e-8);

Verdict classify(const ScalarFunctionSpec& f, const ClassifierConfig& cfg);

std::optional<CounterexampleRecord> find_counterexample(const std::string& id,
                                                        const ScalarFunctionSpec& f,
                                                        const ClassifierConfig& cfg);

std::string verdict_to_json(const Verdict& v);
std::string record_to_json(const CounterexampleRecord& rec);

}  // namespace opmeans

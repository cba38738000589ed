#pragma once

// Batch verification of the mean axioms, the AM-GM-HM chain, the I/D
// characterization inequalities and the derived corollaries over randomized
// ensembles, with a deterministic structured JSON report.

#include <string>
#include <vector>

#include "opmeans/classifier.hpp"
#include "opmeans/means.hpp"

namespace opmeans {

struct VerifyConfig {
    std::vector<int> dims{2, 3, 5};
    int trials = 500;  // per (check, dim, parameter point)
    std::uint64_t seed = 1;
    double tol_rel = 1e-8;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct CheckResult {
    std::string check_id;
    std::string params;  // compact JSON text
    long trials = 0;
    long passes = 0;
    double worst_margin = 1e300;
    std::vector<CounterexampleRecord> counterexamples;
    double elapsed_s = 0.0;
    std::vector<std::string> notes;
};

struct VerificationReport {
    std::string version;
    std::uint64_t seed = 0;
    double tol_rel = 0.0;
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;

    bool all_positive_controls_pass() const;
};

// means exercised by the default suite
std::vector<MeanSpec> mean_catalog();

CheckResult check_axioms(const MeanSpec& m, const VerifyConfig& cfg);
CheckResult check_chain(const VerifyConfig& cfg);
CheckResult check_I(const ScalarFunctionSpec& f, const std::vector<std::string>& items,
                    const VerifyConfig& cfg);
CheckResult check_D(const ScalarFunctionSpec& f, const std::vector<std::string>& items,
                    const VerifyConfig& cfg);
CheckResult check_duality(const ScalarFunctionSpec& f, const ScalarFunctionSpec& g,
                          const ScalarFunctionSpec& h, const MeanSpec& sigma, const MeanSpec& eta,
                          const VerifyConfig& cfg);
CheckResult check_cor_power(const VerifyConfig& cfg);
CheckResult check_thm_connection_distrib(const MeanSpec& sigma, const VerifyConfig& cfg);
CheckResult check_thm_symmetric_distrib(const MeanSpec& sigma, const MeanSpec& eta_symmetric,
                                        const VerifyConfig& cfg);
CheckResult check_cor_negative_power(const VerifyConfig& cfg);

VerificationReport run_all(const VerifyConfig& cfg);

std::string report_to_json(const VerificationReport& report);

// Structural diff ignoring timing fields; empty result means equivalent.
std::vector<std::string> report_diff(const std::string& json_a, const std::string& json_b);

}  // namespace opmeans

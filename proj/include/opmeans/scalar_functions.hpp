#pragma once

// Symbolic specs and evaluation of the scalar function families on (0, inf),
// closed under the duality f -> f*, f*(x) = 1/f(1/x).

#include <functional>
#include <memory>
#include <string>

#include "opmeans/common.hpp"

namespace opmeans {

class ScalarFunctionSpec {
public:
    enum class Family { Power, LogShift, QapmRep, SymRep, Dual, Affine, Custom };

    static ScalarFunctionSpec power(double alpha);
    static ScalarFunctionSpec logshift();
    // (1 - alpha + alpha*x^p)^(1/p); p in [-1,1], alpha in [0,1]
    static ScalarFunctionSpec qapm_rep(double p, double alpha);
    // g_r(x) = (3r-1)/(3r+1) * (x^((3r+1)/2) - 1)/(x^((3r-1)/2) - 1); r in [-1,1]
    static ScalarFunctionSpec sym_rep(double r);
    static ScalarFunctionSpec affine(double a, double b);
    // black-box hook; admitted only to the classifier
    static ScalarFunctionSpec custom(std::string name, std::function<double(double)> fn);

    Family family() const { return family_; }
    double param(const std::string& key) const;  // "a"/"p"/"r"/"b" per family
    const ScalarFunctionSpec& inner() const;     // Dual only
    bool is_custom() const { return family_ == Family::Custom; }

    // lower end of the admissible eigenvalue domain and whether it is open
    double domain_min() const;
    bool domain_open() const;

    std::string to_string() const;

private:
    ScalarFunctionSpec() = default;
    Family family_ = Family::Power;
    double p1_ = 0.0, p2_ = 0.0;
    std::shared_ptr<ScalarFunctionSpec> inner_;
    std::string custom_name_;
    std::function<double(double)> custom_fn_;

    friend double eval(const ScalarFunctionSpec& f, double x);
    friend ScalarFunctionSpec dualize(const ScalarFunctionSpec& f);
};

double eval(const ScalarFunctionSpec& f, double x);

// spec with eval(dualize(f), x) == 1/eval(f, 1/x); involutive
ScalarFunctionSpec dualize(const ScalarFunctionSpec& f);

// central difference with h = x * eps^(1/3)
double derivative(const ScalarFunctionSpec& f, double x);

// f(x) == x f(1/x) on log-uniform samples in [1e-3, 1e3]
bool is_symmetric_rep(const ScalarFunctionSpec& f, int sample_count);

// grammar: "power:a=0.5" | "logshift" | "qapm:p=0.5,a=0.3" | "sym:r=0.3" |
//          "dual(<spec>)" | "affine:a=1,b=2"
ScalarFunctionSpec parse_function(const std::string& text);

}  // namespace opmeans

#pragma once

// Operator connections and means on positive-definite pairs, their adjoints,
// function-induced means, and the regularization ladder for PSD operands.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opmeans/hermitian.hpp"
#include "opmeans/scalar_functions.hpp"

namespace opmeans {

class MeanSpec {
public:
    enum class Family { Arith, Harm, Geom, Qapm, Sym, FromFunction, Adjoint };

    static MeanSpec arith(double t);
    static MeanSpec harm(double t);
    static MeanSpec geom(double t);
    static MeanSpec qapm(double p, double alpha);
    static MeanSpec sym(double r);
    static MeanSpec from_function(const ScalarFunctionSpec& f);

    Family family() const { return family_; }
    double param(const std::string& key) const;  // "t"/"p"/"a"/"r"
    const MeanSpec& inner() const;               // Adjoint only

    std::string to_string() const;

private:
    MeanSpec() = default;
    Family family_ = Family::Arith;
    double p1_ = 0.0, p2_ = 0.0;
    std::shared_ptr<MeanSpec> inner_;
    std::shared_ptr<ScalarFunctionSpec> fn_;

    friend MeanSpec adjoint_of(const MeanSpec& m);
    friend ScalarFunctionSpec rep(const MeanSpec& m);
};

MeanSpec adjoint_of(const MeanSpec& m);

// representing function: eval(rep(m), x) == evaluate(m, [1], [x])
ScalarFunctionSpec rep(const MeanSpec& m);

// A sigma B for PD operands. arith/harm use their closed forms; everything
// else goes through the single sandwich A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}
// with f = rep(m).
HermitianMatrix evaluate(const MeanSpec& m, const HermitianMatrix& A, const HermitianMatrix& B);

struct PsdEvaluation {
    HermitianMatrix value;
    double eps_used = 0.0;
    int rungs_used = 0;
};

// eps_k = 2^{-k} * max(1, ||A||_2, ||B||_2) for k = 0..40
std::vector<double> default_eps_ladder(const HermitianMatrix& A, const HermitianMatrix& B);

// Walks the mean down (A + eps I, B + eps I); returns the first iterate whose
// step-to-step Frobenius gap is <= tol * max(1, ||A||_2, ||B||_2). Iterates
// must be Loewner-decreasing within tolerance; throws LadderError when the
// ladder runs out.
PsdEvaluation evaluate_psd(const MeanSpec& m, const HermitianMatrix& A, const HermitianMatrix& B,
                           const std::vector<double>& eps_ladder, double tol = 1e-9);
PsdEvaluation evaluate_psd(const MeanSpec& m, const HermitianMatrix& A, const HermitianMatrix& B,
                           double tol = 1e-9);

namespace detail {
// evaluation without the is_pd tolerance gate (eigenvalues must still be
// strictly positive); the ladder uses this at small eps
HermitianMatrix evaluate_unchecked(const MeanSpec& m, const HermitianMatrix& A,
                                   const HermitianMatrix& B);
}  // namespace detail

// grammar: "arith:t=0.5" | "harm:t=0.25" | "geom:t=0.5" | "qapm:p=-0.5,a=0.3"
//        | "sym:r=0.3" | "adjoint(<spec>)" | "fromfn(<function spec>)"
MeanSpec parse_mean(const std::string& text);

}  // namespace opmeans

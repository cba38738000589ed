#include "opmeans/spectral.hpp"

#include <cmath>

namespace opmeans {

HermitianMatrix apply(const ScalarFunctionSpec& f, const HermitianMatrix& M) {
    SpectralDecomposition d = eigh(M);
    const double scale = std::max({1.0, std::abs(d.eigenvalues.front()),
                                   std::abs(d.eigenvalues.back())});
    const double guard = 1e-12 * scale;
    const double lo = f.domain_min();
    std::vector<double> vals(d.eigenvalues.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        double lam = d.eigenvalues[i];
        if (f.domain_open()) {
            if (lam <= lo + guard)
                throw DomainError("apply(" + f.to_string() + "): eigenvalue " +
                                  std::to_string(lam) + " at or below domain boundary");
        } else {
            if (lam < lo - guard)
                throw DomainError("apply(" + f.to_string() + "): eigenvalue " +
                                  std::to_string(lam) + " below domain boundary");
            if (lam < lo) lam = lo;  // roundoff undershoot of a closed boundary
        }
        vals[i] = eval(f, lam);
    }
    return HermitianMatrix(d.reassemble(vals));
}

namespace detail {

HermitianMatrix raw_power(const HermitianMatrix& M, double t) {
    SpectralDecomposition d = eigh(M);
    if (d.eigenvalues.front() <= 0.0)
        throw DomainError("raw_power: nonpositive eigenvalue " +
                          std::to_string(d.eigenvalues.front()));
    std::vector<double> vals(d.eigenvalues.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        double lam = d.eigenvalues[i];
        if (t == 1.0)
            vals[i] = lam;
        else if (t == 0.5)
            vals[i] = std::sqrt(lam);
        else if (t == -0.5)
            vals[i] = 1.0 / std::sqrt(lam);
        else if (t == -1.0)
            vals[i] = 1.0 / lam;
        else if (t == 0.0)
            vals[i] = 1.0;
        else
            vals[i] = std::pow(lam, t);
    }
    return HermitianMatrix(d.reassemble(vals));
}

}  // namespace detail

namespace {

void require_pd(const HermitianMatrix& M, const char* op) {
    if (!is_pd(M))
        throw DomainError(std::string(op) + ": matrix is not positive definite");
}

}  // namespace

HermitianMatrix sqrt_pd(const HermitianMatrix& M) {
    require_pd(M, "sqrt_pd");
    return detail::raw_power(M, 0.5);
}

HermitianMatrix inv_sqrt_pd(const HermitianMatrix& M) {
    require_pd(M, "inv_sqrt_pd");
    return detail::raw_power(M, -0.5);
}

HermitianMatrix power_pd(const HermitianMatrix& M, double t) {
    require_pd(M, "power_pd");
    return detail::raw_power(M, t);
}

}  // namespace opmeans

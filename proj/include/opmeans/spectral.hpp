#pragma once

// Scalar functions on Hermitian matrices via the spectral theorem.

#include "opmeans/hermitian.hpp"
#include "opmeans/scalar_functions.hpp"

namespace opmeans {

// Q diag(f(lambda_i)) Q*. Every eigenvalue must lie in f's domain;
// eigenvalues within 1e-12*max(1, ||M||_2) of an open domain boundary are
// rejected (callers regularize instead), and roundoff-level undershoot of a
// closed boundary is snapped onto it.
HermitianMatrix apply(const ScalarFunctionSpec& f, const HermitianMatrix& M);

HermitianMatrix sqrt_pd(const HermitianMatrix& M);
HermitianMatrix inv_sqrt_pd(const HermitianMatrix& M);

// x -> x^t for t in [-1,1]; requires PD
HermitianMatrix power_pd(const HermitianMatrix& M, double t);

namespace detail {
// x -> x^t without the PD tolerance gate; requires strictly positive
// eigenvalues. Used inside regularization ladders where eigenvalues may sit
// below the public is_pd threshold.
HermitianMatrix raw_power(const HermitianMatrix& M, double t);
}  // namespace detail

}  // namespace opmeans

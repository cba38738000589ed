#pragma once

// Dense Hermitian matrix arithmetic, complex Jacobi eigendecomposition,
// Loewner-order comparison and randomized positive-definite generation.

#include <complex>
#include <string>
#include <vector>

#include "opmeans/common.hpp"

namespace opmeans {

using cx = std::complex<double>;

// Dense square complex matrix, row-major. Internal workhorse for products,
// eigenvector accumulation and unitaries; no Hermitian invariant.
class CMatrix {
public:
    CMatrix() : n_(0) {}
    explicit CMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, cx(0.0, 0.0)) {}

    static CMatrix identity(int n);

    int dim() const { return n_; }
    cx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const cx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    CMatrix adjoint() const;
    double frobenius() const;
    double max_abs_entry() const;

    friend CMatrix operator*(const CMatrix& x, const CMatrix& y);
    friend CMatrix operator+(const CMatrix& x, const CMatrix& y);
    friend CMatrix operator-(const CMatrix& x, const CMatrix& y);
    friend CMatrix operator*(double s, const CMatrix& x);

private:
    int n_;
    std::vector<cx> a_;
};

// Hermitian value type. Construction symmetrizes M <- (M + M*)/2 after
// checking the input is Hermitian up to roundoff:
//   max|M - M*| <= 1e-12 * (1 + max|M|)
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(const CMatrix& m);
    // real symmetric input, row-major
    HermitianMatrix(int n, const std::vector<double>& re);

    static HermitianMatrix identity(int n);
    static HermitianMatrix diagonal(const std::vector<double>& d);
    static HermitianMatrix zero(int n);
    // unconditional (M + M*)/2, for products that are Hermitian by
    // construction but carry cancellation-amplified roundoff asymmetry
    static HermitianMatrix symmetrized(const CMatrix& m);

    int dim() const { return m_.dim(); }
    const CMatrix& mat() const { return m_; }
    cx entry(int i, int j) const { return m_(i, j); }

    double frobenius() const { return m_.frobenius(); }

    friend HermitianMatrix operator+(const HermitianMatrix& x, const HermitianMatrix& y);
    friend HermitianMatrix operator-(const HermitianMatrix& x, const HermitianMatrix& y);
    friend HermitianMatrix operator*(double s, const HermitianMatrix& x);

private:
    CMatrix m_;
};

struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // ascending
    CMatrix eigenvectors;             // unitary, column i pairs with eigenvalues[i]

    // Q diag(f(lambda)) Q* for given per-eigenvalue values
    CMatrix reassemble(const std::vector<double>& values) const;
};

enum class OrderVerdict { LEQ, GEQ, EQUAL, INCOMPARABLE };

std::string to_string(OrderVerdict v);

struct LoewnerComparison {
    OrderVerdict verdict;
    double min_eig_diff;   // smallest eigenvalue of B - A
    double max_eig_diff;   // largest eigenvalue of B - A
    double tolerance_used;
};

// Cyclic Jacobi with complex rotations. Budget 30 sweeps, off-diagonal
// Frobenius threshold 1e-14 * ||M||_F; throws ConvergenceError past budget.
SpectralDecomposition eigh(const HermitianMatrix& M);

// spectral norm (largest |eigenvalue|)
double opnorm(const HermitianMatrix& M);

LoewnerComparison loewner_compare(const HermitianMatrix& A, const HermitianMatrix& B,
                                  double tol_rel = 1e-8);

bool is_pd(const HermitianMatrix& M, double tol_rel = 1e-8);
bool is_psd(const HermitianMatrix& M, double tol_rel = 1e-8);

// C A C (both Hermitian, result Hermitian)
HermitianMatrix conjugate(const HermitianMatrix& C, const HermitianMatrix& A);

// inverse of a PD matrix via reciprocal eigenvalues
HermitianMatrix inverse(const HermitianMatrix& M);

// Haar unitary: modified Gram-Schmidt QR of a complex Gaussian matrix;
// the positive real R diagonal supplies the phase correction.
CMatrix random_unitary(int dim, Rng& rng);

// Q diag(lambda) Q* with lambda log-uniform in [10^lo_exp, 10^hi_exp] and
// Haar Q. Bit-identical for identical (dim, range, seed).
HermitianMatrix random_pd(int dim, double lo_exp, double hi_exp, std::uint64_t seed);

// PSD with exactly `rank` positive eigenvalues (default spectrum range),
// the rest exactly zero.
HermitianMatrix random_psd_singular(int dim, int rank, std::uint64_t seed);

// JSON wire format: {"dim": n, "re": [[...]], "im": [[...]]}, "im" optional.
std::string matrix_to_json(const HermitianMatrix& M);
HermitianMatrix matrix_from_json_text(const std::string& text);

}  // namespace opmeans

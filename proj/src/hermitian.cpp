#include "opmeans/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace opmeans {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = cx(1.0, 0.0);
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

double CMatrix::frobenius() const {
    double s = 0.0;
    for (const cx& z : a_) s += std::norm(z);
    return std::sqrt(s);
}

double CMatrix::max_abs_entry() const {
    double m = 0.0;
    for (const cx& z : a_) m = std::max(m, std::abs(z));
    return m;
}

CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    const int n = x.n_;
    CMatrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cx xik = x(i, k);
            if (xik == cx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
        }
    }
    return r;
}

CMatrix operator+(const CMatrix& x, const CMatrix& y) {
    CMatrix r(x.n_);
    for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
    return r;
}

CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    CMatrix r(x.n_);
    for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
    return r;
}

CMatrix operator*(double s, const CMatrix& x) {
    CMatrix r(x.n_);
    for (size_t i = 0; i < x.a_.size(); ++i) r.a_[i] = s * x.a_[i];
    return r;
}

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
    const int n = m.dim();
    if (n < 1) throw DimensionError("HermitianMatrix: dim must be >= 1");
    CMatrix dev = m - m.adjoint();
    double max_dev = dev.max_abs_entry();
    if (max_dev > 1e-12 * (1.0 + m.max_abs_entry()))
        throw DomainError("HermitianMatrix: input deviates from Hermitian beyond tolerance (dev=" +
                          std::to_string(max_dev) + ")");
    CMatrix sym(n);
    for (int i = 0; i < n; ++i) {
        sym(i, i) = cx(m(i, i).real(), 0.0);
        for (int j = i + 1; j < n; ++j) {
            cx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
            sym(i, j) = v;
            sym(j, i) = std::conj(v);
        }
    }
    m_ = sym;
}

HermitianMatrix::HermitianMatrix(int n, const std::vector<double>& re) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cx(re[static_cast<size_t>(i) * n + j], 0.0);
    *this = HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::identity(int n) { return HermitianMatrix(CMatrix::identity(n)); }

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
    CMatrix m(static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = cx(d[i], 0.0);
    return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::zero(int n) { return HermitianMatrix(CMatrix(n)); }

HermitianMatrix HermitianMatrix::symmetrized(const CMatrix& m) {
    if (m.dim() < 1) throw DimensionError("HermitianMatrix: dim must be >= 1");
    HermitianMatrix h;
    h.m_ = 0.5 * (m + m.adjoint());
    for (int i = 0; i < h.m_.dim(); ++i) h.m_(i, i) = cx(h.m_(i, i).real(), 0.0);
    return h;
}

HermitianMatrix operator+(const HermitianMatrix& x, const HermitianMatrix& y) {
    if (x.dim() != y.dim()) throw DimensionError("operator+: dimension mismatch");
    return HermitianMatrix(x.m_ + y.m_);
}

HermitianMatrix operator-(const HermitianMatrix& x, const HermitianMatrix& y) {
    if (x.dim() != y.dim()) throw DimensionError("operator-: dimension mismatch");
    return HermitianMatrix(x.m_ - y.m_);
}

HermitianMatrix operator*(double s, const HermitianMatrix& x) { return HermitianMatrix(s * x.m_); }

CMatrix SpectralDecomposition::reassemble(const std::vector<double>& values) const {
    const int n = eigenvectors.dim();
    CMatrix r(n);
    for (int k = 0; k < n; ++k) {
        const double v = values[k];
        if (v == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const cx qi = eigenvectors(i, k);
            for (int j = 0; j < n; ++j) r(i, j) += v * qi * std::conj(eigenvectors(j, k));
        }
    }
    return r;
}

std::string to_string(OrderVerdict v) {
    switch (v) {
        case OrderVerdict::LEQ: return "LEQ";
        case OrderVerdict::GEQ: return "GEQ";
        case OrderVerdict::EQUAL: return "EQUAL";
        case OrderVerdict::INCOMPARABLE: return "INCOMPARABLE";
    }
    return "?";
}

namespace {

double offdiag_frobenius(const std::vector<cx>& a, int n) {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) s += std::norm(a[static_cast<size_t>(p) * n + q]);
    return std::sqrt(2.0 * s);
}

}  // namespace

SpectralDecomposition eigh(const HermitianMatrix& M) {
    const int n = M.dim();
    SpectralDecomposition out;
    if (n == 1) {
        out.eigenvalues = {M.entry(0, 0).real()};
        out.eigenvectors = CMatrix::identity(1);
        return out;
    }

    std::vector<cx> a(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = M.entry(i, j);
    CMatrix q = CMatrix::identity(n);

    const double fnorm = M.frobenius();
    const double thresh = 1e-14 * fnorm;
    const int max_sweeps = 30;
    auto at = [&](int i, int j) -> cx& { return a[static_cast<size_t>(i) * n + j]; };

    bool converged = offdiag_frobenius(a, n) <= thresh;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int qq = p + 1; qq < n; ++qq) {
                const cx apq = at(p, qq);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const double app = at(p, p).real();
                const double aqq2 = at(qq, qq).real();
                const double tau = (aqq2 - app) / (2.0 * mag);
                // small-magnitude root of t^2 - 2*tau*t - 1 = 0
                double t;
                if (tau >= 0.0)
                    t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cx phase = apq / mag;
                const cx sph = s * phase;
                const cx sphc = s * std::conj(phase);

                // A <- A * R
                for (int i = 0; i < n; ++i) {
                    const cx aip = at(i, p);
                    const cx aiq = at(i, qq);
                    at(i, p) = c * aip + sphc * aiq;
                    at(i, qq) = c * aiq - sph * aip;
                }
                // A <- R^* A
                for (int j = 0; j < n; ++j) {
                    const cx apj = at(p, j);
                    const cx aqj = at(qq, j);
                    at(p, j) = c * apj + sph * aqj;
                    at(qq, j) = c * aqj - sphc * apj;
                }
                at(p, qq) = cx(0.0, 0.0);
                at(qq, p) = cx(0.0, 0.0);
                at(p, p) = cx(at(p, p).real(), 0.0);
                at(qq, qq) = cx(at(qq, qq).real(), 0.0);

                // Q <- Q * R
                for (int i = 0; i < n; ++i) {
                    const cx qip = q(i, p);
                    const cx qiq = q(i, qq);
                    q(i, p) = c * qip + sphc * qiq;
                    q(i, qq) = c * qiq - sph * qip;
                }
            }
        }
        converged = offdiag_frobenius(a, n) <= thresh;
    }
    if (!converged) {
        double res = offdiag_frobenius(a, n);
        throw ConvergenceError("eigh: Jacobi did not converge in 30 sweeps (off-diagonal " +
                                   std::to_string(res) + ")",
                               res);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return at(i, i).real() < at(j, j).real(); });

    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = at(order[k], order[k]).real();
        for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = q(i, order[k]);
    }
    return out;
}

double opnorm(const HermitianMatrix& M) {
    SpectralDecomposition d = eigh(M);
    double m = 0.0;
    for (double v : d.eigenvalues) m = std::max(m, std::abs(v));
    return m;
}

LoewnerComparison loewner_compare(const HermitianMatrix& A, const HermitianMatrix& B,
                                  double tol_rel) {
    if (A.dim() != B.dim()) throw DimensionError("loewner_compare: dimension mismatch");
    if (tol_rel <= 0.0) throw DomainError("loewner_compare: tol_rel must be > 0");
    SpectralDecomposition d = eigh(B - A);
    const double lo = d.eigenvalues.front();
    const double hi = d.eigenvalues.back();
    const double tol = tol_rel * std::max({1.0, opnorm(A), opnorm(B)});
    LoewnerComparison r{OrderVerdict::INCOMPARABLE, lo, hi, tol};
    if (std::abs(lo) <= tol && std::abs(hi) <= tol)
        r.verdict = OrderVerdict::EQUAL;
    else if (lo >= -tol)
        r.verdict = OrderVerdict::LEQ;
    else if (hi <= tol)
        r.verdict = OrderVerdict::GEQ;
    return r;
}

bool is_pd(const HermitianMatrix& M, double tol_rel) {
    SpectralDecomposition d = eigh(M);
    return d.eigenvalues.front() > tol_rel * std::max(1.0, opnorm(M));
}

bool is_psd(const HermitianMatrix& M, double tol_rel) {
    SpectralDecomposition d = eigh(M);
    return d.eigenvalues.front() >= -tol_rel * std::max(1.0, opnorm(M));
}

HermitianMatrix conjugate(const HermitianMatrix& C, const HermitianMatrix& A) {
    if (C.dim() != A.dim()) throw DimensionError("conjugate: dimension mismatch");
    return HermitianMatrix::symmetrized(C.mat() * A.mat() * C.mat());
}

HermitianMatrix inverse(const HermitianMatrix& M) {
    SpectralDecomposition d = eigh(M);
    if (d.eigenvalues.front() <= 1e-8 * std::max(1.0, std::abs(d.eigenvalues.back())))
        throw DomainError("inverse: matrix is not positive definite (min eigenvalue " +
                          std::to_string(d.eigenvalues.front()) + ")");
    std::vector<double> recip(d.eigenvalues.size());
    for (size_t i = 0; i < recip.size(); ++i) recip[i] = 1.0 / d.eigenvalues[i];
    return HermitianMatrix(d.reassemble(recip));
}

CMatrix random_unitary(int dim, Rng& rng) {
    CMatrix g(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cx(rng.gaussian(), rng.gaussian()) * M_SQRT1_2;
    // modified Gram-Schmidt; normalizing by the real column norm keeps the
    // implicit R diagonal real positive, which is what makes Q Haar
    for (int k = 0; k < dim; ++k) {
        for (int j = 0; j < k; ++j) {
            cx proj(0.0, 0.0);
            for (int i = 0; i < dim; ++i) proj += std::conj(g(i, j)) * g(i, k);
            for (int i = 0; i < dim; ++i) g(i, k) -= proj * g(i, j);
        }
        double nrm = 0.0;
        for (int i = 0; i < dim; ++i) nrm += std::norm(g(i, k));
        nrm = std::sqrt(nrm);
        for (int i = 0; i < dim; ++i) g(i, k) /= nrm;
    }
    return g;
}

namespace {

HermitianMatrix assemble_spectrum(int dim, const std::vector<double>& lambda, Rng& rng) {
    CMatrix q = random_unitary(dim, rng);
    CMatrix h(dim);
    for (int k = 0; k < dim; ++k) {
        if (lambda[k] == 0.0) continue;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) h(i, j) += lambda[k] * q(i, k) * std::conj(q(j, k));
    }
    return HermitianMatrix(h);
}

}  // namespace

HermitianMatrix random_pd(int dim, double lo_exp, double hi_exp, std::uint64_t seed) {
    if (dim < 1) throw DimensionError("random_pd: dim must be >= 1");
    if (hi_exp < lo_exp) throw DomainError("random_pd: empty eigenvalue range");
    Rng rng(derive_seed(seed, {0x7064ULL, static_cast<std::uint64_t>(dim)}));
    std::vector<double> lambda(dim);
    for (int i = 0; i < dim; ++i) lambda[i] = rng.log_uniform_pow10(lo_exp, hi_exp);
    return assemble_spectrum(dim, lambda, rng);
}

HermitianMatrix random_psd_singular(int dim, int rank, std::uint64_t seed) {
    if (dim < 1) throw DimensionError("random_psd_singular: dim must be >= 1");
    if (rank < 0 || rank >= dim)
        throw DomainError("random_psd_singular: rank must satisfy 0 <= rank < dim");
    Rng rng(derive_seed(seed, {0x707364ULL, static_cast<std::uint64_t>(dim),
                               static_cast<std::uint64_t>(rank)}));
    std::vector<double> lambda(dim, 0.0);
    for (int i = 0; i < rank; ++i) lambda[i] = rng.log_uniform_pow10(-2.0, 2.0);
    return assemble_spectrum(dim, lambda, rng);
}

std::string matrix_to_json(const HermitianMatrix& M) {
    nlohmann::ordered_json j;
    const int n = M.dim();
    j["dim"] = n;
    bool has_im = false;
    std::vector<std::vector<double>> re(n, std::vector<double>(n));
    std::vector<std::vector<double>> im(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            re[i][k] = M.entry(i, k).real();
            im[i][k] = M.entry(i, k).imag();
            if (im[i][k] != 0.0) has_im = true;
        }
    j["re"] = re;
    if (has_im) j["im"] = im;
    return j.dump();
}

HermitianMatrix matrix_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("re"))
        throw ParseError("matrix JSON: expected object with \"dim\" and \"re\"");
    int n = 0;
    try {
        n = j.at("dim").get<int>();
        if (n < 1) throw ParseError("matrix JSON: dim must be >= 1");
        auto re = j.at("re").get<std::vector<std::vector<double>>>();
        std::vector<std::vector<double>> im;
        if (j.contains("im")) im = j.at("im").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(re.size()) != n)
            throw ParseError("matrix JSON: \"re\" row count != dim");
        CMatrix m(n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(re[i].size()) != n)
                throw ParseError("matrix JSON: ragged \"re\" rows");
            for (int k = 0; k < n; ++k) {
                double iv = im.empty() ? 0.0 : im.at(i).at(k);
                m(i, k) = cx(re[i][k], iv);
            }
        }
        return HermitianMatrix(m);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
}

}  // namespace opmeans

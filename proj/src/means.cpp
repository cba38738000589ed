#include "opmeans/means.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "opmeans/spectral.hpp"

namespace opmeans {

namespace {

void require_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(v));
}

}  // namespace

MeanSpec MeanSpec::arith(double t) {
    require_unit(t, "arith: t");
    MeanSpec m;
    m.family_ = Family::Arith;
    m.p1_ = t;
    return m;
}

MeanSpec MeanSpec::harm(double t) {
    require_unit(t, "harm: t");
    MeanSpec m;
    m.family_ = Family::Harm;
    m.p1_ = t;
    return m;
}

MeanSpec MeanSpec::geom(double t) {
    require_unit(t, "geom: t");
    MeanSpec m;
    m.family_ = Family::Geom;
    m.p1_ = t;
    return m;
}

MeanSpec MeanSpec::qapm(double p, double alpha) {
    if (!(p >= -1.0 && p <= 1.0)) throw DomainError("qapm: p must lie in [-1,1]");
    require_unit(alpha, "qapm: alpha");
    MeanSpec m;
    m.family_ = Family::Qapm;
    m.p1_ = p;
    m.p2_ = alpha;
    return m;
}

MeanSpec MeanSpec::sym(double r) {
    if (!(r >= -1.0 && r <= 1.0)) throw DomainError("sym: r must lie in [-1,1]");
    MeanSpec m;
    m.family_ = Family::Sym;
    m.p1_ = r;
    return m;
}

MeanSpec MeanSpec::from_function(const ScalarFunctionSpec& f) {
    if (f.is_custom())
        throw DomainError("from_function: black-box functions are not certified "
                          "representing functions");
    MeanSpec m;
    m.family_ = Family::FromFunction;
    m.fn_ = std::make_shared<ScalarFunctionSpec>(f);
    return m;
}

MeanSpec adjoint_of(const MeanSpec& m) {
    if (m.family_ == MeanSpec::Family::Adjoint) return *m.inner_;  // involution
    MeanSpec a;
    a.family_ = MeanSpec::Family::Adjoint;
    a.inner_ = std::make_shared<MeanSpec>(m);
    return a;
}

double MeanSpec::param(const std::string& key) const {
    switch (family_) {
        case Family::Arith:
        case Family::Harm:
        case Family::Geom:
            if (key == "t") return p1_;
            break;
        case Family::Qapm:
            if (key == "p") return p1_;
            if (key == "a") return p2_;
            break;
        case Family::Sym:
            if (key == "r") return p1_;
            break;
        default:
            break;
    }
    throw DomainError("MeanSpec::param: no parameter '" + key + "' for " + to_string());
}

const MeanSpec& MeanSpec::inner() const {
    if (family_ != Family::Adjoint || !inner_)
        throw DomainError("MeanSpec::inner: not an adjoint spec");
    return *inner_;
}

std::string MeanSpec::to_string() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Arith: os << "arith:t=" << p1_; break;
        case Family::Harm: os << "harm:t=" << p1_; break;
        case Family::Geom: os << "geom:t=" << p1_; break;
        case Family::Qapm: os << "qapm:p=" << p1_ << ",a=" << p2_; break;
        case Family::Sym: os << "sym:r=" << p1_; break;
        case Family::FromFunction: os << "fromfn(" << fn_->to_string() << ")"; break;
        case Family::Adjoint: os << "adjoint(" << inner_->to_string() << ")"; break;
    }
    return os.str();
}

ScalarFunctionSpec rep(const MeanSpec& m) {
    switch (m.family()) {
        case MeanSpec::Family::Arith: return ScalarFunctionSpec::qapm_rep(1.0, m.p1_);
        case MeanSpec::Family::Harm: return ScalarFunctionSpec::qapm_rep(-1.0, m.p1_);
        case MeanSpec::Family::Geom: return ScalarFunctionSpec::power(m.p1_);
        case MeanSpec::Family::Qapm: return ScalarFunctionSpec::qapm_rep(m.p1_, m.p2_);
        case MeanSpec::Family::Sym: return ScalarFunctionSpec::sym_rep(m.p1_);
        case MeanSpec::Family::FromFunction: return *m.fn_;
        case MeanSpec::Family::Adjoint: return dualize(rep(*m.inner_));
    }
    throw Error("rep: unreachable");
}

namespace detail {

namespace {

// f on strictly positive spectrum, no tolerance gate: the regularization
// ladder reaches eigenvalues far below the public is_pd threshold
HermitianMatrix apply_positive(const ScalarFunctionSpec& f, const HermitianMatrix& M) {
    SpectralDecomposition d = eigh(M);
    if (d.eigenvalues.front() <= 0.0)
        throw DomainError("mean sandwich: operand has nonpositive eigenvalue " +
                          std::to_string(d.eigenvalues.front()));
    std::vector<double> vals(d.eigenvalues.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = eval(f, d.eigenvalues[i]);
    return HermitianMatrix(d.reassemble(vals));
}

HermitianMatrix sandwich(const ScalarFunctionSpec& f, const HermitianMatrix& A,
                         const HermitianMatrix& B) {
    HermitianMatrix half = raw_power(A, 0.5);
    HermitianMatrix inv_half = raw_power(A, -0.5);
    HermitianMatrix x = conjugate(inv_half, B);
    return conjugate(half, apply_positive(f, x));
}

}  // namespace

HermitianMatrix evaluate_unchecked(const MeanSpec& m, const HermitianMatrix& A,
                                   const HermitianMatrix& B) {
    if (A.dim() != B.dim()) throw DimensionError("evaluate: dimension mismatch");
    switch (m.family()) {
        case MeanSpec::Family::Arith: {
            double t = m.param("t");
            if (t == 0.0) return A;
            if (t == 1.0) return B;
            return (1.0 - t) * A + t * B;
        }
        case MeanSpec::Family::Harm: {
            double t = m.param("t");
            if (t == 0.0) return A;
            if (t == 1.0) return B;
            return raw_power((1.0 - t) * raw_power(A, -1.0) + t * raw_power(B, -1.0), -1.0);
        }
        case MeanSpec::Family::Geom: {
            double t = m.param("t");
            if (t == 0.0) return A;
            if (t == 1.0) return B;
            return sandwich(ScalarFunctionSpec::power(t), A, B);
        }
        default:
            return sandwich(rep(m), A, B);
    }
}

}  // namespace detail

HermitianMatrix evaluate(const MeanSpec& m, const HermitianMatrix& A, const HermitianMatrix& B) {
    if (A.dim() != B.dim()) throw DimensionError("evaluate: dimension mismatch");
    if (!is_pd(A) || !is_pd(B))
        throw DomainError("evaluate(" + m.to_string() + "): operands must be positive definite");
    return detail::evaluate_unchecked(m, A, B);
}

std::vector<double> default_eps_ladder(const HermitianMatrix& A, const HermitianMatrix& B) {
    const double scale = std::max({1.0, opnorm(A), opnorm(B)});
    std::vector<double> ladder;
    ladder.reserve(41);
    for (int k = 0; k <= 40; ++k) ladder.push_back(std::ldexp(scale, -k));
    return ladder;
}

PsdEvaluation evaluate_psd(const MeanSpec& m, const HermitianMatrix& A, const HermitianMatrix& B,
                           const std::vector<double>& eps_ladder, double tol) {
    if (A.dim() != B.dim()) throw DimensionError("evaluate_psd: dimension mismatch");
    if (!is_psd(A) || !is_psd(B))
        throw DomainError("evaluate_psd: operands must be positive semidefinite");
    if (eps_ladder.empty()) throw DomainError("evaluate_psd: empty epsilon ladder");

    // closed forms that need no regularization
    if (m.family() == MeanSpec::Family::Arith)
        return {detail::evaluate_unchecked(m, A, B), 0.0, 0};
    if (m.family() == MeanSpec::Family::Harm) {
        double t = m.param("t");
        if (t == 0.0) return {A, 0.0, 0};
        if (t == 1.0) return {B, 0.0, 0};
    }

    const int n = A.dim();
    const double scale = std::max({1.0, opnorm(A), opnorm(B)});
    const HermitianMatrix eye = HermitianMatrix::identity(n);

    HermitianMatrix prev =
        detail::evaluate_unchecked(m, A + eps_ladder[0] * eye, B + eps_ladder[0] * eye);
    double last_gap = -1.0;
    for (size_t k = 1; k < eps_ladder.size(); ++k) {
        double eps = eps_ladder[k];
        if (eps <= 0.0 || eps >= eps_ladder[k - 1])
            throw DomainError("evaluate_psd: ladder must be strictly descending and positive");
        HermitianMatrix cur = detail::evaluate_unchecked(m, A + eps * eye, B + eps * eye);
        SpectralDecomposition diff = eigh(prev - cur);
        if (diff.eigenvalues.front() < -1e-7 * scale)
            throw Error("evaluate_psd: ladder iterates not Loewner-decreasing (min eig " +
                        std::to_string(diff.eigenvalues.front()) + ")");
        last_gap = (prev - cur).frobenius();
        if (last_gap <= tol * scale)
            return {cur, eps, static_cast<int>(k) + 1};
        prev = cur;
    }
    throw LadderError("evaluate_psd: ladder exhausted before convergence (last gap " +
                          std::to_string(last_gap) + ")",
                      last_gap, eps_ladder.back());
}

PsdEvaluation evaluate_psd(const MeanSpec& m, const HermitianMatrix& A, const HermitianMatrix& B,
                           double tol) {
    return evaluate_psd(m, A, B, default_eps_ladder(A, B), tol);
}

MeanSpec parse_mean(const std::string& text) {
    if (text.empty()) throw ParseError("mean spec: empty string");
    if (text.rfind("adjoint(", 0) == 0) {
        if (text.back() != ')') throw ParseError("mean spec: missing ')' in '" + text + "'");
        return adjoint_of(parse_mean(text.substr(8, text.size() - 9)));
    }
    if (text.rfind("fromfn(", 0) == 0) {
        if (text.back() != ')') throw ParseError("mean spec: missing ')' in '" + text + "'");
        try {
            return MeanSpec::from_function(parse_function(text.substr(7, text.size() - 8)));
        } catch (const DomainError& e) {
            throw ParseError(std::string("mean spec: ") + e.what());
        }
    }
    std::string head = text, args;
    auto colon = text.find(':');
    if (colon != std::string::npos) {
        head = text.substr(0, colon);
        args = text.substr(colon + 1);
    }
    const std::string ctx = "mean spec '" + text + "'";
    std::map<std::string, double> kv;
    {
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ParseError(ctx + ": expected key=value, got '" + item + "'");
            try {
                size_t pos = 0;
                double v = std::stod(item.substr(eq + 1), &pos);
                if (pos != item.size() - eq - 1) throw std::invalid_argument(item);
                kv[item.substr(0, eq)] = v;
            } catch (const std::exception&) {
                throw ParseError(ctx + ": bad numeric value in '" + item + "'");
            }
        }
    }
    auto take = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(ctx + ": missing parameter '" + key + "'");
        double v = it->second;
        kv.erase(it);
        return v;
    };
    auto done = [&] {
        if (!kv.empty()) throw ParseError(ctx + ": unknown parameter '" + kv.begin()->first + "'");
    };
    try {
        if (head == "arith") {
            double t = take("t");
            done();
            return MeanSpec::arith(t);
        }
        if (head == "harm") {
            double t = take("t");
            done();
            return MeanSpec::harm(t);
        }
        if (head == "geom") {
            double t = take("t");
            done();
            return MeanSpec::geom(t);
        }
        if (head == "qapm") {
            double p = take("p");
            double a = take("a");
            done();
            return MeanSpec::qapm(p, a);
        }
        if (head == "sym") {
            double r = take("r");
            done();
            return MeanSpec::sym(r);
        }
    } catch (const DomainError& e) {
        throw ParseError(ctx + ": " + e.what());
    }
    throw ParseError("mean spec: unknown family '" + head + "'");
}

}  // namespace opmeans

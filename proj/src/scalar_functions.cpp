#include "opmeans/scalar_functions.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace opmeans {

namespace {

constexpr double kPCut = 1e-6;  // |p| below this: qapm_rep collapses to x^alpha
constexpr double kRCut = 1e-6;  // distance from r = +-1/3 switching to limit formulas
constexpr double kXCut = 1e-6;  // distance from x = 1 switching to the series ratio

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

}  // namespace

ScalarFunctionSpec ScalarFunctionSpec::power(double alpha) {
    ScalarFunctionSpec f;
    f.family_ = Family::Power;
    f.p1_ = alpha;
    return f;
}

ScalarFunctionSpec ScalarFunctionSpec::logshift() {
    ScalarFunctionSpec f;
    f.family_ = Family::LogShift;
    return f;
}

ScalarFunctionSpec ScalarFunctionSpec::qapm_rep(double p, double alpha) {
    require(p >= -1.0 && p <= 1.0, "qapm_rep: p must lie in [-1,1]");
    require(alpha >= 0.0 && alpha <= 1.0, "qapm_rep: alpha must lie in [0,1]");
    ScalarFunctionSpec f;
    f.family_ = Family::QapmRep;
    f.p1_ = p;
    f.p2_ = alpha;
    return f;
}

ScalarFunctionSpec ScalarFunctionSpec::sym_rep(double r) {
    require(r >= -1.0 && r <= 1.0, "sym_rep: r must lie in [-1,1]");
    ScalarFunctionSpec f;
    f.family_ = Family::SymRep;
    f.p1_ = r;
    return f;
}

ScalarFunctionSpec ScalarFunctionSpec::affine(double a, double b) {
    require(a >= 0.0 && b >= 0.0 && a + b > 0.0, "affine: need a,b >= 0 and a+b > 0");
    ScalarFunctionSpec f;
    f.family_ = Family::Affine;
    f.p1_ = a;
    f.p2_ = b;
    return f;
}

ScalarFunctionSpec ScalarFunctionSpec::custom(std::string name, std::function<double(double)> fn) {
    ScalarFunctionSpec f;
    f.family_ = Family::Custom;
    f.custom_name_ = std::move(name);
    f.custom_fn_ = std::move(fn);
    return f;
}

double ScalarFunctionSpec::param(const std::string& key) const {
    switch (family_) {
        case Family::Power:
            if (key == "a") return p1_;
            break;
        case Family::QapmRep:
            if (key == "p") return p1_;
            if (key == "a") return p2_;
            break;
        case Family::SymRep:
            if (key == "r") return p1_;
            break;
        case Family::Affine:
            if (key == "a") return p1_;
            if (key == "b") return p2_;
            break;
        default:
            break;
    }
    throw DomainError("ScalarFunctionSpec::param: no parameter '" + key + "' for " + to_string());
}

const ScalarFunctionSpec& ScalarFunctionSpec::inner() const {
    if (family_ != Family::Dual || !inner_)
        throw DomainError("ScalarFunctionSpec::inner: not a dual spec");
    return *inner_;
}

double ScalarFunctionSpec::domain_min() const {
    return family_ == Family::LogShift ? -1.0 : 0.0;
}

bool ScalarFunctionSpec::domain_open() const {
    switch (family_) {
        case Family::Power: return p1_ < 0.0;
        case Family::LogShift: return true;
        case Family::Affine: return false;
        default: return true;  // qapm/sym/dual/custom evaluate on (0,inf) only
    }
}

std::string ScalarFunctionSpec::to_string() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Power: os << "power:a=" << p1_; break;
        case Family::LogShift: os << "logshift"; break;
        case Family::QapmRep: os << "qapm:p=" << p1_ << ",a=" << p2_; break;
        case Family::SymRep: os << "sym:r=" << p1_; break;
        case Family::Dual: os << "dual(" << inner_->to_string() << ")"; break;
        case Family::Affine: os << "affine:a=" << p1_ << ",b=" << p2_; break;
        case Family::Custom: os << "custom:" << custom_name_; break;
    }
    return os.str();
}

namespace {

double eval_qapm(double p, double alpha, double x) {
    if (std::abs(p) < kPCut) return std::pow(x, alpha);
    if (p == 1.0) return (1.0 - alpha) + alpha * x;
    if (p == -1.0) return 1.0 / ((1.0 - alpha) + alpha / x);
    // (1 + alpha*(x^p - 1))^(1/p) through expm1/log1p; stays accurate for
    // small |p| and x near 1
    double e = std::expm1(p * std::log(x));
    return std::exp(std::log1p(alpha * e) / p);
}

double eval_sym(double r, double x) {
    if (x == 1.0) return 1.0;
    if (std::abs(r - 1.0 / 3.0) < kRCut) {
        // logarithmic-mean representative (x-1)/ln x
        double u = x - 1.0;
        return u / std::log1p(u);
    }
    if (std::abs(r + 1.0 / 3.0) < kRCut) {
        // its adjoint x*ln x/(x-1)
        double u = x - 1.0;
        return x * std::log1p(u) / u;
    }
    const double a = 0.5 * (3.0 * r + 1.0);
    const double b = 0.5 * (3.0 * r - 1.0);
    const double L = std::log(x);
    if (std::abs(x - 1.0) < kXCut) {
        // second-order ratio expansion in ln x around x = 1
        double au = a * L, bu = b * L;
        return (1.0 + 0.5 * au + au * au / 6.0) / (1.0 + 0.5 * bu + bu * bu / 6.0);
    }
    return (b / a) * std::expm1(a * L) / std::expm1(b * L);
}

}  // namespace

double eval(const ScalarFunctionSpec& f, double x) {
    if (!(x > f.domain_min()) && !(x == f.domain_min() && !f.domain_open()))
        throw DomainError("eval(" + f.to_string() + "): argument " + std::to_string(x) +
                          " outside domain");
    switch (f.family()) {
        case ScalarFunctionSpec::Family::Power: {
            double a = f.p1_;
            if (a == 0.0) return 1.0;
            if (a == 1.0) return x;
            if (a == -1.0) return 1.0 / x;
            if (a == 0.5) return std::sqrt(x);
            if (a == 2.0) return x * x;
            return std::pow(x, a);
        }
        case ScalarFunctionSpec::Family::LogShift:
            return std::log1p(x);
        case ScalarFunctionSpec::Family::QapmRep:
            return eval_qapm(f.p1_, f.p2_, x);
        case ScalarFunctionSpec::Family::SymRep:
            return eval_sym(f.p1_, x);
        case ScalarFunctionSpec::Family::Dual:
            return 1.0 / eval(*f.inner_, 1.0 / x);
        case ScalarFunctionSpec::Family::Affine:
            return f.p1_ + f.p2_ * x;
        case ScalarFunctionSpec::Family::Custom:
            return f.custom_fn_(x);
    }
    throw Error("eval: unreachable");
}

ScalarFunctionSpec dualize(const ScalarFunctionSpec& f) {
    switch (f.family()) {
        case ScalarFunctionSpec::Family::Power:
            return f;  // 1/(1/x)^a = x^a
        case ScalarFunctionSpec::Family::QapmRep:
            // 1/f_{p,a}(1/x) = f_{-p,a}(x)
            return ScalarFunctionSpec::qapm_rep(-f.p1_, f.p2_);
        case ScalarFunctionSpec::Family::SymRep:
            // g_r*(x) = x/g_r(x) = g_{-r}(x)
            return ScalarFunctionSpec::sym_rep(-f.p1_);
        case ScalarFunctionSpec::Family::Dual:
            return *f.inner_;  // (f*)* = f
        default: {
            ScalarFunctionSpec d;
            d.family_ = ScalarFunctionSpec::Family::Dual;
            d.inner_ = std::make_shared<ScalarFunctionSpec>(f);
            return d;
        }
    }
}

double derivative(const ScalarFunctionSpec& f, double x) {
    const double h = x * std::cbrt(std::numeric_limits<double>::epsilon());
    if (h == 0.0 || x - h <= f.domain_min())
        throw DomainError("derivative: step underflow at x=" + std::to_string(x));
    const double xp = x + h, xm = x - h;
    return (eval(f, xp) - eval(f, xm)) / (xp - xm);
}

bool is_symmetric_rep(const ScalarFunctionSpec& f, int sample_count) {
    if (sample_count < 1) throw DomainError("is_symmetric_rep: sample_count must be >= 1");
    for (int i = 0; i < sample_count; ++i) {
        double e = sample_count == 1 ? 0.0 : -3.0 + 6.0 * i / (sample_count - 1.0);
        double x = std::pow(10.0, e);
        double lhs = eval(f, x);
        double rhs = x * eval(f, 1.0 / x);
        if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs))) return false;
    }
    return true;
}

namespace {

std::map<std::string, double> parse_kv(const std::string& text, const std::string& ctx) {
    std::map<std::string, double> kv;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError(ctx + ": expected key=value, got '" + item + "'");
        std::string key = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        try {
            size_t pos = 0;
            double v = std::stod(val, &pos);
            if (pos != val.size()) throw std::invalid_argument(val);
            kv[key] = v;
        } catch (const std::exception&) {
            throw ParseError(ctx + ": bad numeric value '" + val + "'");
        }
    }
    return kv;
}

double take(std::map<std::string, double>& kv, const std::string& key, const std::string& ctx) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(ctx + ": missing parameter '" + key + "'");
    double v = it->second;
    kv.erase(it);
    return v;
}

void expect_empty(const std::map<std::string, double>& kv, const std::string& ctx) {
    if (!kv.empty()) throw ParseError(ctx + ": unknown parameter '" + kv.begin()->first + "'");
}

}  // namespace

ScalarFunctionSpec parse_function(const std::string& text) {
    if (text.empty()) throw ParseError("function spec: empty string");
    if (text.rfind("dual(", 0) == 0) {
        if (text.back() != ')') throw ParseError("function spec: missing ')' in '" + text + "'");
        return dualize(parse_function(text.substr(5, text.size() - 6)));
    }
    std::string head = text, args;
    auto colon = text.find(':');
    if (colon != std::string::npos) {
        head = text.substr(0, colon);
        args = text.substr(colon + 1);
    }
    auto kv = parse_kv(args, "function spec '" + text + "'");
    const std::string ctx = "function spec '" + text + "'";
    try {
        if (head == "power") {
            double a = take(kv, "a", ctx);
            expect_empty(kv, ctx);
            return ScalarFunctionSpec::power(a);
        }
        if (head == "logshift") {
            expect_empty(kv, ctx);
            return ScalarFunctionSpec::logshift();
        }
        if (head == "qapm") {
            double p = take(kv, "p", ctx);
            double a = take(kv, "a", ctx);
            expect_empty(kv, ctx);
            return ScalarFunctionSpec::qapm_rep(p, a);
        }
        if (head == "sym") {
            double r = take(kv, "r", ctx);
            expect_empty(kv, ctx);
            return ScalarFunctionSpec::sym_rep(r);
        }
        if (head == "affine") {
            double a = take(kv, "a", ctx);
            double b = take(kv, "b", ctx);
            expect_empty(kv, ctx);
            return ScalarFunctionSpec::affine(a, b);
        }
    } catch (const DomainError& e) {
        throw ParseError(ctx + ": " + e.what());
    }
    throw ParseError("function spec: unknown family '" + head + "'");
}

}  // namespace opmeans

#include "opmeans/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "opmeans/spectral.hpp"

namespace opmeans {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double min_eig(const HermitianMatrix& M) { return eigh(M).eigenvalues.front(); }

// lambda_min(rhs - lhs) / max(1, ||lhs||, ||rhs||)
double margin_leq(const HermitianMatrix& lhs, const HermitianMatrix& rhs) {
    double scale = std::max({1.0, opnorm(lhs), opnorm(rhs)});
    return min_eig(rhs - lhs) / scale;
}

double margin_geq(const HermitianMatrix& lhs, const HermitianMatrix& rhs) {
    return margin_leq(rhs, lhs);
}

std::vector<double> diag_points(const HermitianMatrix& B) {
    std::vector<double> pts(B.dim());
    for (int i = 0; i < B.dim(); ++i) pts[i] = B.entry(i, i).real();
    return pts;
}

}  // namespace

void ClassifierConfig::validate() const {
    if (trials_per_dim < 1) throw DomainError("ClassifierConfig: trials_per_dim must be >= 1");
    if (dims.empty()) throw DomainError("ClassifierConfig: dims must be nonempty");
    if (loewner_points < 2) throw DomainError("ClassifierConfig: loewner_points must be >= 2");
    for (double t : t_grid)
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("ClassifierConfig: t_grid must lie in [0,1]");
}

std::string to_string(ClassLabel label) {
    switch (label) {
        case ClassLabel::OmiConsistent: return "OMI-consistent";
        case ClassLabel::OmdConsistent: return "OMD-consistent";
        case ClassLabel::Neither: return "NEITHER";
        case ClassLabel::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

const std::vector<double>& symmetric_r_grid() {
    static const std::vector<double> grid{-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0,
                                          2.0 / 3.0, 1.0};
    return grid;
}

HermitianMatrix loewner_matrix(const ScalarFunctionSpec& f, const std::vector<double>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 1) throw DomainError("loewner_matrix: need at least one point");
    for (int i = 0; i < n; ++i) {
        if (!(points[i] > 0.0)) throw DomainError("loewner_matrix: points must be positive");
        if (i > 0 && !(points[i] > points[i - 1]))
            throw DomainError("loewner_matrix: points must be strictly ascending (no duplicates)");
    }
    std::vector<double> fv(n);
    for (int i = 0; i < n; ++i) fv[i] = eval(f, points[i]);
    CMatrix L(n);
    for (int i = 0; i < n; ++i) {
        L(i, i) = cx(derivative(f, points[i]), 0.0);
        for (int j = i + 1; j < n; ++j) {
            double d = (fv[i] - fv[j]) / (points[i] - points[j]);
            L(i, j) = cx(d, 0.0);
            L(j, i) = cx(d, 0.0);
        }
    }
    return HermitianMatrix(L);
}

double test_inequality(const std::string& id, const ScalarFunctionSpec& f,
                       const HermitianMatrix& A, const HermitianMatrix& B, double t,
                       double tol_rel) {
    (void)tol_rel;
    if (id == "loewner" || id == "loewner-dec") {
        HermitianMatrix L = loewner_matrix(f, diag_points(B));
        double scale = std::max(1.0, opnorm(L));
        SpectralDecomposition d = eigh(L);
        // "loewner": L itself PSD (increasing side); "loewner-dec": -L PSD
        return (id == "loewner" ? d.eigenvalues.front() : -d.eigenvalues.back()) / scale;
    }
    if (id == "monotone") {
        // caller guarantees A <= B; margin of f(A) <= f(B)
        return margin_leq(apply(f, A), apply(f, B));
    }

    HermitianMatrix fA = apply(f, A);
    HermitianMatrix fB = apply(f, B);
    auto harm_at = [&](double tt) { return evaluate(MeanSpec::harm(tt), A, B); };
    auto sweep_sym = [&](const HermitianMatrix& lhs, bool leq) {
        double worst = 1e300;
        for (double r : symmetric_r_grid()) {
            HermitianMatrix rhs = evaluate(MeanSpec::sym(r), fA, fB);
            worst = std::min(worst, leq ? margin_leq(lhs, rhs) : margin_geq(lhs, rhs));
        }
        return worst;
    };

    if (id == "I2" || id == "I3") {
        double tt = (id == "I2") ? 0.5 : t;
        HermitianMatrix lhs = apply(f, evaluate(MeanSpec::arith(tt), A, B));
        return margin_geq(lhs, evaluate(MeanSpec::arith(tt), fA, fB));
    }
    if (id == "I4" || id == "I5") {
        double tt = (id == "I4") ? 0.5 : t;
        HermitianMatrix lhs = apply(f, harm_at(tt));
        return margin_leq(lhs, evaluate(MeanSpec::geom(tt), fA, fB));
    }
    if (id == "I6" || id == "I7") {
        double tt = (id == "I6") ? 0.5 : t;
        HermitianMatrix lhs = apply(f, harm_at(tt));
        return margin_leq(lhs, evaluate(MeanSpec::harm(tt), fA, fB));
    }
    if (id == "I8") return sweep_sym(apply(f, harm_at(0.5)), true);
    if (id == "I9") {
        // one fixed symmetric mean != arithmetic
        HermitianMatrix lhs = apply(f, harm_at(0.5));
        return margin_leq(lhs, evaluate(MeanSpec::sym(0.0), fA, fB));
    }
    if (id == "D2" || id == "D3") {
        double tt = (id == "D2") ? 0.5 : t;
        HermitianMatrix lhs = apply(f, harm_at(tt));
        return margin_geq(lhs, evaluate(MeanSpec::geom(tt), fA, fB));
    }
    if (id == "D4" || id == "D5") {
        double tt = (id == "D4") ? 0.5 : t;
        HermitianMatrix lhs = apply(f, harm_at(tt));
        return margin_geq(lhs, evaluate(MeanSpec::harm(tt), fA, fB));
    }
    if (id == "D6") return sweep_sym(apply(f, harm_at(0.5)), false);
    if (id == "D7") {
        // one fixed symmetric mean != harmonic
        HermitianMatrix lhs = apply(f, harm_at(0.5));
        return margin_geq(lhs, evaluate(MeanSpec::sym(1.0 / 3.0), fA, fB));
    }
    throw DomainError("test_inequality: unknown inequality id '" + id + "'");
}

double replay_violation(const CounterexampleRecord& rec, double tol_rel) {
    ScalarFunctionSpec f = parse_function(rec.function_spec);
    return test_inequality(rec.inequality_id, f, rec.A, rec.B, rec.t, tol_rel);
}

namespace {

// custom hooks have no parseable spec, so their records are re-evaluated with
// the live function instead of round-tripping through parse_function
double replay_or_reeval(const ScalarFunctionSpec& f, const CounterexampleRecord& rec,
                        double tol_rel) {
    if (f.is_custom()) return test_inequality(rec.inequality_id, f, rec.A, rec.B, rec.t, tol_rel);
    return replay_violation(rec, tol_rel);
}

struct TrialContext {
    const ClassifierConfig& cfg;
    Verdict& v;
    bool found = false;
};

// updates evidence; confirms and stores a certificate when the margin is a
// genuine violation
void note_margin(TrialContext& ctx, const std::string& id, const ScalarFunctionSpec& f,
                 const HermitianMatrix& A, const HermitianMatrix& B, double t, double margin,
                 std::uint64_t seed) {
    EvidenceItem& e = ctx.v.evidence[id];
    e.trials++;
    if (margin >= -ctx.cfg.tol_rel) e.passes++;
    e.worst_margin = std::min(e.worst_margin, margin);
    e.best_margin = std::max(e.best_margin, margin);
    if (margin < -ctx.cfg.margin) {
        CounterexampleRecord rec{id, f.to_string(), A, B, {}, t, margin, seed};
        double replayed = replay_or_reeval(f, rec, ctx.cfg.tol_rel);
        if (std::abs(replayed - margin) <= 1e-10) {
            ctx.v.certificates.push_back(std::move(rec));
            ctx.found = true;
        }
    }
}

std::vector<double> draw_loewner_points(Rng& rng, int count) {
    std::vector<double> pts;
    while (static_cast<int>(pts.size()) < count) {
        pts.clear();
        for (int i = 0; i < count; ++i) pts.push_back(rng.log_uniform_pow10(-2.0, 2.0));
        std::sort(pts.begin(), pts.end());
        bool ok = true;
        for (int i = 1; i < count; ++i)
            if (pts[i] - pts[i - 1] < 1e-9 * pts[i]) ok = false;
        if (!ok) pts.clear();
    }
    return pts;
}

std::vector<double> trial_ts(const ClassifierConfig& cfg, Rng& rng) {
    std::vector<double> ts = cfg.t_grid;
    for (int i = 0; i < 3; ++i) ts.push_back(rng.uniform());
    return ts;
}

// nonincreasing / nondecreasing scan on a 64-point log grid
struct ScalarDirection {
    bool evaluable = true;
    bool nondecreasing = true;
    bool nonincreasing = true;
};

ScalarDirection scan_direction(const ScalarFunctionSpec& f) {
    ScalarDirection d;
    try {
        double prev = eval(f, 1e-2);
        for (int i = 1; i < 64; ++i) {
            double x = std::pow(10.0, -2.0 + 4.0 * i / 63.0);
            double cur = eval(f, x);
            double tol = 1e-12 * (1.0 + std::abs(prev) + std::abs(cur));
            if (cur < prev - tol) d.nondecreasing = false;
            if (cur > prev + tol) d.nonincreasing = false;
            prev = cur;
        }
    } catch (const DomainError&) {
        d.evaluable = false;
    }
    return d;
}

}  // namespace

Verdict classify(const ScalarFunctionSpec& f, const ClassifierConfig& cfg) {
    cfg.validate();
    Verdict v;
    ScalarDirection dir = scan_direction(f);
    if (!dir.evaluable) {
        v.domain_failures++;
        v.label = ClassLabel::Inconclusive;
        return v;
    }
    const bool try_omi = dir.nondecreasing || !dir.nonincreasing;
    const bool try_omd = dir.nonincreasing || !dir.nondecreasing;
    const ScalarFunctionSpec fdual = dualize(f);

    TrialContext ctx{cfg, v};
    for (int dim : cfg.dims) {
        for (int trial = 0; trial < cfg.trials_per_dim && !ctx.found; ++trial) {
            std::uint64_t seed = derive_seed(
                cfg.seed, {0xc1a55ULL, static_cast<std::uint64_t>(dim),
                           static_cast<std::uint64_t>(trial)});
            Rng rng(seed);
            try {
                HermitianMatrix A = random_pd(dim, -2.0, 2.0, rng.next());
                HermitianMatrix B = random_pd(dim, -2.0, 2.0, rng.next());
                std::vector<double> ts = trial_ts(cfg, rng);

                if (try_omi) {
                    std::vector<double> pts = draw_loewner_points(rng, cfg.loewner_points);
                    HermitianMatrix L = loewner_matrix(f, pts);
                    HermitianMatrix P = HermitianMatrix::diagonal(pts);
                    note_margin(ctx, "loewner", f, L, P, 0.0,
                                test_inequality("loewner", f, L, P, 0.0, cfg.tol_rel), seed);
                    for (double t : ts) {
                        if (ctx.found) break;
                        note_margin(ctx, "I7", f, A, B, t,
                                    test_inequality("I7", f, A, B, t, cfg.tol_rel), seed);
                        note_margin(ctx, "I3", f, A, B, t,
                                    test_inequality("I3", f, A, B, t, cfg.tol_rel), seed);
                    }
                    // duality cross-check: f* must mirror f
                    if (!ctx.found && trial % 4 == 0)
                        note_margin(ctx, "I7", fdual, A, B, 0.5,
                                    test_inequality("I7", fdual, A, B, 0.5, cfg.tol_rel), seed);
                }
                if (try_omd && !ctx.found) {
                    note_margin(ctx, "D4", f, A, B, 0.5,
                                test_inequality("D4", f, A, B, 0.5, cfg.tol_rel), seed);
                    for (double t : ts) {
                        if (ctx.found) break;
                        note_margin(ctx, "D5", f, A, B, t,
                                    test_inequality("D5", f, A, B, t, cfg.tol_rel), seed);
                        note_margin(ctx, "D3", f, A, B, t,
                                    test_inequality("D3", f, A, B, t, cfg.tol_rel), seed);
                    }
                    if (!ctx.found) {
                        std::vector<double> pts = draw_loewner_points(rng, cfg.loewner_points);
                        HermitianMatrix L = loewner_matrix(f, pts);
                        HermitianMatrix P = HermitianMatrix::diagonal(pts);
                        note_margin(ctx, "loewner-dec", f, L, P, 0.0,
                                    test_inequality("loewner-dec", f, L, P, 0.0, cfg.tol_rel),
                                    seed);
                    }
                    if (!ctx.found && trial % 4 == 0)
                        note_margin(ctx, "D4", fdual, A, B, 0.5,
                                    test_inequality("D4", fdual, A, B, 0.5, cfg.tol_rel), seed);
                }
            } catch (const DomainError&) {
                v.domain_failures++;
            } catch (const ConvergenceError&) {
                v.domain_failures++;
            }
        }
        if (ctx.found) break;
    }

    if (!v.certificates.empty()) {
        v.label = ClassLabel::Neither;
        return v;
    }

    auto all_pass = [&](std::initializer_list<const char*> ids) {
        for (const char* id : ids) {
            auto it = v.evidence.find(id);
            if (it == v.evidence.end() || it->second.trials == 0) return false;
            if (it->second.passes != it->second.trials) return false;
        }
        return true;
    };

    bool omi_ok = try_omi && all_pass({"loewner", "I7", "I3"}) &&
                  v.evidence["I3"].best_margin > cfg.margin;
    bool omd_ok = try_omd && dir.nonincreasing && all_pass({"D4", "D5", "D3", "loewner-dec"});
    if (omi_ok)
        v.label = ClassLabel::OmiConsistent;
    else if (omd_ok)
        v.label = ClassLabel::OmdConsistent;
    else
        v.label = ClassLabel::Inconclusive;
    return v;
}

std::optional<CounterexampleRecord> find_counterexample(const std::string& id,
                                                        const ScalarFunctionSpec& f,
                                                        const ClassifierConfig& cfg) {
    cfg.validate();
    for (int dim : cfg.dims) {
        for (int trial = 0; trial < cfg.trials_per_dim; ++trial) {
            std::uint64_t seed =
                derive_seed(cfg.seed, {fnv1a(id), static_cast<std::uint64_t>(dim),
                                       static_cast<std::uint64_t>(trial)});
            Rng rng(seed);
            try {
                if (id == "loewner" || id == "loewner-dec") {
                    std::vector<double> pts = draw_loewner_points(rng, cfg.loewner_points);
                    HermitianMatrix L = loewner_matrix(f, pts);
                    HermitianMatrix P = HermitianMatrix::diagonal(pts);
                    double m = test_inequality(id, f, L, P, 0.0, cfg.tol_rel);
                    if (m < -cfg.margin) {
                        CounterexampleRecord rec{id, f.to_string(), L, P, {}, 0.0, m, seed};
                        if (std::abs(replay_or_reeval(f, rec, cfg.tol_rel) - m) <= 1e-10) return rec;
                    }
                    continue;
                }
                if (id == "monotone") {
                    HermitianMatrix A = random_pd(dim, -2.0, 2.0, rng.next());
                    HermitianMatrix B = A + random_pd(dim, -2.0, 1.0, rng.next());
                    double m = test_inequality(id, f, A, B, 0.0, cfg.tol_rel);
                    if (m < -cfg.margin) {
                        CounterexampleRecord rec{id, f.to_string(), A, B, {}, 0.0, m, seed};
                        if (std::abs(replay_or_reeval(f, rec, cfg.tol_rel) - m) <= 1e-10) return rec;
                    }
                    continue;
                }
                HermitianMatrix A = random_pd(dim, -2.0, 2.0, rng.next());
                HermitianMatrix B = random_pd(dim, -2.0, 2.0, rng.next());
                for (double t : trial_ts(cfg, rng)) {
                    double m = test_inequality(id, f, A, B, t, cfg.tol_rel);
                    if (m < -cfg.margin) {
                        CounterexampleRecord rec{id, f.to_string(), A, B, {}, t, m, seed};
                        if (std::abs(replay_or_reeval(f, rec, cfg.tol_rel) - m) <= 1e-10) return rec;
                    }
                }
            } catch (const DomainError&) {
            } catch (const ConvergenceError&) {
            }
        }
    }
    return std::nullopt;
}

std::string record_to_json(const CounterexampleRecord& rec) {
    nlohmann::ordered_json j;
    j["inequality_id"] = rec.inequality_id;
    j["function"] = rec.function_spec;
    j["A"] = nlohmann::ordered_json::parse(matrix_to_json(rec.A));
    j["B"] = nlohmann::ordered_json::parse(matrix_to_json(rec.B));
    if (rec.C) j["C"] = nlohmann::ordered_json::parse(matrix_to_json(*rec.C));
    j["t"] = rec.t;
    j["violation"] = rec.violation;
    j["seed_path"] = rec.seed_path;
    return j.dump();
}

std::string verdict_to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["label"] = to_string(v.label);
    j["domain_failures"] = v.domain_failures;
    nlohmann::ordered_json ev = nlohmann::ordered_json::object();
    for (const auto& [id, e] : v.evidence) {
        ev[id] = {{"trials", e.trials},
                  {"passes", e.passes},
                  {"worst_margin", e.worst_margin},
                  {"best_margin", e.best_margin}};
    }
    j["evidence"] = ev;
    nlohmann::ordered_json certs = nlohmann::ordered_json::array();
    for (const auto& rec : v.certificates)
        certs.push_back(nlohmann::ordered_json::parse(record_to_json(rec)));
    j["certificates"] = certs;
    return j.dump(2);
}

}  // namespace opmeans

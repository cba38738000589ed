// Command-line front end: mean evaluation, operator-monotonicity
// classification, verification suite, and report diffing. stdout carries JSON
// only; diagnostics go to stderr. Exit codes: 0 success, 1 parse/usage error,
// 2 domain error, 3 classified NEITHER, 4 INCONCLUSIVE.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "opmeans/classifier.hpp"
#include "opmeans/means.hpp"
#include "opmeans/verify.hpp"

namespace {

using namespace opmeans;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write file: " + out_path);
    out << text << "\n";
}

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        int d = 0;
        try {
            d = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            throw ParseError("bad dimension: '" + tok + "'");
        }
        if (pos != tok.size() || d < 1) throw ParseError("bad dimension: '" + tok + "'");
        dims.push_back(d);
    }
    if (dims.empty()) throw ParseError("empty dims list");
    return dims;
}

int cmd_mean(const std::string& spec, const std::string& a_path, const std::string& b_path,
             std::optional<double> t, bool psd, int eps_rungs, double tol,
             const std::string& out_path) {
    MeanSpec m = [&] {
        if (t) {
            try {
                return parse_mean(spec + ":t=" + std::to_string(*t));
            } catch (const ParseError&) {
                // spec already carries its parameters; fall through
            }
        }
        return parse_mean(spec);
    }();
    HermitianMatrix A = matrix_from_json_text(read_file(a_path));
    HermitianMatrix B = matrix_from_json_text(read_file(b_path));

    HermitianMatrix result;
    if (psd) {
        double scale = std::max({1.0, opnorm(A), opnorm(B)});
        std::vector<double> ladder;
        for (int k = 0; k <= eps_rungs; ++k) ladder.push_back(std::ldexp(scale, -k));
        result = evaluate_psd(m, A, B, ladder, tol > 0 ? tol : 1e-9).value;
    } else {
        result = evaluate(m, A, B);
    }
    write_output(matrix_to_json(result), out_path);
    return 0;
}

int cmd_classify(const std::string& spec, const ClassifierConfig& cfg,
                 const std::string& out_path) {
    ScalarFunctionSpec f = parse_function(spec);
    cfg.validate();
    Verdict v = classify(f, cfg);
    write_output(verdict_to_json(v), out_path);
    switch (v.label) {
        case ClassLabel::OmiConsistent:
        case ClassLabel::OmdConsistent: return 0;
        case ClassLabel::Neither: return 3;
        case ClassLabel::Inconclusive: return 4;
    }
    return 4;
}

int cmd_verify(const VerifyConfig& cfg, const std::string& out_path) {
    cfg.validate();
    VerificationReport report = run_all(cfg);
    write_output(report_to_json(report), out_path);
    bool ok = report.all_positive_controls_pass();
    if (!ok) std::cerr << "verify: positive-control violations present\n";
    return ok ? 0 : 2;
}

int cmd_report_diff(const std::string& path_a, const std::string& path_b) {
    std::vector<std::string> diffs = report_diff(read_file(path_a), read_file(path_b));
    nlohmann::ordered_json j = diffs;
    std::cout << j.dump(2) << "\n";
    return diffs.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator means, monotonicity classification and verification"};
    app.require_subcommand(1);

    // mean
    auto* mean_cmd = app.add_subcommand("mean", "evaluate A sigma B");
    std::string mean_spec, a_path, b_path, mean_out;
    std::optional<double> t_flag;
    bool psd = false;
    int eps_rungs = 40;
    double mean_tol = 1e-9;
    mean_cmd->add_option("spec", mean_spec, "mean spec, e.g. geom:t=0.5")->required();
    mean_cmd->add_option("A", a_path, "matrix JSON file")->required();
    mean_cmd->add_option("B", b_path, "matrix JSON file")->required();
    mean_cmd->add_option("--t", t_flag, "weight for bare family names, e.g. 'geom' --t 0.5");
    mean_cmd->add_flag("--psd", psd, "allow PSD inputs via the epsilon ladder");
    mean_cmd->add_option("--eps-rungs", eps_rungs, "ladder length (default 40)");
    mean_cmd->add_option("--tol", mean_tol, "ladder stopping tolerance");
    mean_cmd->add_option("--out", mean_out, "output path (default stdout)");

    // classify
    auto* cls_cmd = app.add_subcommand("classify", "classify a scalar function");
    std::string cls_spec, cls_dims = "2,3,5", cls_out;
    ClassifierConfig ccfg;
    cls_cmd->add_option("spec", cls_spec, "function spec, e.g. power:a=0.5")->required();
    cls_cmd->add_option("--dims", cls_dims, "comma-separated dimensions");
    cls_cmd->add_option("--trials", ccfg.trials_per_dim, "trials per dimension");
    cls_cmd->add_option("--seed", ccfg.seed, "random seed");
    cls_cmd->add_option("--tol", ccfg.tol_rel, "relative tolerance");
    cls_cmd->add_option("--out", cls_out, "output path (default stdout)");

    // verify
    auto* ver_cmd = app.add_subcommand("verify", "run the verification suite");
    std::string ver_dims = "2,3,5", ver_out;
    VerifyConfig vcfg;
    ver_cmd->add_option("--dims", ver_dims, "comma-separated dimensions");
    ver_cmd->add_option("--trials", vcfg.trials, "trials per (check, dim, parameter point)");
    ver_cmd->add_option("--seed", vcfg.seed, "random seed");
    ver_cmd->add_option("--tol", vcfg.tol_rel, "relative tolerance");
    ver_cmd->add_option("--threads", vcfg.threads, "worker threads (0 = hardware)");
    ver_cmd->add_option("--out", ver_out, "output path (default stdout)");

    // report-diff
    auto* diff_cmd = app.add_subcommand("report-diff", "compare two reports, ignoring timing");
    std::string diff_a, diff_b;
    diff_cmd->add_option("A", diff_a, "report JSON file")->required();
    diff_cmd->add_option("B", diff_b, "report JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // help/version exit 0, everything else is usage error
    }

    try {
        if (*mean_cmd) return cmd_mean(mean_spec, a_path, b_path, t_flag, psd, eps_rungs,
                                       mean_tol, mean_out);
        if (*cls_cmd) {
            ccfg.dims = parse_dims(cls_dims);
            return cmd_classify(cls_spec, ccfg, cls_out);
        }
        if (*ver_cmd) {
            vcfg.dims = parse_dims(ver_dims);
            return cmd_verify(vcfg, ver_out);
        }
        if (*diff_cmd) return cmd_report_diff(diff_a, diff_b);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const LadderError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

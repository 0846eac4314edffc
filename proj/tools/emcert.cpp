#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "emcert/emcert.hpp"

namespace {

using namespace emcert;

constexpr double kOracleAgreementTol = 1e-7;

// shortest round-trip decimal, same formatting as the JSON documents
std::string num(double v) { return Json(v).dump(); }
std::string vec(const Vector& v) { return Json(v).dump(); }

std::string derive_path(const std::string& base, const char* ext) {
    std::filesystem::path p(base);
    p.replace_extension(ext);
    return p.string();
}

// one refinement round: midpoints double the density, the appended top
// level doubles the range
Vector refine_levels(Vector levels) {
    const std::size_t n = levels.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        levels.push_back((levels[i] + levels[i + 1]) / 2.0);
    levels.push_back(levels[n - 1] > 0.0 ? 2.0 * levels[n - 1] : 1.0);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
}

struct CertifyConfig {
    std::string input, out;
    double tol = 1e-9;
    std::string mode = "paper-form";
    int refine = 0;
    bool dump_table = false;
};

int run_certify(const CertifyConfig& cfg) {
    const ProblemInput p = parse_problem(read_json_file(cfg.input));
    const FitMode mode =
        cfg.mode == "unconstrained" ? FitMode::Unconstrained : FitMode::PaperForm;

    const bool lattice_input =
        p.candidate.kind != FunctionKind::Table && p.levels.has_value();
    if (cfg.refine > 0 && !lattice_input)
        throw InputError("--refine requires a lattice grid (input.grid.levels)");

    const std::string out_path =
        cfg.out.empty() ? derive_path(cfg.input, ".verdict.json") : cfg.out;

    Json rounds = Json::array();
    std::optional<Verdict> verdict;
    std::optional<GridFunction> grid;
    Vector levels = p.levels.value_or(Vector{});
    const int total_rounds = lattice_input ? cfg.refine + 1 : 1;
    for (int r = 0; r < total_rounds; ++r) {
        if (r > 0) levels = refine_levels(levels);
        grid = lattice_input
                   ? sample_on_grid(p.candidate, lattice_grid(p.candidate.dimension, levels))
                   : problem_grid(p);
        verdict = certify(*grid, cfg.tol, mode);

        Json round_doc = to_json(*verdict);
        round_doc["grid_size"] = grid->size();
        if (lattice_input) round_doc["levels"] = levels;
        rounds.push_back(std::move(round_doc));

        std::cout << "round " << r << ": " << (verdict->pass ? "pass" : "fail")
                  << " (envelope at ones = " << num(verdict->envelope_value_at_one)
                  << ", " << grid->size() << " points)\n";
        if (!verdict->pass) break;
    }

    // For affine candidates the weight criterion w >= 0, sum w <= 1 decides
    // validity on the whole domain, not just the sampled grid.
    std::vector<std::string> notes;
    bool affine_invalid = false;
    Json weight_check;
    if (p.candidate.kind == FunctionKind::Affine) {
        double sum = 0.0, lo = 1e300;
        for (double wk : p.candidate.weights) {
            sum += wk;
            lo = std::min(lo, wk);
        }
        const bool valid = lo >= -1e-12 && sum <= 1.0 + 1e-12;
        affine_invalid = !valid;
        weight_check = Json{{"valid", valid}, {"weight_sum", sum}, {"min_weight", lo}};
        notes.push_back(valid
                            ? "affine weights lie in the valid class: the pass is a full-domain proof"
                            : "affine weights outside the valid class (w_k < 0 or sum w > 1): "
                              "invalid on the full domain regardless of sampled passes");
    }

    const bool pass = verdict->pass && !affine_invalid;
    Scope scope = verdict->scope;
    if (p.candidate.kind == FunctionKind::Affine)
        scope = Scope::FullDomain;  // the weight criterion settles either outcome

    Json doc{{"command", "certify"},
             {"input", cfg.input},
             {"tolerance", cfg.tol},
             {"mode", fit_mode_name(mode)},
             {"verdict", pass ? "pass" : "fail"},
             {"scope", scope_name(scope)},
             {"envelope_value_at_one", verdict->envelope_value_at_one},
             {"rounds", rounds}};
    for (const auto& n : verdict->notes) notes.push_back(n);
    if (!weight_check.is_null()) doc["affine_weight_check"] = weight_check;
    if (verdict->pass && verdict->dominator) doc["dominator"] = to_json(*verdict->dominator);
    if (verdict->certificate) {
        const std::string cert_path = derive_path(out_path, ".cert.json");
        write_json_file(cert_path, to_json(*verdict->certificate));
        doc["certificate_file"] = cert_path;
        std::cout << "certificate written to " << cert_path << "\n";
    } else if (affine_invalid) {
        notes.push_back(
            "no finite counterexample at the sampled resolutions; refine further to search");
    }
    if (cfg.dump_table) {
        const std::string table_path = derive_path(out_path, ".table.json");
        write_json_file(table_path, to_json(*grid));
        doc["table_file"] = table_path;
    }
    doc["notes"] = notes;
    write_json_file(out_path, doc);

    std::cout << "verdict: " << (pass ? "pass" : "fail") << " (" << scope_name(scope) << ")";
    if (pass && verdict->dominator)
        std::cout << ", dominator w = " << vec(verdict->dominator->weights)
                  << ", slack = " << num(verdict->dominator->slack);
    std::cout << "\nverdict written to " << out_path << "\n";
    return pass ? 0 : 3;
}

struct PathConfig {
    std::string input, out;
};

int run_envelope(const PathConfig& cfg) {
    const ProblemInput p = parse_problem(read_json_file(cfg.input));
    const GridFunction g = problem_grid(p);
    const Vector target = p.target.value_or(Vector(g.dimension, 1.0));
    const EnvelopeResult r = envelope_at(g, target);

    Json doc = to_json(r);
    doc["command"] = "envelope";
    for (auto& entry : doc["support"])
        entry["point"] = g.points[entry["index"].get<int>()];

    std::cout << "envelope at " << vec(target) << " = " << num(r.value) << "\n";
    for (int i = 0; i < r.n_support(); ++i)
        std::cout << "  q[" << r.support_indices[i]
                  << "] = " << num(r.support_weights[i]) << " at "
                  << vec(g.points[r.support_indices[i]]) << "\n";
    if (!cfg.out.empty()) write_json_file(cfg.out, doc);
    return 0;
}

struct VerifyConfig {
    std::string cert, candidate, out;
    double tol = 1e-9;
};

int run_verify(const VerifyConfig& cfg) {
    const Certificate c = certificate_from_json(read_json_file(cfg.cert));
    std::optional<CandidateFunction> f;
    if (!cfg.candidate.empty())
        f = parse_problem(read_json_file(cfg.candidate)).candidate;

    const VerificationReport rep = verify_certificate(c, f, cfg.tol);
    for (const auto& e : rep.entries)
        std::cout << (e.pass ? "[ ok ] " : "[FAIL] ") << e.name
                  << " (residual " << num(e.residual) << ", tolerance " << num(e.tolerance)
                  << ")\n";
    std::cout << "margin over 1: " << num(rep.margin) << "\n";
    if (!cfg.out.empty()) write_json_file(cfg.out, to_json(rep));
    return rep.all_pass() ? 0 : 3;
}

struct McConfig {
    std::string cert, candidate, out;
    long long draws = 100000;
    std::uint64_t seed = 0;
};

int run_mc(const McConfig& cfg) {
    const Certificate c = certificate_from_json(read_json_file(cfg.cert));
    std::optional<CandidateFunction> f;
    if (!cfg.candidate.empty())
        f = parse_problem(read_json_file(cfg.candidate)).candidate;

    const MonteCarloReport rep = monte_carlo_check(c, f, cfg.draws, cfg.seed);
    std::cout << "draws = " << rep.draws << ", seed = " << rep.seed << "\n";
    for (int k = 0; k < c.K; ++k)
        std::cout << "  E" << k + 1 << " mean = " << num(rep.evar_means[k]) << " (se "
                  << num(rep.evar_se[k]) << ")\n";
    std::cout << "  merged mean = " << num(rep.f_mean) << " (se " << num(rep.f_se)
              << "), certificate claims " << num(c.merged_expectation) << "\n";
    if (!cfg.out.empty()) write_json_file(cfg.out, to_json(rep));
    return 0;
}

int run_oracle(const PathConfig& cfg) {
    const ProblemInput p = parse_problem(read_json_file(cfg.input));
    const GridFunction g = problem_grid(p);
    const Vector target = p.target.value_or(Vector(g.dimension, 1.0));

    bool lp_feasible = true;
    double lp_value = 0.0;
    try {
        lp_value = envelope_at(g, target).value;
    } catch (const HullError&) {
        lp_feasible = false;
    }
    const BruteForceEnvelope bf = brute_force_envelope(g, target);

    Json doc{{"command", "oracle"},
             {"target", target},
             {"lp_feasible", lp_feasible},
             {"oracle_feasible", bf.feasible}};
    bool agree;
    if (lp_feasible != bf.feasible) {
        agree = false;
        std::cout << "feasibility mismatch: lp " << (lp_feasible ? "feasible" : "infeasible")
                  << ", oracle " << (bf.feasible ? "feasible" : "infeasible") << "\n";
    } else if (!lp_feasible) {
        agree = true;
        std::cout << "both report the target outside the hull\n";
    } else {
        const double diff = std::fabs(lp_value - bf.value);
        agree = diff <= kOracleAgreementTol;
        doc["lp_value"] = lp_value;
        doc["oracle_value"] = bf.value;
        doc["difference"] = diff;
        std::cout << "lp = " << num(lp_value) << ", oracle = " << num(bf.value)
                  << ", difference = " << num(diff) << "\n";
    }
    doc["agreement"] = agree;
    if (!cfg.out.empty()) write_json_file(cfg.out, doc);
    std::cout << (agree ? "agreement" : "DISAGREEMENT") << "\n";
    return agree ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certification toolkit for e-value merging functions"};
    app.require_subcommand(1);

    CertifyConfig certify_cfg;
    auto* c_certify = app.add_subcommand(
        "certify", "decide validity of a sampled candidate merging function");
    c_certify->add_option("input", certify_cfg.input, "problem JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    c_certify->add_option("--tolerance", certify_cfg.tol, "verdict threshold over 1")
        ->check(CLI::Range(1e-12, 1e-3));
    c_certify->add_option("--mode", certify_cfg.mode, "dominator fit class")
        ->check(CLI::IsMember({"paper-form", "unconstrained"}));
    c_certify->add_option("--refine", certify_cfg.refine, "lattice-doubling rounds")
        ->check(CLI::Range(0, 10));
    c_certify->add_option("--out", certify_cfg.out, "verdict file path");
    c_certify->add_flag("--dump-table", certify_cfg.dump_table,
                        "also write the sampled table for external plotting");

    PathConfig envelope_cfg;
    auto* c_envelope =
        app.add_subcommand("envelope", "evaluate the concave envelope at a target");
    c_envelope->add_option("input", envelope_cfg.input, "problem JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    c_envelope->add_option("--out", envelope_cfg.out, "result file path");

    VerifyConfig verify_cfg;
    auto* c_verify =
        app.add_subcommand("verify-cert", "re-check a counterexample certificate");
    c_verify->add_option("cert", verify_cfg.cert, "certificate JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    c_verify->add_option("--candidate", verify_cfg.candidate,
                         "problem JSON to cross-check f_values against");
    c_verify->add_option("--tolerance", verify_cfg.tol, "required margin over 1")
        ->check(CLI::Range(1e-12, 1e-3));
    c_verify->add_option("--out", verify_cfg.out, "report file path");

    McConfig mc_cfg;
    auto* c_mc = app.add_subcommand("mc", "Monte-Carlo spot check of a certificate");
    c_mc->add_option("cert", mc_cfg.cert, "certificate JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    c_mc->add_option("--candidate", mc_cfg.candidate, "problem JSON supplying the closed form");
    c_mc->add_option("--draws", mc_cfg.draws, "number of draws")->check(CLI::PositiveNumber);
    c_mc->add_option("--seed", mc_cfg.seed, "generator seed (mt19937_64)");
    c_mc->add_option("--out", mc_cfg.out, "report file path");

    PathConfig oracle_cfg;
    auto* c_oracle = app.add_subcommand(
        "oracle", "compare the LP envelope against the exhaustive reference");
    c_oracle->add_option("input", oracle_cfg.input, "problem JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    c_oracle->add_option("--out", oracle_cfg.out, "report file path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_certify->parsed()) return run_certify(certify_cfg);
        if (c_envelope->parsed()) return run_envelope(envelope_cfg);
        if (c_verify->parsed()) return run_verify(verify_cfg);
        if (c_mc->parsed()) return run_mc(mc_cfg);
        if (c_oracle->parsed()) return run_oracle(oracle_cfg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

// cubature: command-line front end.
//
// Exit codes: 0 success, 2 a check failed, 1 usage or configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "cubature/config.hpp"
#include "cubature/error.hpp"
#include "cubature/estimator.hpp"
#include "cubature/io.hpp"
#include "cubature/meshes_walks.hpp"

using namespace cubature;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCheckFailed = 2;

struct Globals {
    unsigned workers = 1;
};

/// Writes to --out when given, otherwise stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ContractViolation("cannot write '" + path + "'");
        }
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_header(std::ostream& os, const std::string& command, const Json& config) {
    os << "# cubature " << CUBATURE_VERSION << ' ' << command << " config=" << config.dump() << '\n';
}

std::string fmt(double v) { return format_double(v); }

const Json& need_key(const Json& j, const char* key) {
    if (!j.contains(key)) throw ContractViolation(std::string("missing key '") + key + "'");
    return j.at(key);
}

// ---------------------------------------------------------------------------

struct SigArgs {
    std::string path;
    int m = 2;
    bool spatial = false;
    std::string out;
};

int run_sig(const SigArgs& a) {
    auto path = path_from_json(read_json_file(a.path));
    if (a.spatial && path.has_time_component()) path = path.spatial();
    const auto sig = signature(path, a.m);
    Sink sink(a.out);
    sink.out() << tensor_to_json(sig.series()).dump() << '\n';
    return kOk;
}

struct CheckArgs {
    std::string formula;
    int d = 1;
    int m = 3;
    std::string mode;
    std::size_t samples = 1'000'000;
    std::optional<std::uint64_t> seed;
    double tol = 1e-12;
    std::string time_letter = "auto";
    std::string out;
};

int run_cubecheck(const CheckArgs& a, const Globals& g) {
    const auto formula = formula_from_spec(a.formula, a.d);
    MomentCheckOptions opt;
    opt.m = a.m;
    const std::string mode = a.mode.empty() ? (formula.is_discrete() ? "exact" : "mc") : a.mode;
    if (mode != "exact" && mode != "mc") throw ContractViolation("--mode must be 'exact' or 'mc'");
    opt.mode = mode == "exact" ? MomentMode::exact : MomentMode::monte_carlo;
    opt.samples = a.samples;
    opt.seed = resolve_seed(a.seed);
    opt.tol = a.tol;
    opt.workers = g.workers;
    if (a.time_letter == "on") opt.time_letter = true;
    else if (a.time_letter == "off") opt.time_letter = false;
    else if (a.time_letter != "auto") throw ContractViolation("--time-letter must be on, off or auto");

    const auto report = check_moments(formula, opt);

    Json config;
    config["formula"] = a.formula;
    config["d"] = a.d;
    config["m"] = a.m;
    config["mode"] = mode;
    if (opt.mode == MomentMode::monte_carlo) {
        config["samples"] = opt.samples;
        config["seed"] = opt.seed;
    }
    config["tol"] = opt.tol;
    config["time_letter"] = report.alphabet.has_time_letter;

    Sink sink(a.out);
    auto& os = sink.out();
    write_header(os, "cubecheck", config);
    os << "word,degree,cubature,target,diff,stderr,pass\n";
    for (const auto& r : report.rows) {
        os << word_to_string(r.word) << ',' << r.degree << ',' << fmt(r.cubature) << ',' << fmt(r.target) << ','
           << fmt(r.diff) << ',' << fmt(r.stderr_) << ',' << (r.pass ? 1 : 0) << '\n';
    }
    if (report.passed()) return kOk;
    std::cerr << "cubecheck: moment mismatch on:\n";
    for (const auto& r : report.rows) {
        if (!r.pass) {
            std::cerr << "  " << word_to_string(r.word) << " cubature=" << fmt(r.cubature) << " target=" << fmt(r.target)
                      << '\n';
        }
    }
    return kCheckFailed;
}

struct WalkArgs {
    std::string formula;
    int d = 1;
    std::string mesh;
    double alpha = 0.4;
    std::size_t samples = 100'000;
    std::size_t holder_samples = 1000;
    int p = 1;
    double quantile = 0.95;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int run_walkdiag(const WalkArgs& a, const Globals& g) {
    const auto formula = formula_from_spec(a.formula, a.d);
    const Mesh mesh = parse_mesh(a.mesh);
    const std::uint64_t seed = resolve_seed(a.seed);
    if (a.holder_samples < 1) throw ContractViolation("--holder-samples must be >= 1");

    const auto marginal = donsker_marginal_check(formula, mesh, a.samples, derive_seed(seed, 1), g.workers);
    const Mesh family[] = {mesh};
    const auto scaling = moment_scaling_check(formula, family, a.p, a.samples, derive_seed(seed, 2), g.workers);
    const auto holder =
        holder_statistic_sample(formula, mesh, a.alpha, a.holder_samples, derive_seed(seed, 3), g.workers);
    const auto band = quantile_band(holder, a.quantile);
    ConditionOptions copt;
    copt.mode = formula.is_discrete() ? MomentMode::exact : MomentMode::monte_carlo;
    copt.seed = derive_seed(seed, 4);
    const auto conditions = clt_condition_report(formula, family, copt);

    Json config;
    config["formula"] = a.formula;
    config["d"] = a.d;
    config["mesh"] = a.mesh;
    config["alpha"] = a.alpha;
    config["samples"] = a.samples;
    config["holder_samples"] = a.holder_samples;
    config["p"] = a.p;
    config["quantile"] = a.quantile;
    config["seed"] = seed;
    config["condition_mode"] = copt.mode == MomentMode::exact ? "exact" : "mc";
    if (copt.mode == MomentMode::monte_carlo) config["condition_samples"] = copt.samples;

    Sink sink(a.out);
    auto& os = sink.out();
    write_header(os, "walkdiag", config);
    os << "metric,index,value,stderr,pass\n";
    for (std::size_t c = 0; c < marginal.ks_statistic.size(); ++c) {
        os << "ks_statistic," << c + 1 << ',' << fmt(marginal.ks_statistic[c]) << ",,\n";
        os << "ks_pvalue," << c + 1 << ',' << fmt(marginal.ks_pvalue[c]) << ",," << (marginal.ks_pass[c] ? 1 : 0)
           << '\n';
    }
    if (marginal.area_applicable) {
        os << "area_mean,," << fmt(marginal.area_mean) << ',' << fmt(marginal.area_mean_stderr) << ','
           << (marginal.area_mean_pass ? 1 : 0) << '\n';
        os << "area_variance,," << fmt(marginal.area_variance) << ',' << fmt(marginal.area_variance_stderr) << ','
           << (marginal.area_variance_pass ? 1 : 0) << '\n';
    } else {
        os << "area,,not_applicable,,\n";
    }
    for (const auto& r : scaling.rows) {
        os << "scaling_ratio," << r.k << ',' << fmt(r.ratio) << ',' << fmt(r.stderr_ / std::pow(r.t, 2 * a.p)) << ",\n";
    }
    os << "scaling_slope,," << fmt(scaling.pooled_slope) << ",," << (scaling.bounded ? 1 : 0) << '\n';
    os << "scaling_max_ratio,," << fmt(scaling.max_ratio) << ",,\n";
    os << "holder_quantile,," << fmt(band.estimate) << ",,\n";
    os << "holder_quantile_lower,," << fmt(band.lower) << ",,\n";
    os << "holder_quantile_upper,," << fmt(band.upper) << ",,\n";
    const auto& row = conditions.rows.front();
    const auto dd = static_cast<std::size_t>(conditions.d);
    os << "condition_second_moment,," << fmt(row.second_moment_sum) << ",,\n";
    os << "condition_expected_second_moment,," << fmt(conditions.second_moment) << ",,\n";
    for (std::size_t i = 0; i < dd; ++i) {
        for (std::size_t j = 0; j < dd; ++j) {
            if (i < j) os << "condition_a," << i + 1 << j + 1 << ',' << fmt(row.a[i * dd + j]) << ",,\n";
            os << "condition_b," << i + 1 << j + 1 << ',' << fmt(row.b[i * dd + j]) << ",,\n";
        }
    }
    os << "condition_truncated,0.5," << fmt(row.truncated_half) << ",,\n";
    os << "condition_truncated,1," << fmt(row.truncated_one) << ",,\n";

    if (marginal.passed() && scaling.bounded) return kOk;
    if (!marginal.passed()) std::cerr << "walkdiag: marginal check failed\n";
    if (!scaling.bounded) std::cerr << "walkdiag: moment scaling not bounded\n";
    return kCheckFailed;
}

// ---------------------------------------------------------------------------
// Config-file commands

struct ConfigArgs {
    std::string config;
    std::string out;
};

struct Common {
    CubatureFormula formula;
    ModelConfig model;
    PayoffConfig payoff;
    std::vector<double> x0;
    std::string method;
    std::size_t samples;
    std::uint64_t seed;
    IntegrationOptions integration;
    Json resolved;
};

IntegrationOptions integration_from_json(const Json& j, Json& resolved) {
    reject_unknown_keys(j, {"substeps", "adaptive", "max_substeps", "rel_tol", "exact_flow"}, "integration");
    IntegrationOptions o;
    o.substeps = j.value("substeps", o.substeps);
    o.adaptive = j.value("adaptive", o.adaptive);
    o.max_substeps = j.value("max_substeps", o.max_substeps);
    o.rel_tol = j.value("rel_tol", o.rel_tol);
    o.use_exact_flow = j.value("exact_flow", o.use_exact_flow);
    if (o.substeps < 1 || o.max_substeps < o.substeps) throw ContractViolation("integration: bad substep settings");
    resolved = Json{{"substeps", o.substeps},
                    {"adaptive", o.adaptive},
                    {"max_substeps", o.max_substeps},
                    {"rel_tol", o.rel_tol},
                    {"exact_flow", o.use_exact_flow}};
    return o;
}

Common parse_common(const Json& j) {
    auto model = model_from_json(need_key(j, "model"));
    auto payoff = payoff_from_json(need_key(j, "payoff"));
    std::vector<double> x0;
    if (j.contains("x0") && model.x0) throw ContractViolation("x0 given both at top level and in the model");
    if (j.contains("x0")) x0 = j.at("x0").get<std::vector<double>>();
    else if (model.x0) x0 = *model.x0;
    else throw ContractViolation("missing key 'x0'");
    const int d = model.system.noise_dimension();
    const auto spec = need_key(j, "formula").get<std::string>();
    auto formula = formula_from_spec(spec, d);
    const auto method = j.value("method", std::string(formula.is_discrete() ? "tree" : "mc"));
    if (method != "mc" && method != "tree") throw ContractViolation("method must be 'mc' or 'tree'");
    const std::size_t samples = j.value("samples", std::size_t{100'000});
    std::optional<std::uint64_t> seed;
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    Json integ_resolved;
    const auto integration = integration_from_json(j.value("integration", Json::object()), integ_resolved);

    Json resolved;
    resolved["formula"] = spec;
    resolved["model"] = model.resolved;
    resolved["payoff"] = payoff.resolved;
    resolved["x0"] = x0;
    resolved["method"] = method;
    if (method == "mc") {
        resolved["samples"] = samples;
        resolved["seed"] = resolve_seed(seed);
    }
    resolved["integration"] = integ_resolved;
    return Common{std::move(formula), std::move(model), std::move(payoff), std::move(x0), method, samples,
                  resolve_seed(seed), integration, resolved};
}

int run_cubprice(const ConfigArgs& a, const Globals& g) {
    const Json j = read_json_file(a.config);
    reject_unknown_keys(j, {"formula", "mesh", "model", "payoff", "x0", "samples", "seed", "reference", "method",
                            "integration"},
                        "cubprice config");
    auto c = parse_common(j);
    const auto mesh_spec = need_key(j, "mesh").get<std::string>();
    const Mesh mesh = parse_mesh(mesh_spec);
    std::optional<Reference> reference;
    if (j.contains("reference")) reference = reference_from_json(j.at("reference"));

    Estimate est;
    if (c.method == "tree") {
        TreeOptions t;
        t.workers = g.workers;
        t.integration = c.integration;
        est.value = estimate_tree(c.formula, mesh, c.model.system, c.payoff.payoff, c.x0, t);
        est.samples = static_cast<std::size_t>(
            std::pow(static_cast<double>(c.formula.atoms().size()), static_cast<double>(mesh.intervals())));
    } else {
        McOptions m;
        m.samples = c.samples;
        m.seed = c.seed;
        m.workers = g.workers;
        m.integration = c.integration;
        est = estimate_mc(c.formula, mesh, c.model.system, c.payoff.payoff, c.x0, m);
    }

    Json resolved = c.resolved;
    resolved["mesh"] = mesh_spec;
    if (reference) resolved["reference"] = reference_to_json(*reference);
    Sink sink(a.out);
    auto& os = sink.out();
    write_header(os, "cubprice", resolved);
    os << "estimate,stderr,samples,divergent,reliable,reference,reference_stderr,abs_error\n";
    os << fmt(est.value) << ',' << fmt(est.stderr_) << ',' << est.samples << ',' << est.divergent << ','
       << (est.reliable ? 1 : 0) << ',';
    if (reference) {
        os << fmt(reference->value) << ',' << fmt(reference->stderr_) << ',' << fmt(std::abs(est.value - reference->value));
    } else {
        os << ",,";
    }
    os << '\n';
    if (est.reliable) return kOk;
    std::cerr << "cubprice: " << est.divergent << " divergent samples, estimate unreliable\n";
    return kCheckFailed;
}

int run_cubrate(const ConfigArgs& a, const Globals& g) {
    const Json j = read_json_file(a.config);
    reject_unknown_keys(j, {"formula", "mesh_family", "model", "payoff", "x0", "samples", "seed", "reference",
                            "method", "integration", "expected_order", "resolve_sigmas"},
                        "cubrate config");
    auto c = parse_common(j);
    const auto family = mesh_family_from_json(need_key(j, "mesh_family"));
    const auto reference = reference_from_json(need_key(j, "reference"));
    std::optional<std::pair<double, double>> expected;
    if (j.contains("expected_order")) {
        const auto v = j.at("expected_order").get<std::vector<double>>();
        if (v.size() != 2 || !(v[0] <= v[1])) throw ContractViolation("expected_order must be [low, high]");
        expected = std::make_pair(v[0], v[1]);
    }

    StudyOptions opt;
    opt.method = c.method == "tree" ? StudyMethod::tree : StudyMethod::monte_carlo;
    opt.mc.samples = c.samples;
    opt.mc.seed = c.seed;
    opt.mc.workers = g.workers;
    opt.mc.integration = c.integration;
    opt.tree.workers = g.workers;
    opt.tree.integration = c.integration;
    opt.resolve_sigmas = j.value("resolve_sigmas", opt.resolve_sigmas);
    const auto report =
        convergence_study(c.formula, family.family, c.model.system, c.payoff.payoff, c.x0, reference, opt);

    Json resolved = c.resolved;
    resolved["mesh_family"] = family.resolved;
    resolved["reference"] = reference_to_json(reference);
    resolved["resolve_sigmas"] = opt.resolve_sigmas;
    if (expected) resolved["expected_order"] = {expected->first, expected->second};
    Sink sink(a.out);
    auto& os = sink.out();
    write_header(os, "cubrate", resolved);
    os << "n,mesh_size,estimate,stderr,reference,abs_error,resolvable\n";
    for (const auto& r : report.rows) {
        os << r.n << ',' << fmt(r.mesh_size) << ',' << fmt(r.estimate) << ',' << fmt(r.stderr_) << ','
           << fmt(r.reference) << ',' << fmt(r.abs_error) << ',' << (r.resolvable ? 1 : 0) << '\n';
    }
    os << "fitted_order," << (report.fitted_order ? fmt(*report.fitted_order) : std::string("undefined")) << '\n';

    if (!report.fitted_order) {
        std::cerr << "cubrate: only " << report.resolvable_rows << " resolvable rows, fitted order undefined\n";
        return kCheckFailed;
    }
    if (expected && (*report.fitted_order < expected->first || *report.fitted_order > expected->second)) {
        std::cerr << "cubrate: fitted order " << fmt(*report.fitted_order) << " outside expected range\n";
        return kCheckFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cubature on Wiener space: signatures, cubature formulas, walk diagnostics and pricing"};
    app.set_version_flag("--version", std::string(CUBATURE_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    Globals globals;
    app.add_option("--workers", globals.workers, "Worker threads")->check(CLI::PositiveNumber);

    SigArgs sig;
    auto* sig_cmd = app.add_subcommand("sig", "Signature of a piecewise-linear path");
    sig_cmd->add_option("--path", sig.path, "Path JSON file")->required();
    sig_cmd->add_option("--m", sig.m, "Truncation level")->check(CLI::Range(1, kMaxLevel));
    sig_cmd->add_flag("--spatial", sig.spatial, "Drop the time component");
    sig_cmd->add_option("--out", sig.out, "Output file (stdout by default)");

    CheckArgs check;
    auto* check_cmd = app.add_subcommand("cubecheck", "Compare expected signatures with Brownian motion");
    check_cmd->add_option("--formula", check.formula, "builtin:deg3|wz|nv or a formula JSON file")->required();
    check_cmd->add_option("--d", check.d, "Dimension")->required()->check(CLI::Range(1, kMaxDimension));
    check_cmd->add_option("--m", check.m, "Graded degree")->check(CLI::Range(1, kMaxLevel));
    check_cmd->add_option("--mode", check.mode, "exact or mc (default: exact for discrete formulas)");
    check_cmd->add_option("--samples", check.samples, "Monte Carlo samples");
    check_cmd->add_option("--seed", check.seed, "Seed (falls back to CUBATURE_SEED)");
    check_cmd->add_option("--tol", check.tol, "Absolute tolerance");
    check_cmd->add_option("--time-letter", check.time_letter, "on, off or auto");
    check_cmd->add_option("--out", check.out, "CSV output file (stdout by default)");

    WalkArgs walk;
    auto* walk_cmd = app.add_subcommand("walkdiag", "Donsker, moment-scaling and Hoelder diagnostics of the walk");
    walk_cmd->add_option("--formula", walk.formula, "builtin:deg3|wz|nv or a formula JSON file")->required();
    walk_cmd->add_option("--d", walk.d, "Dimension")->required()->check(CLI::Range(1, kMaxDimension));
    walk_cmd->add_option("--mesh", walk.mesh, "uniform:n or kusuoka:n:gamma")->required();
    walk_cmd->add_option("--alpha", walk.alpha, "Hoelder exponent");
    walk_cmd->add_option("--samples", walk.samples, "Samples for marginal and scaling checks");
    walk_cmd->add_option("--holder-samples", walk.holder_samples, "Samples for the Hoelder statistic");
    walk_cmd->add_option("--p", walk.p, "Moment order 4p")->check(CLI::Range(1, 2));
    walk_cmd->add_option("--quantile", walk.quantile, "Hoelder statistic quantile")->check(CLI::Range(0.0, 1.0));
    walk_cmd->add_option("--seed", walk.seed, "Seed (falls back to CUBATURE_SEED)");
    walk_cmd->add_option("--out", walk.out, "CSV output file (stdout by default)");

    ConfigArgs price;
    auto* price_cmd = app.add_subcommand("cubprice", "Estimate E[f(X)] along cubature paths");
    price_cmd->add_option("--config", price.config, "Run configuration JSON")->required();
    price_cmd->add_option("--out", price.out, "CSV output file (stdout by default)");

    ConfigArgs rate;
    auto* rate_cmd = app.add_subcommand("cubrate", "Convergence study over a mesh family");
    rate_cmd->add_option("--config", rate.config, "Study configuration JSON")->required();
    rate_cmd->add_option("--out", rate.out, "CSV output file (stdout by default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (sig_cmd->parsed()) return run_sig(sig);
        if (check_cmd->parsed()) return run_cubecheck(check, globals);
        if (walk_cmd->parsed()) return run_walkdiag(walk, globals);
        if (price_cmd->parsed()) return run_cubprice(price, globals);
        if (rate_cmd->parsed()) return run_cubrate(rate, globals);
    } catch (const Json::exception& e) {
        std::cerr << "cubature: configuration error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "cubature: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

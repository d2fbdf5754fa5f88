// Command-line laboratory for the edge-triangle random graph model: phase
// diagram scans, exact mean-field tables, Glauber-chain runs, and limit
// theorem verification suites.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "etm/enumeration.hpp"
#include "etm/io.hpp"
#include "etm/meanfield.hpp"
#include "etm/phase.hpp"
#include "etm/sampler.hpp"
#include "etm/stats.hpp"
#include "etm/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verification_failure = 1;
constexpr int exit_usage_error = 2;

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

std::vector<int> parse_n_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--n-list", "expected a comma-separated list");
    return out;
}

struct PhaseArgs {
    double alpha_min = 0.0, alpha_max = 5.0;
    int alpha_steps = 11;
    double h_min = -2.0, h_max = 0.0;
    int h_steps = 11;
    double tol = 1e-10;
    int curve_points = 17;
    std::string out;
    std::string format = "csv";
};

int cmd_phase(const PhaseArgs& a) {
    etm::KeyValueList kv;
    kv.add("command", "phase");
    kv.add("alpha_min", a.alpha_min);
    kv.add("alpha_max", a.alpha_max);
    kv.add("alpha_steps", a.alpha_steps);
    kv.add("h_min", a.h_min);
    kv.add("h_max", a.h_max);
    kv.add("h_steps", a.h_steps);
    kv.add("tol", a.tol);
    kv.add("curve_points", a.curve_points);

    struct Row {
        std::string series;
        double alpha, h;
        std::string regime;
        std::vector<double> us, vs;
        double f;
        std::optional<double> kappa;
    };
    std::vector<Row> rows;

    auto portrait_row = [](const char* series, double alpha, double h) {
        const etm::PhasePortrait pp = etm::classify_phase({alpha, h});
        Row r;
        r.series = series;
        r.alpha = alpha;
        r.h = h;
        r.regime = etm::to_string(pp.regime);
        r.f = pp.free_energy;
        r.kappa = pp.kappa;
        for (const auto& sp : pp.maximizers) r.us.push_back(sp.u);
        for (double v : pp.variances) r.vs.push_back(v);
        return r;
    };

    for (int i = 0; i < a.alpha_steps; ++i) {
        const double alpha =
            a.alpha_steps == 1
                ? a.alpha_min
                : a.alpha_min + (a.alpha_max - a.alpha_min) * double(i) / double(a.alpha_steps - 1);
        for (int j = 0; j < a.h_steps; ++j) {
            const double h = a.h_steps == 1
                                 ? a.h_min
                                 : a.h_min + (a.h_max - a.h_min) * double(j) / double(a.h_steps - 1);
            rows.push_back(portrait_row("grid", alpha, h));
        }
    }
    // critical curve h = q(alpha) for the part of the alpha range above 27/8
    if (a.alpha_max > etm::alpha_critical && a.curve_points > 0) {
        const double lo = std::max(a.alpha_min, etm::alpha_critical + 1e-4);
        for (int i = 0; i < a.curve_points; ++i) {
            const double alpha =
                a.curve_points == 1
                    ? lo
                    : lo + (a.alpha_max - lo) * double(i) / double(a.curve_points - 1);
            if (alpha <= etm::alpha_critical) continue;
            rows.push_back(portrait_row("curve", alpha, etm::critical_curve_h(alpha, a.tol)));
        }
    }

    auto os = open_output(a.out);
    if (a.format == "json") {
        nlohmann::json j;
        j["schema"] = etm::output_schema_version;
        j["version"] = etm::version_string;
        for (const auto& [k, v] : kv.items) j["config"][k] = v;
        j["config_hash"] = etm::fnv1a64(kv.canonical());
        j["rows"] = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json jr;
            jr["series"] = r.series;
            jr["alpha"] = r.alpha;
            jr["h"] = r.h;
            jr["regime"] = r.regime;
            jr["u"] = r.us;
            jr["free_energy"] = r.f;
            jr["v"] = r.vs;
            if (r.kappa) jr["kappa"] = *r.kappa;
            j["rows"].push_back(jr);
        }
        os << j.dump(2) << "\n";
    } else {
        etm::write_config_comments(os, kv);
        os << "series,alpha,h,regime,u1,u2,free_energy,v1,v2,kappa\n";
        for (const auto& r : rows) {
            os << r.series << "," << etm::format_double(r.alpha) << "," << etm::format_double(r.h)
               << "," << r.regime << ",";
            os << (r.us.size() > 0 ? etm::format_double(r.us[0]) : "") << ",";
            os << (r.us.size() > 1 ? etm::format_double(r.us[1]) : "") << ",";
            os << etm::format_double(r.f) << ",";
            os << (r.vs.size() > 0 && std::isfinite(r.vs[0]) ? etm::format_double(r.vs[0]) : "")
               << ",";
            os << (r.vs.size() > 1 && std::isfinite(r.vs[1]) ? etm::format_double(r.vs[1]) : "")
               << ",";
            os << (r.kappa ? etm::format_double(*r.kappa) : "") << "\n";
        }
    }
    return exit_ok;
}

struct MeanfieldArgs {
    int n = 100;
    double alpha = 0.0, h = 0.0;
    std::string what = "distribution";
    double delta = 0.25;
    double t_min = -2.0, t_max = 2.0;
    int t_steps = 21;
    std::string scaling = "clt";
    std::string center = "mean";
    int x_steps = 201;
    std::string out;
};

int cmd_meanfield(const MeanfieldArgs& a) {
    etm::KeyValueList kv;
    kv.add("command", "meanfield");
    kv.add("n", a.n);
    kv.add("alpha", a.alpha);
    kv.add("h", a.h);
    kv.add("what", a.what);
    kv.add("delta", a.delta);

    const etm::ModelParams p{a.alpha, a.h};
    auto os = open_output(a.out);

    if (a.what == "distribution") {
        const auto d = etm::exact_distribution(a.n, p);
        etm::write_config_comments(os, kv);
        os << "k,m,log_weight,probability\n";
        for (std::int64_t k = 0; k <= d.grid.pair_count; ++k) {
            os << k << "," << etm::format_double(d.grid.value(k)) << ","
               << etm::format_double(d.log_weights[std::size_t(k)]) << ","
               << etm::format_double(d.probabilities[std::size_t(k)]) << "\n";
        }
    } else if (a.what == "mgf") {
        kv.add("t_min", a.t_min);
        kv.add("t_max", a.t_max);
        kv.add("t_steps", a.t_steps);
        kv.add("scaling", a.scaling);
        kv.add("center", a.center);
        const auto d = etm::exact_distribution(a.n, p);
        const auto scaling = a.scaling == "critical" ? etm::FluctuationScaling::Critical
                                                     : etm::FluctuationScaling::CLT;
        const auto center = a.center == "maximizer" ? etm::FluctuationCenter::Maximizer
                                                    : etm::FluctuationCenter::ExactMean;
        etm::write_config_comments(os, kv);
        os << "t,mgf\n";
        for (int i = 0; i < a.t_steps; ++i) {
            const double t =
                a.t_steps == 1 ? a.t_min
                               : a.t_min + (a.t_max - a.t_min) * double(i) / double(a.t_steps - 1);
            os << etm::format_double(t) << ","
               << etm::format_double(etm::scaled_fluctuation_mgf(d, t, scaling, center)) << "\n";
        }
    } else if (a.what == "rate") {
        kv.add("x_steps", a.x_steps);
        const double f = etm::free_energy(p);
        etm::write_config_comments(os, kv);
        os << "x,rate\n";
        for (int i = 0; i < a.x_steps; ++i) {
            const double x = double(i) / double(a.x_steps - 1);
            os << etm::format_double(x) << ","
               << etm::format_double(etm::rate_function(x, p, f)) << "\n";
        }
    } else if (a.what == "laplace") {
        const auto lc = etm::laplace_check(a.n, p, a.delta);
        etm::write_config_comments(os, kv);
        os << "n,log_partition_exact,log_partition_laplace,discrepancy";
        for (std::size_t i = 0; i < lc.d_terms_normalized.size(); ++i) os << ",d" << (i + 1);
        os << "\n" << a.n << "," << etm::format_double(lc.log_partition_exact) << ","
           << etm::format_double(lc.log_partition_laplace) << ","
           << etm::format_double(lc.discrepancy);
        for (double d : lc.d_terms_normalized) os << "," << etm::format_double(d);
        os << "\n";
    } else {
        throw CLI::ValidationError("--what", "expected distribution|mgf|rate|laplace");
    }
    return exit_ok;
}

struct SampleArgs {
    int n = 0;
    double alpha = 0.0, h = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string init = "empty";
    double init_value = 0.5;
    std::int64_t burn_in = 1000;
    std::int64_t sweeps = 10000;
    std::int64_t thinning = 1;
    std::string out;
    std::string meta;
};

int cmd_sample(const SampleArgs& a) {
    etm::ChainConfig cfg;
    cfg.n = a.n;
    cfg.params = {a.alpha, a.h};
    cfg.seed = a.seed;
    cfg.stream = a.stream;
    cfg.burn_in_sweeps = a.burn_in;
    cfg.sweeps = a.sweeps;
    cfg.thinning = a.thinning;
    if (a.init == "empty") {
        cfg.init = etm::ChainInit::empty();
    } else if (a.init == "complete") {
        cfg.init = etm::ChainInit::complete();
    } else if (a.init == "erdos-renyi") {
        cfg.init = etm::ChainInit::erdos_renyi(a.init_value);
    } else if (a.init == "from-density") {
        cfg.init = etm::ChainInit::from_density(a.init_value);
    } else {
        throw CLI::ValidationError("--init", "expected empty|complete|erdos-renyi|from-density");
    }
    cfg.validate();
    if (!etm::in_replica_symmetric_regime(cfg.params)) {
        // sampling itself is defined for any alpha; warn but continue
        std::cerr << "note: alpha <= -2 lies outside the replica symmetric regime; "
                     "phase-solver comparisons are unavailable there\n";
    }

    etm::KeyValueList kv;
    kv.add("command", "sample");
    kv.add("n", cfg.n);
    kv.add("alpha", cfg.params.alpha);
    kv.add("h", cfg.params.h);
    kv.add("seed", cfg.seed);
    kv.add("stream", cfg.stream);
    kv.add("init", a.init);
    kv.add("init_value", a.init_value);
    kv.add("burn_in_sweeps", cfg.burn_in_sweeps);
    kv.add("sweeps", cfg.sweeps);
    kv.add("thinning", cfg.thinning);

    const auto trace = etm::run_chain(cfg);

    auto os = open_output(a.out);
    etm::write_config_comments(os, kv);
    os << "sweep,edge_density,triangle_density\n";
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        os << (std::int64_t(i + 1) * cfg.thinning) << ","
           << etm::format_double(trace.samples[i].edge_density) << ","
           << etm::format_double(trace.samples[i].triangle_density) << "\n";
    }

    const std::string meta_path = a.meta.empty() ? a.out + ".meta.json" : a.meta;
    nlohmann::json j;
    j["schema"] = etm::output_schema_version;
    j["version"] = etm::version_string;
    j["config_hash"] = etm::fnv1a64(kv.canonical());
    for (const auto& [k, v] : kv.items) j["config"][k] = v;
    j["seed"] = cfg.seed;
    j["samples"] = trace.samples.size();
    j["proposals"] = trace.proposals;
    j["flips"] = trace.flips;
    auto ms = open_output(meta_path);
    ms << j.dump(2) << "\n";
    return exit_ok;
}

struct VerifyArgs {
    std::string suite = "all";
    std::string source = "meanfield";
    double alpha = 1.0, h = 0.0;
    bool have_params = false;
    std::string n_list_csv;
    int n = 128;
    std::uint64_t seed = 20240801;
    std::int64_t sweeps = 10000;
    std::int64_t burn_in = 1000;
    std::int64_t thinning = 1;
    double eps = 0.05;
    double delta = 0.25;
    std::string out;
};

int cmd_verify(const VerifyArgs& a) {
    etm::ChainBudget budget;
    budget.seed = a.seed;
    budget.sweeps = a.sweeps;
    budget.burn_in_sweeps = a.burn_in;
    budget.thinning = a.thinning;

    std::vector<etm::TheoremVerdict> verdicts;
    auto want = [&](const char* s) { return a.suite == "all" || a.suite == s; };

    if (want("slln")) {
        const etm::ModelParams p = a.have_params ? etm::ModelParams{a.alpha, a.h}
                                                 : etm::ModelParams{1.0, 0.0};
        const auto ns = a.n_list_csv.empty() ? std::vector<int>{32, 64, 128}
                                             : parse_n_list(a.n_list_csv);
        verdicts.push_back(etm::verify_slln(p, ns, budget));
    }
    if (want("clt")) {
        const etm::ModelParams p = a.have_params ? etm::ModelParams{a.alpha, a.h}
                                                 : etm::ModelParams{1.0, 0.0};
        verdicts.push_back(etm::verify_clt(p, a.n, budget));
    }
    if (want("critical")) {
        const auto ns = a.n_list_csv.empty()
                            ? (a.source == "sampler" ? std::vector<int>{32, 64, 128}
                                                     : std::vector<int>{500, 1000, 2000})
                            : parse_n_list(a.n_list_csv);
        const auto src = a.source == "sampler" ? etm::VerificationSource::Sampler
                                               : etm::VerificationSource::MeanFieldExact;
        verdicts.push_back(etm::verify_critical_scaling(ns, budget, src));
    }
    if (want("mixture")) {
        double alpha = a.have_params ? a.alpha : 4.0;
        double h = a.have_params ? a.h : etm::critical_curve_h(alpha, 1e-12);
        const auto ns = a.n_list_csv.empty() ? std::vector<int>{200, 400, 800}
                                             : parse_n_list(a.n_list_csv);
        verdicts.push_back(etm::verify_mixture({alpha, h}, ns, a.eps, a.delta, budget, 64));
    }
    if (want("rate")) {
        const etm::ModelParams p = a.have_params ? etm::ModelParams{a.alpha, a.h}
                                                 : etm::ModelParams{0.0, 0.0};
        const auto ns = a.n_list_csv.empty() ? std::vector<int>{32, 64, 128}
                                             : parse_n_list(a.n_list_csv);
        verdicts.push_back(etm::verify_rate(p, ns, budget));
    }
    if (verdicts.empty()) throw CLI::ValidationError("--suite", "unknown suite");

    bool all_pass = true;
    for (const auto& v : verdicts) {
        etm::print_verdict_table(std::cout, v);
        all_pass = all_pass && v.pass;
    }
    if (!a.out.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& v : verdicts) j.push_back(etm::to_json(v));
        auto os = open_output(a.out);
        os << j.dump(2) << "\n";
    }
    return all_pass ? exit_ok : exit_verification_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"edge-triangle random graph model laboratory"};
    app.set_version_flag("--version", etm::version_string);
    app.require_subcommand(1);

    PhaseArgs pa;
    auto* phase = app.add_subcommand("phase", "scan the (alpha, h) phase diagram");
    phase->add_option("--alpha-min", pa.alpha_min);
    phase->add_option("--alpha-max", pa.alpha_max);
    phase->add_option("--alpha-steps", pa.alpha_steps)->check(CLI::PositiveNumber);
    phase->add_option("--h-min", pa.h_min);
    phase->add_option("--h-max", pa.h_max);
    phase->add_option("--h-steps", pa.h_steps)->check(CLI::PositiveNumber);
    phase->add_option("--tol", pa.tol)->check(CLI::PositiveNumber);
    phase->add_option("--curve-points", pa.curve_points);
    phase->add_option("-o,--out", pa.out)->required();
    phase->add_option("--format", pa.format)->check(CLI::IsMember({"csv", "json"}));

    MeanfieldArgs ma;
    auto* meanfield = app.add_subcommand("meanfield", "exact mean-field tables");
    meanfield->add_option("--n", ma.n)->required()->check(CLI::Range(2, 20000));
    meanfield->add_option("--alpha", ma.alpha)->required();
    meanfield->add_option("--h", ma.h)->required();
    meanfield->add_option("--what", ma.what)
        ->check(CLI::IsMember({"distribution", "mgf", "rate", "laplace"}));
    meanfield->add_option("--delta", ma.delta);
    meanfield->add_option("--t-min", ma.t_min);
    meanfield->add_option("--t-max", ma.t_max);
    meanfield->add_option("--t-steps", ma.t_steps)->check(CLI::PositiveNumber);
    meanfield->add_option("--scaling", ma.scaling)->check(CLI::IsMember({"clt", "critical"}));
    meanfield->add_option("--center", ma.center)->check(CLI::IsMember({"mean", "maximizer"}));
    meanfield->add_option("--x-steps", ma.x_steps)->check(CLI::Range(2, 1000000));
    meanfield->add_option("-o,--out", ma.out)->required();

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "run a Glauber chain");
    sample->set_config("--config", "", "key = value configuration file");
    sample->add_option("--n", sa.n)->required()->check(CLI::Range(2, 100000));
    sample->add_option("--alpha", sa.alpha)->required();
    sample->add_option("--h", sa.h)->required();
    sample->add_option("--seed", sa.seed)
        ->required()
        ->description("RNG seed (mandatory for reproducible traces)");
    sample->add_option("--stream", sa.stream);
    sample->add_option("--init", sa.init);
    sample->add_option("--init-value", sa.init_value);
    sample->add_option("--burn-in", sa.burn_in);
    sample->add_option("--sweeps", sa.sweeps);
    sample->add_option("--thinning", sa.thinning);
    sample->add_option("-o,--out", sa.out)->required();
    sample->add_option("--meta", sa.meta);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run limit-theorem verification suites");
    verify->add_option("--suite", va.suite)
        ->check(CLI::IsMember({"slln", "clt", "critical", "mixture", "rate", "all"}));
    verify->add_option("--source", va.source)->check(CLI::IsMember({"meanfield", "sampler"}));
    auto* al = verify->add_option("--alpha", va.alpha);
    auto* hl = verify->add_option("--h", va.h);
    verify->add_option("--n-list", va.n_list_csv);
    verify->add_option("--n", va.n);
    verify->add_option("--seed", va.seed);
    verify->add_option("--sweeps", va.sweeps);
    verify->add_option("--burn-in", va.burn_in);
    verify->add_option("--thinning", va.thinning);
    verify->add_option("--eps", va.eps);
    verify->add_option("--delta", va.delta);
    verify->add_option("-o,--out", va.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage_error;
    }

    try {
        if (*phase) return cmd_phase(pa);
        if (*meanfield) return cmd_meanfield(ma);
        if (*sample) return cmd_sample(sa);
        if (*verify) {
            va.have_params = al->count() > 0 || hl->count() > 0;
            if (al->count() > 0 && hl->count() == 0 && va.suite == "mixture") {
                va.h = etm::critical_curve_h(va.alpha, 1e-12);
            }
            return cmd_verify(va);
        }
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage_error;
    }
    return exit_usage_error;
}

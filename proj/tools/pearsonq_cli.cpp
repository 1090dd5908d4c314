// Command-line front end: estimation, testing, calibration, verification, and
// the Monte Carlo experiment runner.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pearsonq/pearsonq.hpp"

namespace {

using nlohmann::json;
using namespace pearsonq;

std::uint64_t env_seed_or(std::uint64_t fallback) {
    if (const char* env = std::getenv("PEARSONQ_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw DataError("PEARSONQ_SEED is not a valid integer");
        }
    }
    return fallback;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
    auto sizes = parse_size_list(text);
    if (sizes.empty()) throw DataError("empty n list");
    return sizes;
}

std::vector<double> parse_alpha_list(const std::string& text) {
    std::vector<double> alphas;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = detail::trim(text.substr(pos, comma - pos));
        if (!item.empty()) alphas.push_back(std::stod(item));
        pos = comma + 1;
    }
    if (alphas.empty()) throw DataError("empty alpha list");
    return alphas;
}

struct EstimateArgs {
    std::string input;
    std::string column;
    std::string case_name = "continuous";
    bool with_se = false;
    std::string format = "text";
};

int run_estimate(const EstimateArgs& args) {
    const Case kind = (args.case_name == "discrete") ? Case::discrete : Case::continuous;
    const auto report = ingest_csv(args.input, ColumnRef::parse(args.column), kind);
    const Sample& s = report.sample;
    const MomentSet ms = central_moments(s, args.with_se ? 8 : 4);
    assert_nondegenerate(ms, s);
    const QParams qp = estimate(ms, kind);
    const auto warnings = q_params_warnings(qp, ms);

    std::array<double, 4> se{};
    if (args.with_se) {
        const CovModel cov = asymptotic_cov(ms, kind);
        for (std::size_t i = 0; i < 4; ++i) {
            se[i] = std::sqrt(std::max(0.0, cov.d(i, i)) / static_cast<double>(s.n()));
        }
    }

    if (args.format == "json") {
        json out;
        out["n"] = s.n();
        out["case"] = to_string(kind);
        out["rows_parsed"] = report.rows_parsed;
        out["lines_skipped"] = report.lines_skipped;
        out["mean"] = ms.mean;
        json moments;
        for (int k = 2; k <= ms.max_order; ++k) {
            moments["m" + std::to_string(k)] = ms.m[static_cast<std::size_t>(k)];
        }
        out["moments"] = moments;
        out["theta"] = ms.theta;
        out["delta"] = qp.delta;
        out["beta"] = qp.beta;
        out["gamma"] = qp.gamma;
        if (args.with_se) {
            out["se"] = {{"mu", se[0]}, {"delta", se[1]}, {"beta", se[2]}, {"gamma", se[3]}};
        }
        if (!warnings.empty()) out["warnings"] = warnings;
        std::cout << out.dump(2) << '\n';
    } else if (args.format == "csv") {
        std::cout << "n,case,mean,theta,delta,beta,gamma";
        if (args.with_se) std::cout << ",se_mu,se_delta,se_beta,se_gamma";
        std::cout << '\n'
                  << s.n() << ',' << to_string(kind) << ',' << format_double(ms.mean) << ','
                  << format_double(ms.theta) << ',' << format_double(qp.delta) << ','
                  << format_double(qp.beta) << ',' << format_double(qp.gamma);
        if (args.with_se) {
            for (const double v : se) std::cout << ',' << format_double(v);
        }
        std::cout << '\n';
    } else {
        std::cout << "n:      " << s.n() << "  (" << report.rows_parsed << " rows, "
                  << report.lines_skipped << " lines skipped)\n"
                  << "case:   " << to_string(kind) << '\n'
                  << "mean:   " << format_double(ms.mean) << '\n';
        for (int k = 2; k <= ms.max_order; ++k) {
            std::cout << "m" << k << ":     " << format_double(ms.m[static_cast<std::size_t>(k)])
                      << '\n';
        }
        std::cout << "theta:  " << format_double(ms.theta) << '\n'
                  << "delta:  " << format_double(qp.delta) << '\n'
                  << "beta:   " << format_double(qp.beta) << '\n'
                  << "gamma:  " << format_double(qp.gamma) << '\n';
        if (args.with_se) {
            std::cout << "se(mu):    " << format_double(se[0]) << '\n'
                      << "se(delta): " << format_double(se[1]) << '\n'
                      << "se(beta):  " << format_double(se[2]) << '\n'
                      << "se(gamma): " << format_double(se[3]) << '\n';
        }
        for (const auto& w : warnings) std::cout << "warning: " << w << '\n';
    }
    return 0;
}

struct TestArgs {
    std::string which;
    std::string input;
    std::string column;
    double alpha = 0.05;
    bool small_sample = false;
    std::string table_file;
    std::string format = "text";
};

int run_test(const TestArgs& args) {
    const Case kind = (args.which == "poisson") ? Case::discrete : Case::continuous;
    const auto report = ingest_csv(args.input, ColumnRef::parse(args.column), kind);
    const Sample& s = report.sample;

    TestOutcome outcome;
    std::string reference_desc;
    if (args.which == "normality") {
        PercentileTable loaded;
        const PercentileTable* table = nullptr;
        if (!args.table_file.empty()) {
            loaded = load_percentile_csv(args.table_file);
            table = &loaded;
        }
        outcome = test_normality(s, args.alpha,
                                 args.small_sample ? NormalityMode::small_sample
                                                   : NormalityMode::asymptotic,
                                 table);
        reference_desc = args.small_sample ? "empirical table" : "chi-square(2)";
    } else if (args.which == "delta-zero") {
        outcome = test_delta_zero(s, args.alpha);
        reference_desc = "standard normal (two-sided)";
    } else if (args.which == "symmetry") {
        outcome = test_symmetry(s, args.alpha);
        reference_desc = "standard normal (two-sided)";
    } else if (args.which == "poisson") {
        outcome = test_poisson(s, args.alpha);
        reference_desc = "chi-square(3)";
    } else {
        throw CLI::ValidationError("--which", "unknown test '" + args.which + "'");
    }

    if (args.format == "json") {
        json out;
        out["test"] = args.which;
        out["n"] = s.n();
        out["statistic"] = outcome.statistic;
        out["reference"] = reference_desc;
        out["critical_value"] = outcome.critical_value;
        out["alpha"] = outcome.alpha;
        out["reject"] = outcome.reject;
        if (std::isfinite(outcome.p_value)) out["p_value"] = outcome.p_value;
        if (outcome.alpha_bracket) {
            out["alpha_bracket"] = {outcome.alpha_bracket->first, outcome.alpha_bracket->second};
        }
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << "test:           " << args.which << '\n'
                  << "n:              " << s.n() << '\n'
                  << "statistic:      " << format_double(outcome.statistic) << '\n'
                  << "reference:      " << reference_desc << '\n'
                  << "critical value: " << format_double(outcome.critical_value)
                  << "  (alpha=" << format_double(outcome.alpha) << ")\n";
        if (std::isfinite(outcome.p_value)) {
            std::cout << "p-value:        " << format_double(outcome.p_value) << '\n';
        }
        if (outcome.alpha_bracket) {
            std::cout << "alpha bracket:  (" << format_double(outcome.alpha_bracket->first)
                      << ", " << format_double(outcome.alpha_bracket->second) << "]\n";
        }
        std::cout << "decision:       " << (outcome.reject ? "reject H0" : "do not reject H0")
                  << '\n';
    }
    return 0;
}

int run_verify(const std::string& family, std::size_t grid_points, long j_max) {
    const FamilySpec spec = FamilySpec::parse(family);
    const QParams qp = true_q_params(spec);
    std::cout << "family:   " << spec.to_string() << '\n'
              << "case:     " << to_string(spec.kind()) << '\n'
              << "mu:       " << format_double(qp.mu) << '\n'
              << "delta:    " << format_double(qp.delta) << '\n'
              << "beta:     " << format_double(qp.beta) << '\n'
              << "gamma:    " << format_double(qp.gamma) << '\n';
    double residual, threshold;
    if (spec.kind() == Case::discrete) {
        residual = verify_discrete_identity(spec, qp, j_max);
        threshold = 1e-12;
        std::cout << "identity: sum_{k<=j} (mu-k) p(k) = q(j) p(j)\n";
    } else {
        residual = verify_continuous_identity(spec, qp, default_identity_grid(spec, grid_points));
        threshold = 1e-7;
        std::cout << "identity: integral_{-inf}^{x} (mu-t) f(t) dt = q(x) f(x)\n";
    }
    std::cout << "max residual: " << format_double(residual) << '\n'
              << "threshold:    " << format_double(threshold) << '\n'
              << "status:       " << (residual <= threshold ? "PASS" : "FAIL") << '\n';
    return residual <= threshold ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moment estimation and hypothesis testing for quadratic-q Pearson families"};
    app.require_subcommand(1);

    // estimate
    EstimateArgs est;
    auto* cmd_est = app.add_subcommand("estimate", "Estimate (delta, beta, gamma) from a CSV sample");
    cmd_est->add_option("--input", est.input, "CSV file of observations")->required();
    cmd_est->add_option("--column", est.column, "Column name or 0-based index");
    cmd_est->add_option("--case", est.case_name, "Sample case")
        ->check(CLI::IsMember({"continuous", "discrete"}))
        ->required();
    cmd_est->add_flag("--with-se", est.with_se, "Also report asymptotic standard errors");
    cmd_est->add_option("--format", est.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));

    // test
    TestArgs tst;
    auto* cmd_tst = app.add_subcommand("test", "Run one of the proposed hypothesis tests");
    cmd_tst->add_option("--which", tst.which, "Test to run")
        ->check(CLI::IsMember({"normality", "delta-zero", "symmetry", "poisson"}))
        ->required();
    cmd_tst->add_option("--input", tst.input, "CSV file of observations")->required();
    cmd_tst->add_option("--column", tst.column, "Column name or 0-based index");
    cmd_tst->add_option("--alpha", tst.alpha, "Significance level")->required();
    cmd_tst->add_flag("--small-sample", tst.small_sample,
                      "Use the empirical percentile table (normality only)");
    cmd_tst->add_option("--table", tst.table_file,
                        "Percentile table CSV (defaults to the shipped table)");
    cmd_tst->add_option("--format", tst.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    // simulate
    std::string sim_config, sim_out;
    unsigned sim_threads = 0;
    std::uint64_t sim_seed = 0;
    auto* cmd_sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a config file");
    cmd_sim->add_option("--config", sim_config, "INI-style experiment config")->required();
    auto* sim_threads_opt = cmd_sim->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    auto* sim_out_opt = cmd_sim->add_option("--out", sim_out, "Output directory (overrides config)");
    auto* sim_seed_opt = cmd_sim->add_option("--seed", sim_seed, "Master seed (overrides config)");

    // percentiles
    std::string pct_test = "normality", pct_nlist, pct_out;
    std::uint64_t pct_reps = 100000, pct_seed = 0;
    unsigned pct_threads = 0;
    auto* cmd_pct = app.add_subcommand("percentiles",
                                       "Regenerate the empirical percentile table of q_n");
    cmd_pct->add_option("--test", pct_test, "Statistic (only 'normality')")
        ->check(CLI::IsMember({"normality"}));
    cmd_pct->add_option("--n-list", pct_nlist, "Comma-separated sample sizes")->required();
    cmd_pct->add_option("--reps", pct_reps, "Replications per sample size");
    auto* pct_seed_opt = cmd_pct->add_option("--seed", pct_seed, "Master seed");
    cmd_pct->add_option("--threads", pct_threads, "Worker threads (0 = all cores)");
    cmd_pct->add_option("--out", pct_out, "Output CSV (default: stdout)");

    // calibrate
    std::string cal_test, cal_nlist, cal_alphalist = "0.05", cal_out;
    std::uint64_t cal_reps = 100000, cal_seed = 0;
    auto* cmd_cal = app.add_subcommand("calibrate",
                                       "Monte Carlo critical values for the competitor tests");
    cmd_cal->add_option("--test", cal_test, "Competitor test")
        ->check(CLI::IsMember({"ks", "bs", "d", "ad", "cvm", "za", "zc", "cm"}))
        ->required();
    cmd_cal->add_option("--n-list", cal_nlist, "Comma-separated sample sizes")->required();
    cmd_cal->add_option("--alpha-list", cal_alphalist, "Comma-separated significance levels");
    cmd_cal->add_option("--reps", cal_reps, "Null replications per sample size");
    auto* cal_seed_opt = cmd_cal->add_option("--seed", cal_seed, "Master seed");
    cmd_cal->add_option("--out", cal_out, "Output CSV (default: stdout)");

    // verify
    std::string ver_family;
    std::size_t ver_grid = 50;
    long ver_jmax = 0;
    auto* cmd_ver = app.add_subcommand("verify",
                                       "Check the defining identity for a family's true parameters");
    cmd_ver->add_option("--family", ver_family, "Family spec, e.g. beta:a=5,b=5")->required();
    cmd_ver->add_option("--grid-points", ver_grid, "Grid size (continuous families)");
    cmd_ver->add_option("--j-max", ver_jmax, "Support cutoff (discrete families; 0 = automatic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: USAGE: " << e.what() << '\n';
        return 2;
    }

    try {
        if (cmd_est->parsed()) return run_estimate(est);
        if (cmd_tst->parsed()) return run_test(tst);
        if (cmd_sim->parsed()) {
            ExperimentConfig cfg = parse_config_file(sim_config);
            if (sim_threads_opt->count() > 0) cfg.threads = sim_threads;
            if (sim_out_opt->count() > 0) cfg.out = sim_out;
            if (sim_seed_opt->count() > 0) {
                cfg.seed = sim_seed;
            } else if (!cfg.seed_explicit) {
                cfg.seed = env_seed_or(0);
            }
            const auto files = run_experiment(cfg);
            for (const auto& f : files) std::cout << "wrote " << f << '\n';
            return 0;
        }
        if (cmd_pct->parsed()) {
            const std::uint64_t seed =
                (pct_seed_opt->count() > 0) ? pct_seed : env_seed_or(0);
            const auto table = run_percentiles(parse_n_list(pct_nlist), pct_reps, seed, pct_threads);
            if (pct_out.empty()) {
                write_percentile_csv(std::cout, table);
            } else {
                write_percentile_csv(pct_out, table);
                std::cout << "wrote " << pct_out << '\n';
            }
            return 0;
        }
        if (cmd_cal->parsed()) {
            const std::uint64_t seed =
                (cal_seed_opt->count() > 0) ? cal_seed : env_seed_or(0);
            const auto values =
                calibrate_critical_values(competitor_of(parse_test_id(cal_test)),
                                          parse_n_list(cal_nlist), parse_alpha_list(cal_alphalist),
                                          cal_reps, seed);
            if (cal_out.empty()) {
                write_critical_values_csv(std::cout, values);
            } else {
                std::ofstream out(cal_out);
                if (!out) throw DataError("cannot write " + cal_out);
                write_critical_values_csv(out, values);
                std::cout << "wrote " << cal_out << '\n';
            }
            return 0;
        }
        if (cmd_ver->parsed()) return run_verify(ver_family, ver_grid, ver_jmax);
    } catch (const ThetaDegenerate& e) {
        std::cerr << "error: THETA_DEGENERATE: " << e.what() << '\n';
        return 3;
    } catch (const NonpositiveVariance& e) {
        std::cerr << "error: NONPOSITIVE_VARIANCE: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: DATA: " << e.what() << '\n';
        return 3;
    } catch (const SingularCovariance& e) {
        std::cerr << "error: SINGULAR_COVARIANCE: " << e.what() << '\n';
        return 4;
    } catch (const SingularSystem& e) {
        std::cerr << "error: SINGULAR_SYSTEM: " << e.what() << '\n';
        return 4;
    } catch (const NumericError& e) {
        std::cerr << "error: NUMERIC: " << e.what() << '\n';
        return 4;
    } catch (const UnsupportedAlpha& e) {
        std::cerr << "error: UNSUPPORTED_ALPHA: " << e.what() << '\n';
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << "error: USAGE: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: USAGE: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

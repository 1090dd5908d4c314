#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pearsonq/competitors.hpp"
#include "pearsonq/distributions.hpp"
#include "pearsonq/errors.hpp"
#include "pearsonq/format.hpp"
#include "pearsonq/hypothesis_tests.hpp"
#include "pearsonq/rng.hpp"
#include "pearsonq/version.hpp"

namespace pearsonq {

/// Every test the harness can evaluate: the four proposed tests plus the
/// eight competitors.
enum class TestId {
    normality,
    delta_zero,
    symmetry,
    poisson,
    ks,
    bs,
    d,
    ad,
    cvm,
    za,
    zc,
    cm,
};

[[nodiscard]] inline const char* to_string(TestId id) {
    switch (id) {
        case TestId::normality: return "normality";
        case TestId::delta_zero: return "delta-zero";
        case TestId::symmetry: return "symmetry";
        case TestId::poisson: return "poisson";
        case TestId::ks: return "ks";
        case TestId::bs: return "bs";
        case TestId::d: return "d";
        case TestId::ad: return "ad";
        case TestId::cvm: return "cvm";
        case TestId::za: return "za";
        case TestId::zc: return "zc";
        case TestId::cm: return "cm";
    }
    return "?";
}

[[nodiscard]] inline TestId parse_test_id(const std::string& name) {
    static const std::map<std::string, TestId> table = {
        {"normality", TestId::normality}, {"delta-zero", TestId::delta_zero},
        {"delta_zero", TestId::delta_zero}, {"symmetry", TestId::symmetry},
        {"poisson", TestId::poisson}, {"ks", TestId::ks}, {"bs", TestId::bs},
        {"d", TestId::d}, {"ad", TestId::ad}, {"cvm", TestId::cvm},
        {"za", TestId::za}, {"zc", TestId::zc}, {"cm", TestId::cm},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw DataError("unknown test '" + name + "'");
    return it->second;
}

[[nodiscard]] inline bool is_competitor(TestId id) {
    return id >= TestId::ks;
}

[[nodiscard]] inline CompetitorId competitor_of(TestId id) {
    switch (id) {
        case TestId::ks: return CompetitorId::ks;
        case TestId::bs: return CompetitorId::bs;
        case TestId::d: return CompetitorId::d;
        case TestId::ad: return CompetitorId::ad;
        case TestId::cvm: return CompetitorId::cvm;
        case TestId::za: return CompetitorId::za;
        case TestId::zc: return CompetitorId::zc;
        case TestId::cm: return CompetitorId::cm;
        default: throw std::invalid_argument("not a competitor test");
    }
}

enum class ExperimentKind { estimator_table, percentiles, size_power };

[[nodiscard]] inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::estimator_table: return "estimator_table";
        case ExperimentKind::percentiles: return "percentiles";
        case ExperimentKind::size_power: return "size_power";
    }
    return "?";
}

/// Full description of one Monte Carlo experiment, mirrored by the INI-style
/// config file.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::estimator_table;
    FamilySpec family;
    std::vector<std::size_t> sizes;
    std::uint64_t reps = 10000;
    std::uint64_t seed = 0;
    bool seed_explicit = false;
    std::vector<TestId> tests;
    double alpha = 0.05;
    bool normality_use_table = true;
    std::uint64_t calib_reps = 100000;
    std::string out;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const {
        family.validate();
        if (sizes.empty()) throw DataError("config: sizes must be nonempty");
        if (reps < 1) throw DataError("config: reps must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("config: alpha must be in (0,1)");
        if (kind == ExperimentKind::estimator_table && family.kind() != Case::continuous) {
            throw DataError("config: estimator_table requires a continuous family");
        }
        if (kind == ExperimentKind::percentiles && family.family != Family::normal) {
            throw DataError("config: the percentile table is defined under the normal null");
        }
        if (kind == ExperimentKind::size_power) {
            if (tests.empty()) throw DataError("config: size_power requires a tests list");
            for (const TestId t : tests) {
                const bool needs_discrete = (t == TestId::poisson);
                if (needs_discrete != (family.kind() == Case::discrete)) {
                    throw DataError(std::string("config: test '") + to_string(t) +
                                    "' does not apply to a " + to_string(family.kind()) +
                                    " family");
                }
            }
        }
    }
};

/// Runs fn(i) for i in [0, count) on `threads` workers. Work is chunked off an
/// atomic counter; results must be written to per-index slots so aggregation
/// order stays fixed. The first exception thrown by any worker is rethrown on
/// the calling thread after the pool drains.
template <typename Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    constexpr std::uint64_t chunk = 64;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t begin = next.fetch_add(chunk);
            if (begin >= count || failed.load(std::memory_order_relaxed)) return;
            const std::uint64_t end = std::min(begin + chunk, count);
            for (std::uint64_t i = begin; i < end; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    {
                        const std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Estimator bias/MSE tables
// ---------------------------------------------------------------------------

struct EstimatorRow {
    std::size_t n = 0;
    double mean_delta = 0, mse_delta = 0;
    double mean_beta = 0, mse_beta = 0;
    double mean_gamma = 0, mse_gamma = 0;
    double p_delta = 0;      // rejection rate of the delta=0 test at alpha
    double p_delta_se = 0;
    std::uint64_t decided = 0;
    std::uint64_t nodecision = 0;
};

struct EstimatorTableResult {
    std::vector<EstimatorRow> rows;
    QParams true_params;
};

[[nodiscard]] inline EstimatorTableResult run_estimator_table(const ExperimentConfig& cfg) {
    cfg.validate();
    EstimatorTableResult result;
    result.true_params = true_q_params(cfg.family);
    const double z_crit = normal_quantile(1.0 - 0.5 * cfg.alpha);
    const std::string family_str = cfg.family.to_string();

    for (const std::size_t n : cfg.sizes) {
        const std::uint64_t experiment =
            stream_label("estimator_table/" + family_str + "/n=" + std::to_string(n));

        struct Rep {
            double delta = 0, beta = 0, gamma = 0;
            bool reject = false;
            bool decided = false;
        };
        std::vector<Rep> reps(cfg.reps);
        parallel_for(cfg.reps, cfg.threads, [&](std::uint64_t i) {
            RngStream g = substream(cfg.seed, experiment, i);
            const Sample s = sample(cfg.family, n, g);
            try {
                const MomentSet ms = central_moments(s, 4);
                assert_nondegenerate(ms, s);
                const QParams qp = estimate_continuous(ms);
                const double z = std::sqrt(static_cast<double>(n)) * qp.delta /
                                 std::sqrt(sigma0_delta(ms.m[2], ms.m[3]));
                reps[i] = Rep{qp.delta, qp.beta, qp.gamma, std::fabs(z) > z_crit, true};
            } catch (const DataError&) {
                reps[i] = Rep{};
            }
        });

        // Fixed-order reduction keeps results bit-identical across thread counts.
        EstimatorRow row;
        row.n = n;
        CompensatedSum sd, sb, sg, qd, qb, qg;
        std::uint64_t rejects = 0;
        for (const Rep& r : reps) {
            if (!r.decided) {
                ++row.nodecision;
                continue;
            }
            ++row.decided;
            rejects += r.reject ? 1 : 0;
            sd.add(r.delta);
            sb.add(r.beta);
            sg.add(r.gamma);
            const double ed = r.delta - result.true_params.delta;
            const double eb = r.beta - result.true_params.beta;
            const double eg = r.gamma - result.true_params.gamma;
            qd.add(ed * ed);
            qb.add(eb * eb);
            qg.add(eg * eg);
        }
        if (row.decided > 0) {
            const auto d = static_cast<double>(row.decided);
            row.mean_delta = sd.value() / d;
            row.mean_beta = sb.value() / d;
            row.mean_gamma = sg.value() / d;
            row.mse_delta = qd.value() / d;
            row.mse_beta = qb.value() / d;
            row.mse_gamma = qg.value() / d;
            row.p_delta = static_cast<double>(rejects) / d;
            row.p_delta_se = std::sqrt(row.p_delta * (1.0 - row.p_delta) / d);
        }
        result.rows.push_back(row);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Percentile tables (small-sample critical values)
// ---------------------------------------------------------------------------

/// Regenerates the empirical percentile table of the normality statistic under
/// the standard normal null.
[[nodiscard]] inline PercentileTable run_percentiles(const std::vector<std::size_t>& sizes,
                                                     std::uint64_t reps, std::uint64_t seed,
                                                     unsigned threads = 0) {
    PercentileTable table;
    table.provenance = "recalibrated";
    table.seed = seed;
    table.reps = reps;
    for (std::size_t i = 0; i < 4; ++i) {
        table.asymptotic[i] = chi2_quantile_upper(2, kTabulatedAlphas[i]);
    }
    const FamilySpec norm{};  // standard normal
    for (const std::size_t n : sizes) {
        const std::uint64_t experiment =
            stream_label("percentiles/normality/n=" + std::to_string(n));
        std::vector<double> stats(reps);
        parallel_for(reps, threads, [&](std::uint64_t i) {
            RngStream g = substream(seed, experiment, i);
            const Sample s = sample(norm, n, g);
            const MomentSet ms = central_moments(s, 4);
            stats[i] = normality_statistic(ms);
        });
        std::sort(stats.begin(), stats.end());
        PercentileTable::Row row;
        row.n = n;
        for (std::size_t c = 0; c < 4; ++c) {
            row.p[c] = quantile_type7(stats, 1.0 - kTabulatedAlphas[c]);
        }
        table.rows.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Size / power curves
// ---------------------------------------------------------------------------

struct SizePowerRow {
    TestId test;
    std::size_t n = 0;
    double rate = 0;  // rejection rate among decided replications
    double se = 0;
    std::uint64_t decided = 0;
    std::uint64_t nodecision = 0;
    double critical_value = 0;
    std::string crit_source;
};

[[nodiscard]] inline std::vector<SizePowerRow> run_size_power(const ExperimentConfig& cfg) {
    cfg.validate();
    for (const TestId t : cfg.tests) {
        const std::size_t min_n = (t == TestId::d) ? 10 : (is_competitor(t) ? 4 : 3);
        for (const std::size_t n : cfg.sizes) {
            if (n < min_n) {
                throw DataError(std::string("test '") + to_string(t) + "' needs n >= " +
                                std::to_string(min_n) + ", got " + std::to_string(n));
            }
        }
    }
    std::vector<SizePowerRow> rows;
    const std::string family_str = cfg.family.to_string();
    const std::size_t n_tests = cfg.tests.size();

    int max_order = 4;
    for (const TestId t : cfg.tests) {
        if (t == TestId::symmetry) max_order = 6;
    }

    for (const std::size_t n : cfg.sizes) {
        // Critical values first; calibration streams are independent of the
        // evaluation streams below.
        std::vector<double> crit(n_tests);
        std::vector<std::string> crit_source(n_tests);
        std::vector<bool> geq_rejection(n_tests, false);  // table mode rejects at >=
        for (std::size_t t = 0; t < n_tests; ++t) {
            const TestId id = cfg.tests[t];
            switch (id) {
                case TestId::normality:
                    if (cfg.normality_use_table) {
                        bool tabulated = true;
                        try {
                            crit[t] = lookup_percentile(published_percentile_table(), n, cfg.alpha);
                        } catch (const UnsupportedAlpha&) {
                            tabulated = false;
                        }
                        if (tabulated) {
                            crit_source[t] = "published_table";
                            geq_rejection[t] = true;
                            break;
                        }
                    }
                    crit[t] = chi2_quantile_upper(2, cfg.alpha);
                    crit_source[t] = "asymptotic";
                    break;
                case TestId::delta_zero:
                case TestId::symmetry:
                    crit[t] = normal_quantile(1.0 - 0.5 * cfg.alpha);
                    crit_source[t] = "asymptotic";
                    break;
                case TestId::poisson:
                    crit[t] = chi2_quantile_upper(3, cfg.alpha);
                    crit_source[t] = "asymptotic";
                    break;
                default: {
                    const auto cvs = calibrate_critical_values(competitor_of(id), {n},
                                                               {cfg.alpha}, cfg.calib_reps,
                                                               cfg.seed);
                    crit[t] = cvs.front().value;
                    crit_source[t] = "monte_carlo";
                    break;
                }
            }
        }

        const std::uint64_t experiment =
            stream_label("size_power/" + family_str + "/n=" + std::to_string(n));
        enum : std::uint8_t { kAccept = 0, kReject = 1, kNoDecision = 2 };
        std::vector<std::uint8_t> outcome(cfg.reps * n_tests);

        parallel_for(cfg.reps, cfg.threads, [&](std::uint64_t i) {
            RngStream g = substream(cfg.seed, experiment, i);
            const Sample s = sample(cfg.family, n, g);
            std::optional<MomentSet> ms;
            try {
                ms = central_moments(s, max_order);
            } catch (const DataError&) {
                ms.reset();
            }
            for (std::size_t t = 0; t < n_tests; ++t) {
                const TestId id = cfg.tests[t];
                std::uint8_t& slot = outcome[i * n_tests + t];
                try {
                    double stat;
                    if (is_competitor(id)) {
                        stat = competitor_rejection_statistic(competitor_of(id), s);
                    } else if (!ms) {
                        slot = kNoDecision;
                        continue;
                    } else {
                        switch (id) {
                            case TestId::normality:
                                assert_nondegenerate(*ms, s);
                                stat = normality_statistic(*ms);
                                break;
                            case TestId::delta_zero:
                                assert_nondegenerate(*ms, s);
                                stat = delta_zero_statistic(*ms);
                                stat = std::fabs(stat);
                                break;
                            case TestId::symmetry:
                                stat = std::fabs(symmetry_statistic(*ms));
                                break;
                            case TestId::poisson:
                                assert_nondegenerate(*ms, s);
                                stat = poisson_statistic(*ms);
                                break;
                            default:
                                slot = kNoDecision;
                                continue;
                        }
                    }
                    const bool reject = geq_rejection[t] ? stat >= crit[t] : stat > crit[t];
                    slot = reject ? kReject : kAccept;
                } catch (const DataError&) {
                    slot = kNoDecision;
                } catch (const NumericError&) {
                    slot = kNoDecision;
                }
            }
        });

        for (std::size_t t = 0; t < n_tests; ++t) {
            SizePowerRow row;
            row.test = cfg.tests[t];
            row.n = n;
            row.critical_value = crit[t];
            row.crit_source = crit_source[t];
            std::uint64_t rejects = 0;
            for (std::uint64_t i = 0; i < cfg.reps; ++i) {
                switch (outcome[i * n_tests + t]) {
                    case kReject: ++rejects; ++row.decided; break;
                    case kAccept: ++row.decided; break;
                    default: ++row.nodecision; break;
                }
            }
            if (row.decided > 0) {
                row.rate = static_cast<double>(rejects) / static_cast<double>(row.decided);
                row.se = std::sqrt(row.rate * (1.0 - row.rate) /
                                   static_cast<double>(row.decided));
            }
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Config file (INI-style key = value)
// ---------------------------------------------------------------------------

[[nodiscard]] inline std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = detail::trim(text.substr(pos, comma - pos));
        if (!item.empty()) sizes.push_back(static_cast<std::size_t>(std::stoull(item)));
        pos = comma + 1;
    }
    return sizes;
}

[[nodiscard]] inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';' || t.front() == '[') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw DataError(path + ": line " + std::to_string(line_no) + " is not 'key = value'");
        }
        kv[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }

    ExperimentConfig cfg;
    const auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    const auto kind = take("kind");
    if (!kind) throw DataError(path + ": missing 'kind'");
    if (*kind == "estimator_table") cfg.kind = ExperimentKind::estimator_table;
    else if (*kind == "percentiles") cfg.kind = ExperimentKind::percentiles;
    else if (*kind == "size_power") cfg.kind = ExperimentKind::size_power;
    else throw DataError(path + ": unknown kind '" + *kind + "'");

    const auto family = take("family");
    if (!family) throw DataError(path + ": missing 'family'");
    cfg.family = FamilySpec::parse(*family);

    const auto sizes = take("sizes");
    if (!sizes) throw DataError(path + ": missing 'sizes'");
    cfg.sizes = parse_size_list(*sizes);

    if (const auto v = take("reps")) cfg.reps = std::stoull(*v);
    if (const auto v = take("seed")) {
        cfg.seed = std::stoull(*v);
        cfg.seed_explicit = true;
    }
    if (const auto v = take("alpha")) cfg.alpha = std::stod(*v);
    if (const auto v = take("calib_reps")) cfg.calib_reps = std::stoull(*v);
    if (const auto v = take("threads")) cfg.threads = static_cast<unsigned>(std::stoul(*v));
    if (const auto v = take("out")) cfg.out = *v;
    if (const auto v = take("normality_critical")) {
        if (*v == "table") cfg.normality_use_table = true;
        else if (*v == "asymptotic") cfg.normality_use_table = false;
        else throw DataError(path + ": normality_critical must be 'table' or 'asymptotic'");
    }
    if (const auto v = take("tests")) {
        std::size_t pos = 0;
        while (pos < v->size()) {
            auto comma = v->find(',', pos);
            if (comma == std::string::npos) comma = v->size();
            const std::string item = detail::trim(v->substr(pos, comma - pos));
            if (!item.empty()) cfg.tests.push_back(parse_test_id(item));
            pos = comma + 1;
        }
    }
    if (!kv.empty()) throw DataError(path + ": unknown config key '" + kv.begin()->first + "'");
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

inline void write_estimator_csv(const std::string& path, const EstimatorTableResult& result) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "n,mean_delta,mse_delta,mean_beta,mse_beta,mean_gamma,mse_gamma,"
           "p_delta,p_delta_se,decided,nodecision\n";
    for (const auto& r : result.rows) {
        out << r.n << ',' << format_double(r.mean_delta) << ',' << format_double(r.mse_delta)
            << ',' << format_double(r.mean_beta) << ',' << format_double(r.mse_beta) << ','
            << format_double(r.mean_gamma) << ',' << format_double(r.mse_gamma) << ','
            << format_double(r.p_delta) << ',' << format_double(r.p_delta_se) << ','
            << r.decided << ',' << r.nodecision << '\n';
    }
}

inline void write_percentile_csv(std::ostream& out, const PercentileTable& table) {
    out << "# provenance=" << table.provenance;
    if (table.provenance != "published") {
        out << " seed=" << table.seed << " reps=" << table.reps;
    }
    out << "\n";
    out << "n,p90,p95,p975,p99\n";
    for (const auto& row : table.rows) {
        out << row.n;
        for (const double p : row.p) out << ',' << format_double(p);
        out << '\n';
    }
    out << "inf";
    for (const double p : table.asymptotic) out << ',' << format_double(p);
    out << '\n';
}

inline void write_percentile_csv(const std::string& path, const PercentileTable& table) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    write_percentile_csv(out, table);
}

[[nodiscard]] inline PercentileTable load_percentile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    PercentileTable table;
    table.provenance = "file:" + path;
    bool have_asymptotic = false;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#' || t.rfind("n,", 0) == 0) continue;
        const auto cells = detail::split_csv_line(t);
        if (cells.size() != 5) throw DataError(path + ": expected 5 columns");
        std::array<double, 4> p{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (!detail::parse_number(cells[i + 1], p[i])) {
                throw DataError(path + ": bad number '" + cells[i + 1] + "'");
            }
        }
        if (detail::trim(cells[0]) == "inf") {
            table.asymptotic = p;
            have_asymptotic = true;
        } else {
            table.rows.push_back({static_cast<std::size_t>(std::stoull(cells[0])), p});
        }
    }
    if (table.rows.empty()) throw DataError(path + ": no percentile rows");
    if (!have_asymptotic) {
        // tables without an inf row fall back to the chi-square(2) reference
        for (std::size_t i = 0; i < 4; ++i) {
            table.asymptotic[i] = chi2_quantile_upper(2, kTabulatedAlphas[i]);
        }
    }
    return table;
}

inline void write_size_power_csv(const std::string& path, const std::vector<SizePowerRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "test,n,rate,se,decided,nodecision,critical_value,crit_source\n";
    for (const auto& r : rows) {
        out << to_string(r.test) << ',' << r.n << ',' << format_double(r.rate) << ','
            << format_double(r.se) << ',' << r.decided << ',' << r.nodecision << ','
            << format_double(r.critical_value) << ',' << r.crit_source << '\n';
    }
}

inline void write_critical_values_csv(std::ostream& out, const std::vector<CriticalValue>& values) {
    out << "test,n,alpha,value,seed,reps\n";
    for (const auto& cv : values) {
        out << to_string(cv.test) << ',' << cv.n << ',' << format_double(cv.alpha) << ','
            << format_double(cv.value) << ',' << cv.seed << ',' << cv.reps << '\n';
    }
}

/// Runs the configured experiment and writes its CSV plus a JSON run manifest
/// into cfg.out. Returns the list of files written.
inline std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.out.empty()) throw DataError("config: missing output directory ('out')");
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> files;

    if (cfg.kind == ExperimentKind::estimator_table) {
        const auto result = run_estimator_table(cfg);
        const std::string path = (fs::path(cfg.out) / "estimator_table.csv").string();
        write_estimator_csv(path, result);
        files.push_back(path);
    } else if (cfg.kind == ExperimentKind::percentiles) {
        const auto table = run_percentiles(cfg.sizes, cfg.reps, cfg.seed, cfg.threads);
        const std::string path = (fs::path(cfg.out) / "percentiles.csv").string();
        write_percentile_csv(path, table);
        files.push_back(path);
    } else {
        const auto rows = run_size_power(cfg);
        const std::string path = (fs::path(cfg.out) / "size_power.csv").string();
        write_size_power_csv(path, rows);
        files.push_back(path);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json manifest;
    manifest["kind"] = to_string(cfg.kind);
    manifest["family"] = cfg.family.to_string();
    manifest["sizes"] = cfg.sizes;
    manifest["reps"] = cfg.reps;
    manifest["seed"] = cfg.seed;
    manifest["alpha"] = cfg.alpha;
    std::vector<std::string> test_names;
    for (const TestId t : cfg.tests) test_names.emplace_back(to_string(t));
    manifest["tests"] = test_names;
    manifest["calib_reps"] = cfg.calib_reps;
    manifest["normality_critical"] = cfg.normality_use_table ? "table" : "asymptotic";
    manifest["threads"] = cfg.threads;
    manifest["quantile_estimator"] = "type7";
    manifest["generator"] = std::string("pearsonq ") + kVersion;
    manifest["wall_time_seconds"] = wall;
    manifest["outputs"] = files;

    const std::string mpath = (fs::path(cfg.out) / "manifest.json").string();
    std::ofstream mout(mpath);
    if (!mout) throw DataError("cannot write " + mpath);
    mout << manifest.dump(2) << '\n';
    files.push_back(mpath);
    return files;
}

}  // namespace pearsonq

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <future>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "capacity.hpp"
#include "errors.hpp"
#include "fading_model.hpp"

namespace fcap {

// Batch evaluation over (SNR grid) x (parameter sets) x (schemes), the
// machinery behind the `sweep` and `figure` CLI subcommands. Rows are
// computed concurrently and emitted in deterministic grid-major order.

enum class Parameterization { gamma_bar, gamma_bar_1 };
enum class SweepOutputs { exact, asymptotic, both };

inline const char* to_string(Parameterization p) {
    return p == Parameterization::gamma_bar ? "gamma_bar" : "gamma_bar_1";
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct SnrPoint {
    double db;
    double linear;
    static SnrPoint from_db(double db) { return {db, db_to_linear(db)}; }
    static SnrPoint from_linear(double x) { return {linear_to_db(x), x}; }
};

struct SweepSpec {
    std::vector<SnrPoint> snr_grid;
    std::vector<std::pair<double, double>> param_sets;  // (m, ms)
    std::vector<Scheme> schemes;
    Parameterization parameterization = Parameterization::gamma_bar;
    SweepOutputs outputs = SweepOutputs::exact;
    std::optional<double> pt_db;  // recorded for provenance, never computed with

    void validate() const {
        constexpr const char* op = "SweepSpec";
        if (snr_grid.empty()) throw domain_error(op, "empty SNR grid");
        for (std::size_t i = 1; i < snr_grid.size(); ++i)
            if (!(snr_grid[i].linear > snr_grid[i - 1].linear))
                throw domain_error(op, "SNR grid must be strictly increasing");
        if (param_sets.empty()) throw domain_error(op, "no parameter sets");
        if (schemes.empty()) throw domain_error(op, "no schemes");
        for (const auto& s : schemes)
            if (s.kind == SchemeKind::tci && !s.gamma0)
                throw domain_error(op, "tci scheme requires gamma0");
    }

    static std::vector<SnrPoint> db_range(double start, double stop, double step) {
        if (!(step > 0.0)) throw domain_error("SweepSpec", "dB step must be > 0");
        std::vector<SnrPoint> grid;
        for (double db = start; db <= stop + 1e-9; db += step)
            grid.push_back(SnrPoint::from_db(db));
        return grid;
    }
};

struct SweepRow {
    double snr_db = 0.0;
    double snr_linear = 0.0;
    Parameterization parameterization = Parameterization::gamma_bar;
    double m = 0.0;
    double ms = 0.0;
    SchemeKind scheme = SchemeKind::ora;
    std::optional<double> gamma0;
    EcMethod method = EcMethod::closed_form;
    std::optional<double> ec_nats;
    std::optional<double> ec_bits;
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool any_failed = false;
};

namespace detail {

inline SweepRow compute_row(const SweepSpec& spec, const SnrPoint& snr, double m,
                            double ms, const Scheme& scheme, EcMethod method) {
    SweepRow row;
    row.snr_db = snr.db;
    row.snr_linear = snr.linear;
    row.parameterization = spec.parameterization;
    row.m = m;
    row.ms = ms;
    row.scheme = scheme.kind;
    row.method = method;
    if (scheme.kind == SchemeKind::tci) row.gamma0 = scheme.gamma0;
    try {
        const FadingParams p =
            spec.parameterization == Parameterization::gamma_bar
                ? FadingParams(m, ms, snr.linear)
                : FadingParams::from_true_mean(m, ms, snr.linear);
        double ec = 0.0;
        if (method == EcMethod::closed_form) {
            switch (scheme.kind) {
                case SchemeKind::opra: {
                    const EcResult r = ec_opra(p);
                    ec = r.ec_nats;
                    row.gamma0 = r.diagnostics.at("gamma0");
                    break;
                }
                case SchemeKind::ora: ec = ec_ora(p).ec_nats; break;
                case SchemeKind::ci: ec = ec_ci(p).ec_nats; break;
                case SchemeKind::tci: ec = ec_tci(p, *scheme.gamma0).ec_nats; break;
            }
        } else {
            switch (scheme.kind) {
                case SchemeKind::opra:
                    ec = ec_opra_asym(p, false);
                    row.gamma0 = 1.0;
                    break;
                case SchemeKind::ora: ec = ec_ora_asym(p); break;
                case SchemeKind::ci: ec = ec_ci_asym(p); break;
                case SchemeKind::tci: ec = ec_tci_asym(p, *scheme.gamma0); break;
            }
        }
        row.ec_nats = ec;
        row.ec_bits = ec / std::numbers::ln2;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace detail

inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    spec.validate();
    std::vector<EcMethod> methods;
    if (spec.outputs != SweepOutputs::asymptotic) methods.push_back(EcMethod::closed_form);
    if (spec.outputs != SweepOutputs::exact) methods.push_back(EcMethod::asymptotic);

    struct Task {
        const SnrPoint* snr;
        const std::pair<double, double>* params;
        const Scheme* scheme;
        EcMethod method;
    };
    std::vector<Task> tasks;
    for (const auto& snr : spec.snr_grid)
        for (const auto& ps : spec.param_sets)
            for (const auto& scheme : spec.schemes)
                for (EcMethod method : methods)
                    tasks.push_back({&snr, &ps, &scheme, method});

    SweepResult out;
    out.rows.resize(tasks.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, 16);

    std::vector<std::future<void>> jobs;
    const std::size_t chunk = (tasks.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(tasks.size(), lo + chunk);
        if (lo >= hi) break;
        jobs.push_back(std::async(std::launch::async, [&, lo, hi]() {
            for (std::size_t i = lo; i < hi; ++i)
                out.rows[i] =
                    detail::compute_row(spec, *tasks[i].snr, tasks[i].params->first,
                                        tasks[i].params->second, *tasks[i].scheme,
                                        tasks[i].method);
        }));
    }
    for (auto& j : jobs) j.get();
    for (const auto& r : out.rows)
        if (!r.error.empty()) out.any_failed = true;
    return out;
}

// ---- CSV -------------------------------------------------------------------

inline constexpr std::string_view kSweepCsvHeader =
    "snr_db,snr_linear,parameterization,m,ms,scheme,gamma0,method,ec_nats,ec_bits,error";

// Shortest round-trip decimal form, locale independent.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const char* op) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw domain_error(op, "bad numeric field '" + std::string(s) + "'");
    return v;
}

inline std::string to_csv(const SweepResult& result) {
    std::string out{kSweepCsvHeader};
    out += '\n';
    for (const auto& r : result.rows) {
        out += format_double(r.snr_db);
        out += ',';
        out += format_double(r.snr_linear);
        out += ',';
        out += to_string(r.parameterization);
        out += ',';
        out += format_double(r.m);
        out += ',';
        out += format_double(r.ms);
        out += ',';
        out += to_string(r.scheme);
        out += ',';
        if (r.gamma0) out += format_double(*r.gamma0);
        out += ',';
        out += to_string(r.method);
        out += ',';
        if (r.ec_nats) out += format_double(*r.ec_nats);
        out += ',';
        if (r.ec_bits) out += format_double(*r.ec_bits);
        out += ',';
        out += r.error;
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline SchemeKind scheme_from_string(std::string_view s, const char* op) {
    if (s == "opra") return SchemeKind::opra;
    if (s == "ora") return SchemeKind::ora;
    if (s == "ci") return SchemeKind::ci;
    if (s == "tci") return SchemeKind::tci;
    throw domain_error(op, "unknown scheme '" + std::string(s) + "'");
}

inline EcMethod method_from_string(std::string_view s, const char* op) {
    if (s == "closed_form" || s == "closed") return EcMethod::closed_form;
    if (s == "quadrature" || s == "quad") return EcMethod::quadrature;
    if (s == "asymptotic" || s == "asym") return EcMethod::asymptotic;
    if (s == "monte_carlo" || s == "mc") return EcMethod::monte_carlo;
    throw domain_error(op, "unknown method '" + std::string(s) + "'");
}

}  // namespace detail

inline std::vector<SweepRow> parse_csv(std::istream& in) {
    constexpr const char* op = "parse_csv";
    std::string line;
    if (!std::getline(in, line)) throw domain_error(op, "empty input");
    if (line != kSweepCsvHeader) throw domain_error(op, "unexpected header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 11) throw domain_error(op, "bad field count");
        SweepRow r;
        r.snr_db = parse_double(f[0], op);
        r.snr_linear = parse_double(f[1], op);
        r.parameterization = f[2] == "gamma_bar_1" ? Parameterization::gamma_bar_1
                                                   : Parameterization::gamma_bar;
        r.m = parse_double(f[3], op);
        r.ms = parse_double(f[4], op);
        r.scheme = detail::scheme_from_string(f[5], op);
        if (!f[6].empty()) r.gamma0 = parse_double(f[6], op);
        r.method = detail::method_from_string(f[7], op);
        if (!f[8].empty()) r.ec_nats = parse_double(f[8], op);
        if (!f[9].empty()) r.ec_bits = parse_double(f[9], op);
        r.error = f[10];
        rows.push_back(r);
    }
    return rows;
}

// ---- figure presets --------------------------------------------------------

// Reproductions of the three reference plots as sweep specifications. The
// exact per-curve m / ms lists for presets 1 and 2 are reconstructions and
// can be overridden from the CLI.
inline SweepSpec figure_preset(int which) {
    SweepSpec spec;
    spec.snr_grid = SweepSpec::db_range(0.0, 40.0, 2.0);
    spec.outputs = SweepOutputs::both;
    spec.pt_db = 0.0;
    switch (which) {
        case 1:  // TCI vs average SNR, gamma0 = 0.5, ms = 2.5, m varied
            spec.schemes = {Scheme::tci(0.5)};
            spec.param_sets = {{0.5, 2.5}, {1.0, 2.5}, {2.5, 2.5}};
            spec.parameterization = Parameterization::gamma_bar;
            return spec;
        case 2:  // all schemes vs true mean SNR, m = 3.5, gamma0 = 1, ms varied
            spec.schemes = {Scheme::opra(), Scheme::ora(), Scheme::tci(1.0), Scheme::ci()};
            spec.param_sets = {{3.5, 1.5}, {3.5, 2.5}, {3.5, 5.0}};
            spec.parameterization = Parameterization::gamma_bar_1;
            return spec;
        case 3:  // all schemes vs average SNR, m = 2.5, ms = 1.5, gamma0 = 1
            spec.schemes = {Scheme::opra(), Scheme::ora(), Scheme::tci(1.0), Scheme::ci()};
            spec.param_sets = {{2.5, 1.5}};
            spec.parameterization = Parameterization::gamma_bar;
            return spec;
        default:
            throw domain_error("figure_preset", "figure index must be 1, 2 or 3");
    }
}

// ---- flat key-value sweep config --------------------------------------------

// One `key = value` pair per line; '#' starts a comment; `param_set = m,ms`
// may repeat. Unknown keys are rejected.
struct SweepOverlay {
    std::optional<std::string> snr_db;   // "start:stop:step"
    std::optional<std::string> snr;      // comma list, linear scale
    std::vector<std::pair<double, double>> param_sets;
    std::optional<std::string> schemes;  // comma list
    std::optional<double> gamma0;
    std::optional<std::string> parameterization;
    std::optional<std::string> outputs;
    std::optional<double> pt_db;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline SweepOverlay parse_sweep_config(std::istream& in) {
    constexpr const char* op = "parse_sweep_config";
    SweepOverlay cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = detail::trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw domain_error(op, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key == "snr_db")
            cfg.snr_db = value;
        else if (key == "snr")
            cfg.snr = value;
        else if (key == "param_set") {
            const auto parts = detail::split(value, ',');
            if (parts.size() != 2)
                throw domain_error(op, "param_set expects 'm,ms'");
            cfg.param_sets.emplace_back(parse_double(detail::trim(parts[0]), op),
                                        parse_double(detail::trim(parts[1]), op));
        } else if (key == "schemes")
            cfg.schemes = value;
        else if (key == "gamma0")
            cfg.gamma0 = parse_double(value, op);
        else if (key == "parameterization")
            cfg.parameterization = value;
        else if (key == "outputs")
            cfg.outputs = value;
        else if (key == "pt_db")
            cfg.pt_db = parse_double(value, op);
        else
            throw domain_error(op, "unknown key '" + key + "'");
    }
    return cfg;
}

// Flags override file values; the merged overlay must fully determine a
// valid SweepSpec.
inline SweepSpec build_sweep_spec(const SweepOverlay& file, const SweepOverlay& flags) {
    constexpr const char* op = "build_sweep_spec";
    SweepOverlay cfg = file;
    if (flags.snr_db) cfg.snr_db = flags.snr_db;
    if (flags.snr) cfg.snr = flags.snr;
    if (!flags.param_sets.empty()) cfg.param_sets = flags.param_sets;
    if (flags.schemes) cfg.schemes = flags.schemes;
    if (flags.gamma0) cfg.gamma0 = flags.gamma0;
    if (flags.parameterization) cfg.parameterization = flags.parameterization;
    if (flags.outputs) cfg.outputs = flags.outputs;
    if (flags.pt_db) cfg.pt_db = flags.pt_db;

    SweepSpec spec;
    if (cfg.snr_db && cfg.snr) throw domain_error(op, "give either snr_db or snr, not both");
    if (cfg.snr_db) {
        const auto parts = detail::split(*cfg.snr_db, ':');
        if (parts.size() != 3) throw domain_error(op, "snr_db expects 'start:stop:step'");
        spec.snr_grid = SweepSpec::db_range(parse_double(parts[0], op),
                                            parse_double(parts[1], op),
                                            parse_double(parts[2], op));
    } else if (cfg.snr) {
        for (const auto& tok : detail::split(*cfg.snr, ','))
            spec.snr_grid.push_back(SnrPoint::from_linear(parse_double(detail::trim(tok), op)));
    } else {
        throw domain_error(op, "an SNR grid is required (snr_db or snr)");
    }
    spec.param_sets = cfg.param_sets;
    if (cfg.schemes) {
        for (const auto& tok : detail::split(*cfg.schemes, ',')) {
            const SchemeKind kind = detail::scheme_from_string(detail::trim(tok), op);
            if (kind == SchemeKind::tci) {
                if (!cfg.gamma0) throw domain_error(op, "tci scheme requires gamma0");
                spec.schemes.push_back(Scheme::tci(*cfg.gamma0));
            } else {
                spec.schemes.push_back(Scheme{kind, std::nullopt});
            }
        }
    }
    if (cfg.parameterization) {
        if (*cfg.parameterization == "gamma_bar")
            spec.parameterization = Parameterization::gamma_bar;
        else if (*cfg.parameterization == "gamma_bar_1")
            spec.parameterization = Parameterization::gamma_bar_1;
        else
            throw domain_error(op, "parameterization must be gamma_bar or gamma_bar_1");
    }
    if (cfg.outputs) {
        if (*cfg.outputs == "exact")
            spec.outputs = SweepOutputs::exact;
        else if (*cfg.outputs == "asymptotic")
            spec.outputs = SweepOutputs::asymptotic;
        else if (*cfg.outputs == "both")
            spec.outputs = SweepOutputs::both;
        else
            throw domain_error(op, "outputs must be exact, asymptotic or both");
    }
    spec.pt_db = cfg.pt_db;
    spec.validate();
    return spec;
}

}  // namespace fcap

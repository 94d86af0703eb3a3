// Command line front end: single evaluations, OPRA cutoff solving, Monte
// Carlo runs, parameter sweeps and canned figure reproductions, emitted as
// text, CSV or JSON.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 partial
// sweep failure.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fcap/fcap.hpp>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

struct SnrFlags {
    std::optional<double> snr, snr_db, snr1, snr1_db;

    void attach(CLI::App* cmd) {
        cmd->add_option("--snr", snr, "average SNR (linear scale)");
        cmd->add_option("--snr-db", snr_db, "average SNR in dB");
        cmd->add_option("--snr1", snr1, "true mean SNR (linear scale, needs ms > 1)");
        cmd->add_option("--snr1-db", snr1_db, "true mean SNR in dB (needs ms > 1)");
    }

    fcap::FadingParams make_params(double m, double ms) const {
        const int given = (snr ? 1 : 0) + (snr_db ? 1 : 0) + (snr1 ? 1 : 0) +
                          (snr1_db ? 1 : 0);
        if (given != 1)
            throw CLI::ValidationError(
                "exactly one of --snr, --snr-db, --snr1, --snr1-db is required");
        try {
            if (snr) return fcap::FadingParams(m, ms, *snr);
            if (snr_db) return fcap::FadingParams(m, ms, fcap::db_to_linear(*snr_db));
            if (snr1) return fcap::FadingParams::from_true_mean(m, ms, *snr1);
            return fcap::FadingParams::from_true_mean(m, ms,
                                                      fcap::db_to_linear(*snr1_db));
        } catch (const fcap::numeric_error& e) {
            // bad flag values are usage errors, not numerical failures
            throw CLI::ValidationError(e.what());
        }
    }

    bool true_mean_parameterization() const { return snr1 || snr1_db; }
};

fcap::SchemeKind parse_scheme(const std::string& name) {
    if (name == "opra") return fcap::SchemeKind::opra;
    if (name == "ora") return fcap::SchemeKind::ora;
    if (name == "ci") return fcap::SchemeKind::ci;
    if (name == "tci") return fcap::SchemeKind::tci;
    throw CLI::ValidationError("--scheme must be one of opra|ora|ci|tci");
}

fcap::Scheme make_scheme(fcap::SchemeKind kind, const std::optional<double>& gamma0) {
    if (kind == fcap::SchemeKind::tci) {
        if (!gamma0) throw CLI::ValidationError("tci requires --gamma0");
        return fcap::Scheme::tci(*gamma0);
    }
    return fcap::Scheme{kind, std::nullopt};
}

void print_record(const std::vector<std::pair<std::string, std::string>>& fields,
                  bool as_json) {
    if (as_json) {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : fields) {
            double num = 0.0;
            const auto res = std::from_chars(v.data(), v.data() + v.size(), num);
            if (res.ec == std::errc() && res.ptr == v.data() + v.size())
                j[k] = num;
            else
                j[k] = v;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& [k, v] : fields) std::cout << k << " = " << v << "\n";
    }
}

std::string fmt(double v) { return fcap::format_double(v); }

nlohmann::ordered_json rows_to_json(const fcap::SweepResult& result) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
        nlohmann::ordered_json j;
        j["snr_db"] = r.snr_db;
        j["snr_linear"] = r.snr_linear;
        j["parameterization"] = fcap::to_string(r.parameterization);
        j["m"] = r.m;
        j["ms"] = r.ms;
        j["scheme"] = fcap::to_string(r.scheme);
        if (r.gamma0)
            j["gamma0"] = *r.gamma0;
        else
            j["gamma0"] = nullptr;
        j["method"] = fcap::to_string(r.method);
        if (r.ec_nats)
            j["ec_nats"] = *r.ec_nats;
        else
            j["ec_nats"] = nullptr;
        if (r.ec_bits)
            j["ec_bits"] = *r.ec_bits;
        else
            j["ec_bits"] = nullptr;
        j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr;
}

int write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot open output file '" << path << "'\n";
        return kExitUsage;
    }
    out << content;
    return 0;
}

int run_sweep_command(const fcap::SweepSpec& spec, const std::string& out_path,
                      const std::string& format) {
    const fcap::SweepResult result = fcap::run_sweep(spec);
    std::string content;
    if (format == "json")
        content = rows_to_json(result).dump(2) + "\n";
    else
        content = fcap::to_csv(result);
    const int rc = write_output(out_path, content);
    if (rc != 0) return rc;
    if (spec.pt_db)
        std::cerr << "pt_db = " << fmt(*spec.pt_db) << " (recorded only; EC depends on the power ratio)\n";
    if (result.any_failed) {
        std::cerr << "sweep completed with failed rows\n";
        return kExitPartial;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergodic capacity toolkit for Fisher-Snedecor F fading channels"};
    app.require_subcommand(1);

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate the EC of one configuration");
    std::string eval_scheme;
    double eval_m = 0.0, eval_ms = 0.0;
    std::optional<double> eval_gamma0;
    std::string eval_method = "closed";
    std::string eval_unit = "nats";
    std::uint64_t eval_samples = 1000000, eval_seed = 12345;
    unsigned eval_shards = 1;
    SnrFlags eval_snr;
    eval->add_option("--scheme", eval_scheme, "opra|ora|ci|tci")->required();
    eval->add_option("--m", eval_m, "fading severity m > 0")->required();
    eval->add_option("--ms", eval_ms, "shadowing shape ms > 0")->required();
    eval_snr.attach(eval);
    eval->add_option("--gamma0", eval_gamma0, "TCI cutoff (> 0)");
    eval->add_option("--method", eval_method, "closed|quad|asym|mc")
        ->check(CLI::IsMember({"closed", "quad", "asym", "mc"}));
    eval->add_option("--unit", eval_unit, "nats|bits")
        ->check(CLI::IsMember({"nats", "bits"}));
    eval->add_option("--samples", eval_samples, "Monte Carlo sample count");
    eval->add_option("--seed", eval_seed, "Monte Carlo seed");
    eval->add_option("--shards", eval_shards, "Monte Carlo shards");
    std::string eval_format = "text";
    eval->add_option("--format", eval_format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    // ---- cutoff ----
    auto* cutoff = app.add_subcommand("cutoff", "solve the OPRA cutoff");
    double cut_m = 0.0, cut_ms = 0.0, cut_tol = 1e-12;
    SnrFlags cut_snr;
    std::string cut_format = "text";
    cutoff->add_option("--m", cut_m)->required();
    cutoff->add_option("--ms", cut_ms)->required();
    cut_snr.attach(cutoff);
    cutoff->add_option("--tol", cut_tol, "bisection interval tolerance (>= 1e-12)");
    cutoff->add_option("--format", cut_format)->check(CLI::IsMember({"text", "json"}));

    // ---- mc ----
    auto* mc = app.add_subcommand("mc", "Monte Carlo EC estimate vs the closed form");
    std::string mc_scheme;
    double mc_m = 0.0, mc_ms = 0.0;
    std::optional<double> mc_gamma0;
    std::uint64_t mc_samples = 10000000, mc_seed = 12345;
    unsigned mc_shards = 1;
    SnrFlags mc_snr;
    std::string mc_format = "text";
    mc->add_option("--scheme", mc_scheme)->required();
    mc->add_option("--m", mc_m)->required();
    mc->add_option("--ms", mc_ms)->required();
    mc_snr.attach(mc);
    mc->add_option("--gamma0", mc_gamma0);
    mc->add_option("--samples", mc_samples);
    mc->add_option("--seed", mc_seed);
    mc->add_option("--shards", mc_shards);
    mc->add_option("--format", mc_format)->check(CLI::IsMember({"text", "json"}));

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "batch evaluation to CSV/JSON");
    std::string sweep_config_path, sweep_out = "-", sweep_format = "csv";
    fcap::SweepOverlay sweep_flags;
    std::vector<std::string> sweep_param_sets;
    std::optional<std::string> sw_snr_db, sw_snr, sw_schemes, sw_parameterization, sw_outputs;
    std::optional<double> sw_gamma0, sw_pt_db;
    sweep->add_option("--config", sweep_config_path, "key-value sweep config file");
    sweep->add_option("--snr-db", sw_snr_db, "dB grid 'start:stop:step'");
    sweep->add_option("--snr", sw_snr, "linear grid 'x1,x2,...'");
    sweep->add_option("--param-set", sweep_param_sets, "'m,ms' (repeatable)");
    sweep->add_option("--schemes", sw_schemes, "comma list of opra|ora|ci|tci");
    sweep->add_option("--gamma0", sw_gamma0, "cutoff for tci schemes");
    sweep->add_option("--parameterization", sw_parameterization, "gamma_bar|gamma_bar_1");
    sweep->add_option("--outputs", sw_outputs, "exact|asymptotic|both");
    sweep->add_option("--pt-db", sw_pt_db, "average transmit power in dB (recorded only)");
    sweep->add_option("--out", sweep_out, "output path ('-' for stdout)");
    sweep->add_option("--format", sweep_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    // ---- figure ----
    auto* figure = app.add_subcommand("figure", "reproduce a reference figure dataset");
    int figure_index = 0;
    std::string fig_out, fig_format = "csv";
    std::optional<std::string> fig_m_list, fig_ms_list, fig_snr_db;
    std::optional<double> fig_gamma0, fig_pt_db;
    figure->add_option("index", figure_index, "1, 2 or 3")->required();
    figure->add_option("--m-list", fig_m_list, "override the m list (figure 1)");
    figure->add_option("--ms-list", fig_ms_list, "override the ms list (figure 2)");
    figure->add_option("--snr-db", fig_snr_db, "override the dB grid 'start:stop:step'");
    figure->add_option("--gamma0", fig_gamma0, "override the TCI cutoff");
    figure->add_option("--pt-db", fig_pt_db, "average transmit power in dB (recorded only)");
    figure->add_option("--out", fig_out, "output path (default figure<N>.csv)");
    figure->add_option("--format", fig_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*eval) {
            const bool as_json = eval_format == "json";
            const auto kind = parse_scheme(eval_scheme);
            const auto scheme = make_scheme(kind, eval_gamma0);
            const auto p = eval_snr.make_params(eval_m, eval_ms);

            fcap::EcResult result;
            std::optional<fcap::McEstimate> mc_est;
            if (eval_method == "closed") {
                switch (kind) {
                    case fcap::SchemeKind::opra: result = fcap::ec_opra(p); break;
                    case fcap::SchemeKind::ora: result = fcap::ec_ora(p); break;
                    case fcap::SchemeKind::ci: result = fcap::ec_ci(p); break;
                    case fcap::SchemeKind::tci:
                        result = fcap::ec_tci(p, *scheme.gamma0);
                        break;
                }
            } else if (eval_method == "quad") {
                result = fcap::ec_quadrature(p, scheme);
            } else if (eval_method == "asym") {
                result.scheme = scheme;
                result.method = fcap::EcMethod::asymptotic;
                switch (kind) {
                    case fcap::SchemeKind::opra: {
                        const auto sol = fcap::solve_opra_cutoff(p);
                        result.ec_nats = fcap::ec_opra_asym(p, true);
                        result.diagnostics["gamma0"] = sol.gamma0;
                        break;
                    }
                    case fcap::SchemeKind::ora: result.ec_nats = fcap::ec_ora_asym(p); break;
                    case fcap::SchemeKind::ci: result.ec_nats = fcap::ec_ci_asym(p); break;
                    case fcap::SchemeKind::tci:
                        result.ec_nats = fcap::ec_tci_asym(p, *scheme.gamma0);
                        break;
                }
            } else {  // mc
                mc_est = fcap::mc_ec(p, scheme, eval_samples, eval_seed, eval_shards);
                result.scheme = scheme;
                result.method = fcap::EcMethod::monte_carlo;
                result.ec_nats = mc_est->mean;
                result.diagnostics["std_error"] = mc_est->std_error;
            }

            std::vector<std::pair<std::string, std::string>> fields;
            fields.emplace_back("scheme", fcap::to_string(kind));
            fields.emplace_back("m", fmt(eval_m));
            fields.emplace_back("ms", fmt(eval_ms));
            fields.emplace_back("parameterization",
                                eval_snr.true_mean_parameterization() ? "gamma_bar_1"
                                                                      : "gamma_bar");
            fields.emplace_back("snr_linear", fmt(p.avg_snr));
            fields.emplace_back("snr_db", fmt(fcap::linear_to_db(p.avg_snr)));
            fields.emplace_back("method", fcap::to_string(result.method));
            fields.emplace_back("ec_nats", fmt(result.ec_nats));
            fields.emplace_back("ec_bits", fmt(result.ec_nats / std::numbers::ln2));
            fields.emplace_back("unit", eval_unit);
            fields.emplace_back("ec", fmt(eval_unit == "bits"
                                              ? result.ec_nats / std::numbers::ln2
                                              : result.ec_nats));
            for (const auto& [k, v] : result.diagnostics) fields.emplace_back(k, fmt(v));
            if (result.diagnostics.count("divergent_inverse_moment"))
                fields.emplace_back("note",
                                    "inverse moment diverges for m <= 1; capacity is 0");
            print_record(fields, as_json);
            return 0;
        }

        if (*cutoff) {
            const auto p = cut_snr.make_params(cut_m, cut_ms);
            const auto sol = fcap::solve_opra_cutoff(p, cut_tol);
            print_record({{"gamma0", fmt(sol.gamma0)},
                          {"residual", fmt(sol.residual)},
                          {"iterations", fmt((double)sol.iterations)},
                          {"bracket_lo", fmt(sol.bracket.first)},
                          {"bracket_hi", fmt(sol.bracket.second)}},
                         cut_format == "json");
            return 0;
        }

        if (*mc) {
            const auto kind = parse_scheme(mc_scheme);
            const auto scheme = make_scheme(kind, mc_gamma0);
            const auto p = mc_snr.make_params(mc_m, mc_ms);
            const auto est = fcap::mc_ec(p, scheme, mc_samples, mc_seed, mc_shards);
            double closed = 0.0;
            switch (kind) {
                case fcap::SchemeKind::opra: closed = fcap::ec_opra(p).ec_nats; break;
                case fcap::SchemeKind::ora: closed = fcap::ec_ora(p).ec_nats; break;
                case fcap::SchemeKind::ci: closed = fcap::ec_ci(p).ec_nats; break;
                case fcap::SchemeKind::tci:
                    closed = fcap::ec_tci(p, *scheme.gamma0).ec_nats;
                    break;
            }
            const double z = (est.mean - closed) / est.std_error;
            print_record({{"scheme", fcap::to_string(kind)},
                          {"mean_nats", fmt(est.mean)},
                          {"std_error", fmt(est.std_error)},
                          {"n", std::to_string(est.n)},
                          {"seed", std::to_string(est.seed)},
                          {"shards", std::to_string(est.shards)},
                          {"closed_form_nats", fmt(closed)},
                          {"z_score", fmt(z)}},
                         mc_format == "json");
            return 0;
        }

        if (*sweep) {
            fcap::SweepOverlay file_cfg;
            if (!sweep_config_path.empty()) {
                std::ifstream in(sweep_config_path);
                if (!in) {
                    std::cerr << "cannot open config file '" << sweep_config_path << "'\n";
                    return kExitUsage;
                }
                file_cfg = fcap::parse_sweep_config(in);
            }
            sweep_flags.snr_db = sw_snr_db;
            sweep_flags.snr = sw_snr;
            sweep_flags.schemes = sw_schemes;
            sweep_flags.gamma0 = sw_gamma0;
            sweep_flags.parameterization = sw_parameterization;
            sweep_flags.outputs = sw_outputs;
            sweep_flags.pt_db = sw_pt_db;
            for (const auto& ps : sweep_param_sets) {
                std::istringstream ss(ps);
                std::string a, b;
                if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
                    std::cerr << "--param-set expects 'm,ms'\n";
                    return kExitUsage;
                }
                sweep_flags.param_sets.emplace_back(fcap::parse_double(a, "cli"),
                                                    fcap::parse_double(b, "cli"));
            }
            const auto spec = fcap::build_sweep_spec(file_cfg, sweep_flags);
            return run_sweep_command(spec, sweep_out, sweep_format);
        }

        if (*figure) {
            fcap::SweepSpec spec = fcap::figure_preset(figure_index);
            if (fig_gamma0)
                for (auto& s : spec.schemes)
                    if (s.kind == fcap::SchemeKind::tci) s.gamma0 = *fig_gamma0;
            if (fig_snr_db) {
                std::istringstream ss(*fig_snr_db);
                std::string a, b, c;
                if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
                    !std::getline(ss, c)) {
                    std::cerr << "--snr-db expects 'start:stop:step'\n";
                    return kExitUsage;
                }
                spec.snr_grid = fcap::SweepSpec::db_range(fcap::parse_double(a, "cli"),
                                                          fcap::parse_double(b, "cli"),
                                                          fcap::parse_double(c, "cli"));
            }
            auto parse_list = [&](const std::string& text) {
                std::vector<double> vals;
                std::istringstream ss(text);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    vals.push_back(fcap::parse_double(tok, "cli"));
                return vals;
            };
            if (fig_m_list) {
                if (figure_index != 1) {
                    std::cerr << "--m-list applies to figure 1 only\n";
                    return kExitUsage;
                }
                spec.param_sets.clear();
                for (double mv : parse_list(*fig_m_list)) spec.param_sets.emplace_back(mv, 2.5);
            }
            if (fig_ms_list) {
                if (figure_index != 2) {
                    std::cerr << "--ms-list applies to figure 2 only\n";
                    return kExitUsage;
                }
                spec.param_sets.clear();
                for (double msv : parse_list(*fig_ms_list))
                    spec.param_sets.emplace_back(3.5, msv);
            }
            if (fig_pt_db) spec.pt_db = fig_pt_db;
            if (fig_out.empty()) fig_out = "figure" + std::to_string(figure_index) +
                                           (fig_format == "json" ? ".json" : ".csv");
            return run_sweep_command(spec, fig_out, fig_format);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const fcap::domain_error& e) {
        // configuration mistakes surface as usage errors, not numeric ones
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const fcap::numeric_error& e) {
        std::cerr << "numerical failure in " << e.op() << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}

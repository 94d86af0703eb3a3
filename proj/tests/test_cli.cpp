#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <fcap/sweep.hpp>

// End-to-end tests driving the installed binary.

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(FCAP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) res.out.append(buf, got);
    const int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

double field(const std::string& text, const std::string& key) {
    const std::string needle = key + " = ";
    const auto pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    return std::strtod(text.c_str() + pos + needle.size(), nullptr);
}

}  // namespace

TEST_CASE("eval ci closed form") {
    const auto r = run("eval --scheme ci --m 2 --ms 3 --snr 2");
    CHECK(r.code == 0);
    CHECK(std::fabs(field(r.out, "ec_nats") - 0.693147) < 1e-6);
}

TEST_CASE("eval ci divergent case") {
    const auto r = run("eval --scheme ci --m 1 --ms 3 --snr 2");
    CHECK(r.code == 0);
    CHECK(field(r.out, "ec_nats") == 0.0);
    CHECK(r.out.find("diverges") != std::string::npos);
}

TEST_CASE("eval quadrature matches closed form") {
    const auto closed = run("eval --scheme opra --m 2.5 --ms 1.5 --snr 10 --method closed");
    const auto quad = run("eval --scheme opra --m 2.5 --ms 1.5 --snr 10 --method quad");
    CHECK(closed.code == 0);
    CHECK(quad.code == 0);
    const double a = field(closed.out, "ec_nats");
    const double b = field(quad.out, "ec_nats");
    CHECK(std::fabs(a - b) <= 1e-7 * std::fabs(a));
    CHECK(field(closed.out, "constraint_residual") < 1e-8);
}

TEST_CASE("eval dB equivalences and units") {
    const auto a = run("eval --scheme ora --m 2.5 --ms 1.5 --snr-db 10");
    const auto b = run("eval --scheme ora --m 2.5 --ms 1.5 --snr 10.0");
    CHECK(a.out == b.out);
    const auto c = run("eval --scheme ora --m 2.5 --ms 1.5 --snr-db 0");
    const auto d = run("eval --scheme ora --m 2.5 --ms 1.5 --snr 1.0");
    CHECK(c.out == d.out);

    const auto bits = run("eval --scheme ora --m 2.5 --ms 1.5 --snr 10 --unit bits");
    CHECK(std::fabs(field(bits.out, "ec") -
                    field(bits.out, "ec_nats") / std::numbers::ln2) < 1e-12);
}

TEST_CASE("eval true-mean parameterization") {
    const auto a = run("eval --scheme ora --m 2.5 --ms 2.5 --snr1 10");
    const auto b = run("eval --scheme ora --m 2.5 --ms 2.5 --snr 6.0");
    CHECK(a.code == 0);
    CHECK(std::fabs(field(a.out, "ec_nats") - field(b.out, "ec_nats")) < 1e-12);
    // true-mean form requires ms > 1
    CHECK(run("eval --scheme ora --m 2.5 --ms 1.0 --snr1 10").code == 2);
}

TEST_CASE("eval usage errors") {
    CHECK(run("eval --m 2 --ms 3 --snr 2").code == 2);                    // no scheme
    CHECK(run("eval --scheme bogus --m 2 --ms 3 --snr 2").code == 2);     // bad scheme
    CHECK(run("eval --scheme tci --m 2 --ms 3 --snr 2").code == 2);       // tci, no gamma0
    CHECK(run("eval --scheme ora --m 2 --ms 3").code == 2);               // no snr
    CHECK(run("eval --scheme ora --m 2 --ms 3 --snr 2 --snr-db 3").code == 2);
    CHECK(run("eval --scheme ora --m -2 --ms 3 --snr 2").code == 2);      // bad domain
}

TEST_CASE("eval json output") {
    const auto r = run("eval --scheme tci --m 2.5 --ms 1.5 --snr 10 --gamma0 1 --format json");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("scheme") == "tci");
    CHECK(j.at("ec_nats").get<double>() > 0.0);
}

TEST_CASE("cutoff subcommand") {
    const auto r = run("cutoff --m 2.5 --ms 1.5 --snr-db 80");
    CHECK(r.code == 0);
    const double g0 = field(r.out, "gamma0");
    CHECK(g0 > 0.0);
    CHECK(g0 <= 1.0);
    CHECK(std::fabs(g0 - 1.0) < 1e-3);
    CHECK(std::fabs(field(r.out, "residual")) < 1e-9);
    CHECK(field(r.out, "iterations") > 0);

    const auto low = run("cutoff --m 2.5 --ms 1.5 --snr 10");
    CHECK(std::fabs(field(low.out, "gamma0") - 0.864431734) < 1e-6);
}

TEST_CASE("mc subcommand determinism and agreement") {
    const auto a = run("mc --scheme ora --m 2.5 --ms 1.5 --snr 10 --samples 10000000 --seed 12345 --shards 4");
    CHECK(a.code == 0);
    CHECK(std::fabs(field(a.out, "z_score")) < 3.0);
    const auto b = run("mc --scheme ora --m 2.5 --ms 1.5 --snr 10 --samples 10000000 --seed 12345 --shards 4");
    CHECK(a.out == b.out);

    CHECK(run("mc --scheme ci --m 0.8 --ms 1.5 --snr 10 --samples 1000").code == 3);
}

TEST_CASE("sweep subcommand with config file and overrides") {
    const std::string cfg_path = "cli_test_sweep.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "snr_db = 0:10:5\n"
               "param_set = 2.5, 1.5\n"
               "schemes = ora,ci\n"
               "outputs = exact\n";
    }
    const auto r = run("sweep --config " + cfg_path);
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    const auto rows = fcap::parse_csv(in);
    CHECK(rows.size() == 3 * 2);

    // flag overrides shrink the scheme list
    const auto r2 = run("sweep --config " + cfg_path + " --schemes ora");
    std::istringstream in2(r2.out);
    CHECK(fcap::parse_csv(in2).size() == 3);

    // json output parses to the same rows
    const auto r3 = run("sweep --config " + cfg_path + " --format json");
    CHECK(r3.code == 0);
    const auto j = nlohmann::json::parse(r3.out);
    CHECK(j.is_array());
    CHECK(j.size() == 6);
    CHECK(j[0].at("scheme") == "ora");

    std::remove(cfg_path.c_str());
}

TEST_CASE("sweep partial failure exit code") {
    // CI asymptote is undefined at m = 1, producing an error row
    const auto r = run(
        "sweep --snr-db 0:10:10 --param-set 1.0,2.5 --schemes ci --outputs asymptotic");
    CHECK(r.code == 4);
    std::istringstream in(r.out);
    const auto rows = fcap::parse_csv(in);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].error.empty());
    CHECK_FALSE(rows[0].ec_nats.has_value());
}

TEST_CASE("sweep usage errors") {
    CHECK(run("sweep --param-set 2.5,1.5 --schemes ora").code == 2);  // no grid
    CHECK(run("sweep --snr-db 0:10:5 --schemes ora").code == 2);      // no params
    CHECK(run("nonsense").code == 2);
}

TEST_CASE("figure subcommand") {
    const std::string out_path = "cli_test_figure3.csv";
    const auto r = run("figure 3 --snr-db 10:40:10 --out " + out_path);
    CHECK(r.code == 0);
    std::ifstream in(out_path);
    REQUIRE(in.good());
    const auto rows = fcap::parse_csv(in);
    CHECK(rows.size() == 4 * 4 * 2);  // 4 snr x 4 schemes x (exact + asymptotic)
    // row-wise scheme ordering at and above 10 dB
    for (const auto& snr_db : {10.0, 20.0, 30.0, 40.0}) {
        double opra = 0, ora = 0, tci = 0, ci = 0;
        for (const auto& row : rows) {
            if (row.snr_db != snr_db || row.method != fcap::EcMethod::closed_form)
                continue;
            switch (row.scheme) {
                case fcap::SchemeKind::opra: opra = *row.ec_nats; break;
                case fcap::SchemeKind::ora: ora = *row.ec_nats; break;
                case fcap::SchemeKind::tci: tci = *row.ec_nats; break;
                case fcap::SchemeKind::ci: ci = *row.ec_nats; break;
            }
        }
        CHECK(opra >= ora);
        CHECK(ora >= tci);
        CHECK(tci >= ci);
    }
    std::remove(out_path.c_str());

    CHECK(run("figure 7").code == 2);
}

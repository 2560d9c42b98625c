#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "dqpt/commands.hpp"

using namespace dqpt;
using nlohmann::json;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

const json ssh_doc = json::parse(R"({"model_i":{"ssh":{"t1":1,"t2":0.5}},"model_f":{"ssh":{"t1":1,"t2":2.0}}})");

std::string config_error_field(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<none>";
}

std::string render(const OutputTable& t, TableFormat f) {
    std::ostringstream os;
    write_table(t, f, os);
    return os.str();
}

fs::path scratch_dir() {
    const fs::path p = fs::temp_directory_path() / ("dqpt_tests_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& out = {}, const fs::path& err = {}) {
    std::string cmd = std::string(DQPT_CLI_PATH) + " " + args;
    cmd += " > " + (out.empty() ? std::string("/dev/null") : out.string());
    cmd += " 2> " + (err.empty() ? std::string("/dev/null") : err.string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("config parsing") {
    const RunConfig cfg = parse_config(ssh_doc);
    REQUIRE(cfg.quench);
    CHECK(cfg.quench->initial().name() == "ssh");
    CHECK(cfg.quench->dimension() == 1);
    CHECK(cfg.quench->final().d(0.0).isApprox(DVectord(3.0, 0, 0)));
    CHECK(cfg.grid_n == 1000);
    CHECK(cfg.time.samples == 401);
    CHECK(cfg.format == TableFormat::Csv);

    json doc = ssh_doc;
    doc["grid"] = 300;
    doc["time"] = {{"t_min", 0.5}, {"t_max", 2.0}, {"samples", 11}};
    doc["output"] = {{"format", "ndjson"}};
    doc["k"] = 1.25;
    doc["n_range"] = {1, 3};
    const RunConfig c2 = parse_config(doc);
    CHECK(c2.grid_n == 300);
    CHECK(c2.time.t_min == 0.5);
    CHECK(c2.time.samples == 11);
    CHECK(c2.format == TableFormat::Ndjson);
    REQUIRE(c2.k);
    CHECK(c2.k->k == 1.25);
    CHECK(c2.n_range.first == 1);
    CHECK(c2.n_range.last == 3);

    const RunConfig hal = parse_config(json::parse(
        R"({"model_i":{"haldane":{"m":0.5}},"model_f":{"haldane":{"m":2.0}},"grid":{"n1":64,"n2":32},"k":[0.1,0.2]})"));
    CHECK(hal.quench->dimension() == 2);
    CHECK(hal.grid_n1 == 64);
    CHECK(hal.grid_n2 == 32);
    REQUIRE(hal.k);
    CHECK((hal.cell.at(hal.k->point.frac).cart - Vec2(0.1, 0.2)).norm() < 1e-12);
}

TEST_CASE("config errors carry the field path") {
    json doc = ssh_doc;
    doc["time"] = {{"t_min", 1.0}, {"t_max", 1.0}};
    CHECK(config_error_field(doc) == "time");

    doc = ssh_doc;
    doc["model_i"] = {{"custom", {{"dx", "m - cos(k)"}, {"dy", "0"}, {"dz", "0"}}}};
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("unbound variable 'm'") != std::string::npos);
    }

    doc = ssh_doc;
    doc["grdi"] = 10;
    CHECK(config_error_field(doc) == "grdi");
    doc = ssh_doc;
    doc["model_i"]["ssh"]["t3"] = 1;
    CHECK(config_error_field(doc) == "model_i.ssh.t3");
    doc = ssh_doc;
    doc["model_f"] = {{"ssh", {{"t1", 1}, {"t2", 2}}}, {"xy", {{"h", 1}, {"gamma", 1}}}};
    CHECK(config_error_field(doc).rfind("model_f", 0) == 0);
    doc = ssh_doc;
    doc["model_f"] = {{"haldane", {{"m", 1}}}};
    CHECK(config_error_field(doc) == "model_f");
    doc = ssh_doc;
    doc["model_i"] = {{"custom", {{"dx", "sin(k"}, {"dy", "0"}, {"dz", "0"}}}};
    CHECK(config_error_field(doc).rfind("model_i.custom.dx", 0) == 0);
    doc = ssh_doc;
    doc["output"] = {{"format", "xml"}};
    CHECK(config_error_field(doc) == "output.format");
    doc = ssh_doc;
    doc["grid"] = 1;
    CHECK(config_error_field(doc) == "grid");
    doc = ssh_doc;
    doc["k"] = json::array({0.1, 0.2});
    CHECK(config_error_field(doc) == "k");
}

TEST_CASE("custom models reproduce the built-ins") {
    const json doc = json::parse(R"json({
      "model_i": {"custom": {"dx": "0", "dy": "-gamma*sin(k)", "dz": "h - cos(k)",
                             "params": {"h": 0.2, "gamma": 0.1}, "class": "superconductor"}},
      "model_f": {"xy": {"h": 0.8, "gamma": 0.1}}})json");
    const RunConfig cfg = parse_config(doc);
    CHECK(cfg.quench->is_superconductor());
    const XyParams p{0.2, 0.1};
    for (double k : build_grid_1d(2000, true).k1d)
        CHECK((cfg.quench->initial().d(k) - d_xy(k, p)).norm() < 1e-12);
}

TEST_CASE("table serialization") {
    OutputTable t;
    t.command = "entropy-sweep";
    t.config_hash = "0123456789abcdef";
    t.tool_version = tool_version();
    t.add_column("k", ColumnType::Real);
    t.add_column("p", ColumnType::Real);
    t.add_column("S", ColumnType::Real);

    const std::string empty = render(t, TableFormat::Csv);
    CHECK(empty == "# dqpt " + tool_version() + " command=entropy-sweep config_hash=0123456789abcdef\nk,p,S\n");

    t.add_row({std::acos(-0.8), 0.5, std::log(2.0)});
    const std::string csv = render(t, TableFormat::Csv);
    CHECK(csv.substr(csv.rfind("k,p,S\n") + 6) == "2.4980915447965089,0.5,0.69314718055994529\n");

    CHECK_THROWS_AS(t.add_row({1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(t.add_row({1.0, 2.0, std::int64_t(3)}), std::invalid_argument);
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(format_real(-INFINITY) == "-inf");
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(-0.0) == "0");
}

TEST_CASE("NDJSON round trip") {
    OutputTable t;
    t.command = "check";
    t.config_hash = "feedfacecafebeef";
    t.tool_version = tool_version();
    t.add_column("name", ColumnType::Text);
    t.add_column("count", ColumnType::Integer);
    t.add_column("value", ColumnType::Real);
    std::mt19937_64 rng(89);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::uniform_int_distribution<std::int64_t> ui(-1000000000000LL, 1000000000000LL);
    for (int i = 0; i < 300; ++i)
        t.add_row({std::string("row \"") + std::to_string(i) + ",\n", ui(rng), u(rng) * std::pow(10.0, i % 40 - 20)});
    t.add_row({std::string(), std::int64_t(0), 5e-324});

    std::istringstream in(render(t, TableFormat::Ndjson));
    const OutputTable back = read_ndjson(in);
    CHECK(back.command == t.command);
    CHECK(back.config_hash == t.config_hash);
    CHECK(back.columns == t.columns);
    CHECK(back.types == t.types);
    CHECK(back.rows == t.rows);
}

TEST_CASE("unwritable destinations raise IoError") {
    OutputTable t;
    t.add_column("x", ColumnType::Real);
    try {
        write_table(t, TableFormat::Csv, std::string("/nonexistent-dir/out.csv"));
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.path() == "/nonexistent-dir/out.csv");
    }
}

TEST_CASE("commands are deterministic and carry the config hash") {
    json doc = ssh_doc;
    doc["grid"] = 256;
    doc["time"] = {{"samples", 51}};
    const RunConfig cfg = parse_config(doc);
    for (const std::string& cmd : command_names()) {
        if (cmd == "check") continue;
        const OutputTable a = run_command(cmd, cfg);
        const OutputTable b = run_command(cmd, cfg);
        CHECK(a.config_hash == cfg.hash());
        for (TableFormat f : {TableFormat::Csv, TableFormat::Ndjson}) {
            const std::string ra = render(a, f);
            CHECK(ra == render(b, f));
            CHECK(ra.substr(0, ra.find('\n')).find(cfg.hash()) != std::string::npos);
        }
    }
    json other = doc;
    other["grid"] = 257;
    CHECK(parse_config(other).hash() != cfg.hash());
    CHECK(parse_config(doc).hash() == cfg.hash());
}

TEST_CASE("entropy sweep peaks at the critical momentum") {
    json doc = ssh_doc;
    doc["grid"] = 1000;
    const OutputTable t = run_command("entropy-sweep", parse_config(doc));
    REQUIRE(t.columns == std::vector<std::string>{"k", "p", "one_minus_p", "S"});
    const auto best = std::max_element(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
        return std::get<double>(a[3]) < std::get<double>(b[3]);
    });
    CHECK(std::abs(std::get<double>((*best)[0])) == doctest::Approx(2.498).epsilon(2e-3));
    CHECK(std::get<double>((*best)[3]) == doctest::Approx(0.6931).epsilon(1e-4));
}

TEST_CASE("command tables") {
    const RunConfig cfg = parse_config(ssh_doc);
    const OutputTable crit = run_command("critical-k", cfg);
    REQUIRE(crit.rows.size() == 1);
    CHECK(std::abs(std::get<double>(crit.rows[0][0]) - std::acos(-0.8)) < 1e-9);
    CHECK(std::get<std::string>(crit.rows[0][2]) == "interior");

    json boundary = ssh_doc;
    boundary["model_f"]["ssh"]["t2"] = 1.0;
    const OutputTable b = run_command("critical-k", parse_config(boundary));
    REQUIRE(b.rows.size() == 1);
    CHECK(std::get<double>(b.rows[0][0]) == doctest::Approx(pi));
    CHECK(std::get<std::string>(b.rows[0][2]) == "boundary");

    const OutputTable sub = run_command("sublattice", cfg);
    CHECK(sub.columns == std::vector<std::string>{"k", "t", "a2", "S"});
    CHECK(sub.rows.size() == 401);

    json ident = ssh_doc;
    ident["model_f"] = ident["model_i"];
    CHECK(run_command("critical-k", parse_config(ident)).rows.empty());
    CHECK_THROWS_AS(run_command("sublattice", parse_config(ident)), ConfigError);

    const RunConfig none = parse_config(json::object());
    CHECK_THROWS_AS(run_command("rate", none), ConfigError);
    CHECK_THROWS_AS(run_command("bogus", cfg), ConfigError);
}

TEST_CASE("benchmark checks pass") {
    const RunConfig cfg = parse_config(json::object());
    for (const auto& [label, q] : benchmark_quenches()) {
        for (const CheckResult& r : run_checks(label, q, cfg)) CHECK_MESSAGE(r.passed, std::string(label + " " + r.name + " " + r.detail));
    }
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("exit codes and outputs") {
    const fs::path dir = scratch_dir();
    const fs::path ssh = dir / "ssh.json";
    write_file(ssh, ssh_doc.dump());
    json ident = ssh_doc;
    ident["model_f"] = ident["model_i"];
    write_file(dir / "ident.json", ident.dump());
    write_file(dir / "bad.json", R"({"model_i":{"ssh":{"t1":1,"t2":0.5}},"model_f":{"ssh":{"t1":1}}})");
    write_file(dir / "broken.json", "{not json");
    json gapless = ssh_doc;
    gapless["model_f"]["ssh"]["t2"] = 1.0;
    write_file(dir / "gapless.json", gapless.dump());

    CHECK(run_cli("critical-k --config " + (dir / "ident.json").string(), dir / "ident.csv") == 0);
    const std::string ident_out = read_file(dir / "ident.csv");
    CHECK(ident_out.rfind("# dqpt ", 0) == 0);
    CHECK(std::count(ident_out.begin(), ident_out.end(), '\n') == 2);

    CHECK(run_cli("check", dir / "check.csv") == 0);
    CHECK(read_file(dir / "check.csv").find(",0,") == std::string::npos);

    CHECK(run_cli("critical-k --config " + ssh.string() + " --format ndjson --out " + (dir / "crit.ndjson").string()) == 0);
    std::ifstream in(dir / "crit.ndjson");
    const OutputTable t = read_ndjson(in);
    REQUIRE(t.rows.size() == 1);
    CHECK(std::abs(std::get<double>(t.rows[0][0]) - std::acos(-0.8)) < 1e-9);

    CHECK(run_cli("rate --config " + ssh.string() + " --grid 200 --tsamples 21", dir / "r1.csv") == 0);
    CHECK(run_cli("rate --config " + ssh.string() + " --grid 200 --tsamples 21", dir / "r2.csv") == 0);
    CHECK(read_file(dir / "r1.csv") == read_file(dir / "r2.csv"));

    CHECK(run_cli("rate --config " + (dir / "bad.json").string(), {}, dir / "err.txt") == 1);
    const json err = json::parse(read_file(dir / "err.txt"));
    CHECK(err.at("error") == "ConfigError");
    CHECK(err.at("exit_code") == 1);
    CHECK(run_cli("rate --config " + (dir / "broken.json").string()) == 1);
    CHECK(run_cli("rate --config " + (dir / "missing.json").string()) == 1);
    CHECK(run_cli("nonsense") == 1);
    CHECK(run_cli("rate --config " + ssh.string() + " --tmin 2 --tmax 1") == 1);

    // k = pi is a grid point of the full zone, where the final model closes its gap.
    CHECK(run_cli("rate --config " + (dir / "gapless.json").string() + " --grid 100", {}, dir / "err2.txt") == 2);
    CHECK(json::parse(read_file(dir / "err2.txt")).at("error") == "GapClosure");

    CHECK(run_cli("rate --config " + ssh.string() + " --out /nonexistent-dir/x.csv", {}, dir / "err3.txt") == 3);
    CHECK(json::parse(read_file(dir / "err3.txt")).at("error") == "IoError");

    fs::remove_all(dir);
}

}  // TEST_SUITE

// dqpt: quench dynamics, Fisher zeros and momentum-space entanglement for
// two-band models. One subcommand per invocation; tables go to --out or stdout.

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "dqpt/commands.hpp"

namespace {

int error_exit(const std::string& kind, const std::string& message, int code) {
    nlohmann::json rec{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << rec.dump() << '\n';
    return code;
}

int exit_code_for(const dqpt::Error& e) {
    const std::string& k = e.kind();
    if (k == "ConfigError" || k == "ParseError" || k == "UnboundVariable" || k == "DimensionMismatch" ||
        k == "InvalidGrid")
        return 1;
    if (k == "IoError") return 3;
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quench dynamics, Loschmidt/Fisher-zero structure and momentum-space entanglement"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    int grid = 0;
    double tmin = 0.0, tmax = 0.0, kval = 0.0;
    int tsamples = 0;

    const std::map<std::string, std::string> help{
        {"modes", "per-mode overlap g, post-quench energy and basis angles"},
        {"entropy-sweep", "eigenbasis entanglement spectrum p, 1-p and entropy S over the grid"},
        {"rate", "Loschmidt rate function lambda(t)"},
        {"fisher-zeros", "Fisher zeros z_n per grid mode"},
        {"critical-k", "critical momenta (1D) or critical contours (2D)"},
        {"sublattice", "sublattice occupation |a|^2 and entropy S(t) at one momentum"},
        {"check", "oracle and invariant suite; exit 0 when every check passes"},
    };

    std::vector<CLI::App*> subs;
    for (const std::string& name : dqpt::command_names()) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output path (default: stdout)");
        sub->add_option("--format", format, "csv or ndjson")->check(CLI::IsMember({"csv", "ndjson"}));
        sub->add_option("--grid", grid, "grid samples per axis")->check(CLI::PositiveNumber);
        sub->add_option("--tmin", tmin, "first time sample");
        sub->add_option("--tmax", tmax, "last time sample");
        sub->add_option("--tsamples", tsamples, "number of time samples");
        sub->add_option("--k", kval, "momentum for the sublattice series (1D)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::string cmd;
    CLI::App* active = nullptr;
    for (CLI::App* s : subs)
        if (s->parsed()) {
            cmd = s->get_name();
            active = s;
        }

    nlohmann::json overrides = nlohmann::json::object();
    if (active->count("--grid")) overrides["grid"] = grid;
    if (active->count("--tmin")) overrides["time"]["t_min"] = tmin;
    if (active->count("--tmax")) overrides["time"]["t_max"] = tmax;
    if (active->count("--tsamples")) overrides["time"]["samples"] = tsamples;
    if (active->count("--k")) overrides["k"] = kval;
    if (active->count("--out")) overrides["output"]["path"] = out_path;
    if (active->count("--format")) overrides["output"]["format"] = format;

    try {
        const dqpt::RunConfig cfg = dqpt::load_config(config_path, overrides);
        const dqpt::OutputTable table = dqpt::run_command(cmd, cfg);
        if (cfg.out_path.empty()) {
            dqpt::write_table(table, cfg.format, std::cout);
            std::cout.flush();
        } else {
            dqpt::write_table(table, cfg.format, cfg.out_path);
        }
        if (cmd == "check") {
            for (const auto& row : table.rows)
                if (std::get<std::int64_t>(row[2]) == 0)
                    return error_exit("CheckFailed", std::get<std::string>(row[0]) + ": " +
                                                         std::get<std::string>(row[1]) + " (" +
                                                         std::get<std::string>(row[3]) + ")",
                                      2);
        }
    } catch (const dqpt::Error& e) {
        return error_exit(e.kind(), e.what(), exit_code_for(e));
    } catch (const std::exception& e) {
        return error_exit("InternalError", e.what(), 2);
    }
    return 0;
}

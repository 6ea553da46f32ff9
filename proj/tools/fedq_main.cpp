// Batch front end: one scenario file per invocation, JSON or plain-text
// reports out. Links the C API only.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "fedq.h"

namespace {

const char* kCommands[] = {"star",   "fedosov-build", "flat-section", "lift",
                           "cocycle-check", "dmap",   "witness",      "classify",
                           "cech",   "h2-connect"};

int run(const std::string& command, const std::string& scenario_path, const std::string& out_path,
        const std::string& format, uint64_t seed, bool seed_set, int order) {
    std::ifstream in(scenario_path);
    if (!in) {
        std::cerr << "error: cannot open scenario file '" << scenario_path << "'\n";
        return 1;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    // the subcommand pins the scenario's command field; a mismatch is an error
    // caught by a cheap textual splice: inject/override via a tiny wrapper
    // object would re-serialize, so instead require agreement after the run.
    fedq_result* result = nullptr;
    fedq_status status =
        fedq_run_scenario(text.c_str(), seed_set ? seed : UINT64_MAX, order, &result);
    if (status == FEDQ_E_INPUT || status == FEDQ_E_INTERNAL || !result) {
        std::cerr << "error: " << fedq_last_error() << "\n";
        if (result) fedq_result_free(result);
        return 1;
    }

    std::string rendered = format == "text" ? fedq_result_text(result) : fedq_result_json(result);

    // consistency between the CLI subcommand and the scenario's command
    std::string needle = "\"command\": \"" + command + "\"";
    if (fedq_result_json(result) != nullptr &&
        std::string(fedq_result_json(result)).find(needle) == std::string::npos) {
        std::cerr << "error: scenario command does not match subcommand '" << command << "'\n";
        fedq_result_free(result);
        return 1;
    }

    int exit_code = fedq_result_exit_code(result);
    fedq_result_free(result);

    if (out_path.empty() || out_path == "-") {
        std::cout << rendered;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return 1;
        }
        out << rendered;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedq: formal deformation quantization scenarios"};
    app.set_version_flag("--version", std::string(fedq_version()));
    app.require_subcommand(1);

    std::string scenario_path, out_path, format = "json";
    uint64_t seed = 0;
    int order = -1;
    bool seed_set = false;

    std::string chosen;
    for (const char* name : kCommands) {
        auto* sub = app.add_subcommand(name, std::string("run a '") + name + "' scenario");
        sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        sub->add_option("--out", out_path, "report output path (default: stdout)");
        sub->add_option("--format", format, "report format: json|text")
            ->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--seed", seed, "override the scenario seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--order", order, "override the truncation order D");
        sub->callback([&, name] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);
    return run(chosen, scenario_path, out_path, format, seed, seed_set, order);
}

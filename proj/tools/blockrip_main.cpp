// blockrip CLI: thin shell over the C API in blockrip.h.
//
//   blockrip <command> --config <path> [--seed N] [--out <path>] [--trials N]
//
// Exit codes: 0 ok, 2 validation, 3 capacity, 4 convergence, 5 I/O.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blockrip.h"

namespace {

const char* kind_of(int code) {
    switch (code) {
        case BLOCKRIP_ERR_VALIDATION:
            return "validation";
        case BLOCKRIP_ERR_CAPACITY:
            return "capacity";
        case BLOCKRIP_ERR_CONVERGENCE:
            return "convergence";
        case BLOCKRIP_ERR_IO:
            return "io";
        default:
            return "internal";
    }
}

int fail(int code) {
    std::string reason = blockrip_last_error();
    for (auto& c : reason)
        if (c == '\n') c = ';';
    std::fprintf(stderr, "blockrip: error code=%d kind=%s reason=%s\n", code, kind_of(code),
                 reason.c_str());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("block-diagonal RIP experiment toolkit (") + blockrip_version() +
                 ")"};
    app.require_subcommand(1);

    static const std::vector<std::string> commands = {
        "sample",    "psi-norm", "ric-exact",        "ric-mc",  "chaos-tail",
        "moment-check", "chaining", "phase-transition", "recover", "increment-check"};

    std::string config_path;
    std::string out_path;
    long long seed = -1;
    long long trials = -1;
    bool quiet = false;

    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out_path, "write the CSV here (plus .meta.json sidecar)");
        sub->add_option("--trials", trials, "override the config trial count");
        sub->add_flag("--quiet", quiet, "suppress stdout echo of the result");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    blockrip_config* cfg = nullptr;
    int rc = blockrip_config_load(config_path.c_str(), &cfg);
    if (rc != BLOCKRIP_OK) return fail(rc);
    std::unique_ptr<blockrip_config, decltype(&blockrip_config_free)> cfg_guard(
        cfg, &blockrip_config_free);

    if (seed >= 0) {
        rc = blockrip_config_set(cfg, "seed", std::to_string(seed).c_str());
        if (rc != BLOCKRIP_OK) return fail(rc);
    }
    if (trials >= 0) {
        rc = blockrip_config_set(cfg, "trials", std::to_string(trials).c_str());
        if (rc != BLOCKRIP_OK) return fail(rc);
    }
    if (!out_path.empty()) {
        rc = blockrip_config_set(cfg, "out", ("\"" + out_path + "\"").c_str());
        if (rc != BLOCKRIP_OK) return fail(rc);
    }

    rc = blockrip_config_validate(cfg, command.c_str());
    if (rc != BLOCKRIP_OK) return fail(rc);

    blockrip_result* result = nullptr;
    rc = blockrip_run(cfg, command.c_str(), &result);
    if (rc != BLOCKRIP_OK) return fail(rc);
    std::unique_ptr<blockrip_result, decltype(&blockrip_result_free)> result_guard(
        result, &blockrip_result_free);

    if (!quiet) {
        if (out_path.empty()) {
            std::fputs(blockrip_result_csv(result), stdout);
        } else {
            std::fprintf(stdout, "wrote %s\n", out_path.c_str());
        }
        std::fputs(blockrip_result_meta_json(result), stdout);
    }
    return 0;
}

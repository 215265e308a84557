#include "blockrip.h"

#include <cmath>
#include <string>

#include "blockrip/config.hpp"
#include "blockrip/errors.hpp"
#include "blockrip/experiment.hpp"
#include "blockrip/version.hpp"

struct blockrip_config_s {
    blockrip::ConfigMap map;
};

struct blockrip_result_s {
    blockrip::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

int code_of(const blockrip::Error& e) { return static_cast<int>(e.code()); }

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const blockrip::Error& e) {
        g_last_error = e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BLOCKRIP_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return BLOCKRIP_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* blockrip_version(void) { return blockrip::kVersion; }

const char* blockrip_last_error(void) { return g_last_error.c_str(); }

int blockrip_config_load(const char* path, blockrip_config** out) {
    if (path == nullptr || out == nullptr) {
        g_last_error = "null argument";
        return BLOCKRIP_ERR_VALIDATION;
    }
    return guarded([&]() {
        auto* cfg = new blockrip_config_s{blockrip::load_config(path)};
        *out = cfg;
        return BLOCKRIP_OK;
    });
}

int blockrip_config_parse(const char* text, blockrip_config** out) {
    if (text == nullptr || out == nullptr) {
        g_last_error = "null argument";
        return BLOCKRIP_ERR_VALIDATION;
    }
    return guarded([&]() {
        auto* cfg = new blockrip_config_s{blockrip::parse_config(text)};
        *out = cfg;
        return BLOCKRIP_OK;
    });
}

int blockrip_config_set(blockrip_config* cfg, const char* key, const char* value) {
    if (cfg == nullptr || key == nullptr || value == nullptr) {
        g_last_error = "null argument";
        return BLOCKRIP_ERR_VALIDATION;
    }
    return guarded([&]() {
        blockrip::config_set(cfg->map, key, value);
        return BLOCKRIP_OK;
    });
}

int blockrip_config_validate(const blockrip_config* cfg, const char* command) {
    if (cfg == nullptr || command == nullptr) {
        g_last_error = "null argument";
        return BLOCKRIP_ERR_VALIDATION;
    }
    return guarded([&]() {
        auto violations = blockrip::validate_config(cfg->map, command);
        if (violations.empty()) return BLOCKRIP_OK;
        std::string joined;
        for (std::size_t i = 0; i < violations.size(); ++i) {
            if (i) joined += "\n";
            joined += violations[i];
        }
        g_last_error = joined;
        return BLOCKRIP_ERR_VALIDATION;
    });
}

int blockrip_run(const blockrip_config* cfg, const char* command, blockrip_result** out) {
    if (cfg == nullptr || command == nullptr || out == nullptr) {
        g_last_error = "null argument";
        return BLOCKRIP_ERR_VALIDATION;
    }
    return guarded([&]() {
        auto* res = new blockrip_result_s{blockrip::run_experiment(cfg->map, command)};
        *out = res;
        return BLOCKRIP_OK;
    });
}

const char* blockrip_result_csv(const blockrip_result* result) {
    return result == nullptr ? "" : result->result.csv.c_str();
}

const char* blockrip_result_meta_json(const blockrip_result* result) {
    return result == nullptr ? "" : result->result.meta_json.c_str();
}

double blockrip_result_summary(const blockrip_result* result, const char* key) {
    if (result == nullptr || key == nullptr) return std::nan("");
    auto it = result->result.summary.find(key);
    return it == result->result.summary.end() ? std::nan("") : it->second;
}

void blockrip_config_free(blockrip_config* cfg) { delete cfg; }

void blockrip_result_free(blockrip_result* result) { delete result; }

}  // extern "C"

#include "cipherlab.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "tensor.hpp"

using cipherlab::ConfigError;
using cipherlab::RunConfig;

struct clab_config {
    RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

clab_status fail(clab_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class Fn>
clab_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return CLAB_OK;
    } catch (const ConfigError& e) {
        return fail(CLAB_ERR_CONFIG, e.what());
    } catch (const cipherlab::NumericError& e) {
        return fail(CLAB_ERR_NUMERIC, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(CLAB_ERR_CONFIG, e.what());
    } catch (const std::out_of_range& e) {
        return fail(CLAB_ERR_CONFIG, e.what());
    } catch (const std::runtime_error& e) {
        return fail(CLAB_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(CLAB_ERR_INTERNAL, e.what());
    }
}

using Command = std::string (*)(const RunConfig&);

clab_status run_command(Command command, const clab_config* cfg, char** report) {
    if (!cfg) return fail(CLAB_ERR_INVALID_ARG, "null config handle");
    if (report) *report = nullptr;
    return guarded([&] {
        const std::string out = command(cfg->cfg);
        if (report) *report = dup_string(out);
    });
}

} // namespace

extern "C" {

int clab_abi_version(void) { return 1; }

clab_config* clab_config_new(void) { return new (std::nothrow) clab_config(); }

void clab_config_free(clab_config* cfg) { delete cfg; }

clab_status clab_config_load(clab_config* cfg, const char* path) {
    if (!cfg || !path) return fail(CLAB_ERR_INVALID_ARG, "null config or path");
    return guarded([&] { cfg->cfg.load_file(path); });
}

clab_status clab_config_set(clab_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(CLAB_ERR_INVALID_ARG, "null config, key or value");
    return guarded([&] { cfg->cfg.set(key, value); });
}

clab_status clab_config_get(const clab_config* cfg, const char* key, char* buf, size_t buflen) {
    if (!cfg || !key || !buf || buflen == 0)
        return fail(CLAB_ERR_INVALID_ARG, "null config, key or buffer");
    return guarded([&] {
        const std::string value = cfg->cfg.get(key);
        const size_t n = value.size() < buflen - 1 ? value.size() : buflen - 1;
        std::memcpy(buf, value.data(), n);
        buf[n] = '\0';
    });
}

clab_status clab_run_gen(const clab_config* cfg, char** report) {
    return run_command(cipherlab::cmd_gen, cfg, report);
}
clab_status clab_run_baseline(const clab_config* cfg, char** report) {
    return run_command(cipherlab::cmd_baseline, cfg, report);
}
clab_status clab_run_train(const clab_config* cfg, char** report) {
    return run_command(cipherlab::cmd_train, cfg, report);
}
clab_status clab_run_eval(const clab_config* cfg, char** report) {
    return run_command(cipherlab::cmd_eval, cfg, report);
}
clab_status clab_run_simplex(const clab_config* cfg, char** report) {
    return run_command(cipherlab::cmd_simplex, cfg, report);
}
clab_status clab_run_plot(const clab_config* cfg, char** report) {
    return run_command(cipherlab::cmd_plot, cfg, report);
}

void clab_string_free(char* s) { std::free(s); }

const char* clab_last_error(void) { return g_last_error.c_str(); }

const char* clab_status_name(clab_status status) {
    switch (status) {
    case CLAB_OK: return "ok";
    case CLAB_ERR_INVALID_ARG: return "invalid argument";
    case CLAB_ERR_CONFIG: return "configuration error";
    case CLAB_ERR_IO: return "io error";
    case CLAB_ERR_NUMERIC: return "numeric error";
    case CLAB_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

} // extern "C"

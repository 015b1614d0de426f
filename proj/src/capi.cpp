#include "qarlab.h"

#include <nlohmann/json.hpp>
#include <span>
#include <string>

#include "qarlab/qar.hpp"
#include "qarlab/runner.hpp"

using qarlab::DomainError;
using qarlab::IoError;
using qarlab::NumericError;
using qarlab::ParseError;

struct qarlab_ctx {
    std::string last_error;
};

struct qarlab_model {
    qarlab::QarModel model;
};

namespace {

void set_error(qarlab_ctx* ctx, const char* msg) {
    if (ctx) ctx->last_error = msg;
}

// Maps the C++ error taxonomy onto status codes.
template <typename Fn>
int guarded(qarlab_ctx* ctx, Fn&& fn) {
    try {
        fn();
        if (ctx) ctx->last_error.clear();
        return QARLAB_OK;
    } catch (const ParseError& e) {
        set_error(ctx, e.what());
        return QARLAB_EPARSE;
    } catch (const nlohmann::json::exception& e) {
        set_error(ctx, e.what());
        return QARLAB_EPARSE;
    } catch (const DomainError& e) {
        set_error(ctx, e.what());
        return QARLAB_EDOMAIN;
    } catch (const NumericError& e) {
        set_error(ctx, e.what());
        return QARLAB_ENUMERIC;
    } catch (const IoError& e) {
        set_error(ctx, e.what());
        return QARLAB_EIO;
    } catch (const std::exception& e) {
        set_error(ctx, e.what());
        return QARLAB_EINTERNAL;
    } catch (...) {
        set_error(ctx, "unknown error");
        return QARLAB_EINTERNAL;
    }
}

template <typename Cmd>
int run_command(qarlab_ctx* ctx, const char* config_json, Cmd cmd) {
    if (!config_json) {
        set_error(ctx, "null config");
        return QARLAB_EINVAL;
    }
    return guarded(ctx, [&] { cmd(nlohmann::json::parse(config_json)); });
}

int scalar_call(double* out, double (*fn)(double, const qarlab::KumaraswamyParams&),
                double x, double a, double b) {
    if (!out) return QARLAB_EINVAL;
    try {
        *out = fn(x, qarlab::KumaraswamyParams(a, b));
        return QARLAB_OK;
    } catch (const DomainError&) {
        return QARLAB_EDOMAIN;
    } catch (const std::exception&) {
        return QARLAB_EINTERNAL;
    }
}

} // namespace

extern "C" {

unsigned qarlab_version(void) { return 10000; } /* 1.0.0 */

qarlab_ctx* qarlab_ctx_new(void) { return new (std::nothrow) qarlab_ctx; }

void qarlab_ctx_free(qarlab_ctx* ctx) { delete ctx; }

const char* qarlab_last_error(const qarlab_ctx* ctx) {
    return ctx ? ctx->last_error.c_str() : "";
}

int qarlab_run_fit(qarlab_ctx* ctx, const char* config_json) {
    return run_command(ctx, config_json, qarlab::runner::cmd_fit);
}

int qarlab_run_simulate(qarlab_ctx* ctx, const char* config_json) {
    return run_command(ctx, config_json, qarlab::runner::cmd_simulate);
}

int qarlab_run_coverage(qarlab_ctx* ctx, const char* config_json) {
    return run_command(ctx, config_json, qarlab::runner::cmd_coverage);
}

int qarlab_run_assess(qarlab_ctx* ctx, const char* config_json) {
    return run_command(ctx, config_json, qarlab::runner::cmd_assess);
}

int qarlab_run_krige(qarlab_ctx* ctx, const char* config_json) {
    return run_command(ctx, config_json, qarlab::runner::cmd_krige);
}

int qarlab_kuma_cdf(double x, double a, double b, double* out) {
    return scalar_call(out, qarlab::kuma_cdf, x, a, b);
}

int qarlab_kuma_pdf(double x, double a, double b, double* out) {
    return scalar_call(out, qarlab::kuma_pdf, x, a, b);
}

int qarlab_kuma_quantile(double tau, double a, double b, double* out) {
    return scalar_call(out, qarlab::kuma_quantile, tau, a, b);
}

int qarlab_normal_cdf(double x, double* out) {
    if (!out) return QARLAB_EINVAL;
    *out = qarlab::normal_cdf(x);
    return QARLAB_OK;
}

int qarlab_normal_quantile(double p, double* out) {
    if (!out) return QARLAB_EINVAL;
    try {
        *out = qarlab::normal_quantile(p);
        return QARLAB_OK;
    } catch (const DomainError&) {
        return QARLAB_EDOMAIN;
    }
}

int qarlab_model_from_json(qarlab_ctx* ctx, const char* model_json,
                           qarlab_model** out) {
    if (!model_json || !out) {
        set_error(ctx, "null argument");
        return QARLAB_EINVAL;
    }
    *out = nullptr;
    return guarded(ctx, [&] {
        auto spec = nlohmann::json::parse(model_json);
        *out = new qarlab_model{qarlab::runner::parse_qar_model_json(spec)};
    });
}

void qarlab_model_free(qarlab_model* model) { delete model; }

int qarlab_model_quantile(qarlab_ctx* ctx, const qarlab_model* model,
                          double tau, const double* lags, int n_lags,
                          double* out) {
    if (!model || !out || (n_lags > 0 && !lags)) {
        set_error(ctx, "null argument");
        return QARLAB_EINVAL;
    }
    return guarded(ctx, [&] {
        *out = qarlab::conditional_quantile(
            model->model, tau, std::span<const double>(lags, n_lags));
    });
}

int qarlab_model_inverse_tau(qarlab_ctx* ctx, const qarlab_model* model,
                             double y, const double* lags, int n_lags,
                             double* out) {
    if (!model || !out || (n_lags > 0 && !lags)) {
        set_error(ctx, "null argument");
        return QARLAB_EINVAL;
    }
    return guarded(ctx, [&] {
        *out = qarlab::inverse_tau(model->model, y,
                                   std::span<const double>(lags, n_lags));
    });
}

int qarlab_model_density(qarlab_ctx* ctx, const qarlab_model* model, double y,
                         const double* lags, int n_lags, double* out) {
    if (!model || !out || (n_lags > 0 && !lags)) {
        set_error(ctx, "null argument");
        return QARLAB_EINVAL;
    }
    return guarded(ctx, [&] {
        *out = qarlab::conditional_density(
            model->model, y, std::span<const double>(lags, n_lags));
    });
}

int qarlab_model_log_likelihood(qarlab_ctx* ctx, const qarlab_model* model,
                                const double* y, int n, double* out) {
    if (!model || !out || !y || n < 1) {
        set_error(ctx, "null argument");
        return QARLAB_EINVAL;
    }
    return guarded(ctx, [&] {
        *out = qarlab::log_likelihood(model->model,
                                      std::span<const double>(y, n));
    });
}

} // extern "C"

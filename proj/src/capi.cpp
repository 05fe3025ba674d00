// SPDX-License-Identifier: Apache-2.0
#include "bigjump/bigjump.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "bigjump/models.hpp"
#include "bigjump/report.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
bigjump_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const bigjump::NoBoundaryClassError& e) {
    set_error(e.what());
    return BIGJUMP_ERR_NO_BOUNDARY_CLASS;
  } catch (const bigjump::UnsupportedError& e) {
    set_error(e.what());
    return BIGJUMP_ERR_UNSUPPORTED;
  } catch (const bigjump::ConfigError& e) {
    set_error(e.what());
    return BIGJUMP_ERR_CONFIG;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return BIGJUMP_ERR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return BIGJUMP_ERR_INVALID_ARGUMENT;
  } catch (const nlohmann::json::exception& e) {
    set_error(e.what());
    return BIGJUMP_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return BIGJUMP_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return BIGJUMP_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct bigjump_law {
  bigjump::TailDistribution law;
};

struct bigjump_model {
  bigjump::CondIndepModel model;
};

extern "C" {

const char* bigjump_version(void) { return "1.0.0"; }

const char* bigjump_status_name(bigjump_status status) {
  switch (status) {
    case BIGJUMP_OK: return "ok";
    case BIGJUMP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case BIGJUMP_ERR_DOMAIN: return "domain_error";
    case BIGJUMP_ERR_NO_BOUNDARY_CLASS: return "no_boundary_class";
    case BIGJUMP_ERR_UNSUPPORTED: return "unsupported";
    case BIGJUMP_ERR_CONFIG: return "config_error";
    case BIGJUMP_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* bigjump_last_error(void) { return g_last_error.c_str(); }

void bigjump_free_string(char* s) { std::free(s); }

bigjump_status bigjump_expint_e1(double x, double* out) {
  if (!out) { set_error("null output pointer"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    *out = bigjump::expint_e1(x);
    return BIGJUMP_OK;
  });
}

bigjump_status bigjump_law_create(const char* spec_json, bigjump_law** out) {
  if (!spec_json || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    const auto spec = nlohmann::json::parse(spec_json);
    std::map<std::string, double> params;
    if (spec.contains("params"))
      for (auto it = spec["params"].begin(); it != spec["params"].end(); ++it)
        params[it.key()] = it.value().get<double>();
    auto law = bigjump::laws::from_name(spec.value("name", ""), params);
    *out = new bigjump_law{std::move(law)};
    return BIGJUMP_OK;
  });
}

void bigjump_law_free(bigjump_law* law) { delete law; }

#define BIGJUMP_LAW_EVAL(fn, expr)                                                      \
  bigjump_status fn(const bigjump_law* law, double x, double* out) {                    \
    if (!law || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; } \
    return guarded([&] {                                                                \
      *out = (expr);                                                                    \
      return BIGJUMP_OK;                                                                \
    });                                                                                 \
  }

BIGJUMP_LAW_EVAL(bigjump_law_tail, law->law.tail(x))
BIGJUMP_LAW_EVAL(bigjump_law_log_tail, law->law.log_tail(x))
BIGJUMP_LAW_EVAL(bigjump_law_hazard, law->law.hazard(x))
BIGJUMP_LAW_EVAL(bigjump_law_hazard_rate, law->law.hazard_rate(x))
BIGJUMP_LAW_EVAL(bigjump_law_quantile, law->law.quantile(x))
#undef BIGJUMP_LAW_EVAL

bigjump_status bigjump_law_support_lower(const bigjump_law* law, double* out) {
  if (!law || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  *out = law->law.support_lower();
  return BIGJUMP_OK;
}

bigjump_status bigjump_law_sample(const bigjump_law* law, uint64_t seed, size_t count,
                                  double* out) {
  if (!law || (!out && count > 0)) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    for (size_t i = 0; i < count; ++i) {
      bigjump::SplitMix64 rng = bigjump::make_stream(seed, i, 0);
      out[i] = law->law.sample(rng);
    }
    return BIGJUMP_OK;
  });
}

bigjump_status bigjump_law_boundary_generator(const bigjump_law* law, double x, double* out) {
  if (!law || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    const auto H = bigjump::boundary_generator(law->law);
    *out = H.base(x);
    return BIGJUMP_OK;
  });
}

bigjump_status bigjump_model_create(const char* spec_json, bigjump_model** out) {
  if (!spec_json || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    const auto spec = nlohmann::json::parse(spec_json);
    std::map<std::string, double> params;
    if (spec.contains("params"))
      for (auto it = spec["params"].begin(); it != spec["params"].end(); ++it)
        params[it.key()] = it.value().get<double>();
    auto model = bigjump::model_from_name(spec.value("name", ""), params);
    *out = new bigjump_model{std::move(model)};
    return BIGJUMP_OK;
  });
}

void bigjump_model_free(bigjump_model* model) { delete model; }

bigjump_status bigjump_model_n_max(const bigjump_model* model, int* out) {
  if (!model || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  *out = model->model.n_max();
  return BIGJUMP_OK;
}

bigjump_status bigjump_model_real_valued(const bigjump_model* model, int* out) {
  if (!model || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  *out = model->model.real_valued() ? 1 : 0;
  return BIGJUMP_OK;
}

bigjump_status bigjump_model_reference_tail(const bigjump_model* model, double x, double* out) {
  if (!model || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    *out = model->model.reference().tail(x);
    return BIGJUMP_OK;
  });
}

bigjump_status bigjump_model_sample_latent(const bigjump_model* model, uint64_t seed,
                                           double* out, size_t cap, size_t* written) {
  if (!model || !out || !written) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    bigjump::SplitMix64 rng = bigjump::make_stream(seed, 0, 1);
    const bigjump::Latent latent = model->model.sample_latent(rng);
    if (latent.size() > cap) {
      set_error("latent buffer too small");
      return BIGJUMP_ERR_INVALID_ARGUMENT;
    }
    for (size_t i = 0; i < latent.size(); ++i) out[i] = latent[i];
    *written = latent.size();
    return BIGJUMP_OK;
  });
}

bigjump_status bigjump_model_cond_tail(const bigjump_model* model, int i, double x,
                                       const double* latent, size_t latent_len, double* out) {
  if (!model || !latent || !out) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    if (i < 0 || i >= model->model.n_max()) {
      set_error("summand index out of range");
      return BIGJUMP_ERR_INVALID_ARGUMENT;
    }
    const bigjump::Latent l(latent, latent + latent_len);
    *out = model->model.cond_tail(i, x, l);
    return BIGJUMP_OK;
  });
}

bigjump_status bigjump_run(const char* config_json, char** report_json) {
  if (!config_json || !report_json) { set_error("null argument"); return BIGJUMP_ERR_INVALID_ARGUMENT; }
  return guarded([&] {
    const auto config = nlohmann::json::parse(config_json);
    const auto report = bigjump::run_config(config);
    *report_json = dup_string(report.dump(2));
    if (!*report_json) {
      set_error("out of memory");
      return BIGJUMP_ERR_INTERNAL;
    }
    return BIGJUMP_OK;
  });
}

}  // extern "C"

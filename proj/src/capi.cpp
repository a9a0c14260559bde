// Copyright 2026 The kinmerge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kinmerge/kinmerge.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "kinmerge/error.hpp"
#include "kinmerge/junction.hpp"
#include "kinmerge/layer.hpp"
#include "kinmerge/scenario.hpp"

using namespace kinmerge;

struct km_diagram {
  FundamentalDiagram diagram;
};

struct km_config {
  scenario::ScenarioConfig config;
};

struct km_run {
  network::RunResult result;
  scenario::ScenarioConfig config;
};

struct km_report {
  scenario::ComparisonReport report;
};

struct km_markers {
  std::vector<scenario::MarkerResult> results;
  std::vector<std::string> descriptions;
};

namespace {

thread_local std::string last_error;

km_status status_of(ErrorCode c) {
  switch (c) {
  case ErrorCode::InvalidArgument: return KM_ERR_INVALID_ARGUMENT;
  case ErrorCode::OutOfRange: return KM_ERR_OUT_OF_RANGE;
  case ErrorCode::Domain: return KM_ERR_DOMAIN;
  case ErrorCode::StepSize: return KM_ERR_STEP_SIZE;
  case ErrorCode::InvariantBreach: return KM_ERR_INVARIANT;
  case ErrorCode::Config: return KM_ERR_CONFIG;
  case ErrorCode::Parse: return KM_ERR_PARSE;
  case ErrorCode::Io: return KM_ERR_IO;
  case ErrorCode::Comparison: return KM_ERR_COMPARISON;
  }
  return KM_ERR_INTERNAL;
}

template <class F>
km_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return KM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return KM_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

template <class F>
km_status scalar(const km_diagram* d, double* out, F&& f) {
  return guarded([&] {
    require(d, "diagram");
    require(out, "output pointer");
    *out = f(d->diagram);
  });
}

void fill(const junction::KineticMergeOutcome& o, km_kinetic_outcome* out) {
  out->w_1 = o.w_1;
  out->w_2 = o.w_2;
  out->z_3 = o.z_3;
  out->case_label = static_cast<km_kinetic_case>(o.case_label);
}

void fill(const junction::MacroMergeOutcome& o, km_macro_outcome* out) {
  for (int i = 0; i < 3; ++i) {
    out->caps[i] = o.caps[i];
    out->fluxes[i] = o.fluxes[i];
  }
  out->case_label = junction::to_string(o.case_label)[0];
}

const network::Snapshot& snapshot(const km_run* r, size_t snap) {
  require(r, "run");
  if (snap >= r->result.snapshots.size()) fail(ErrorCode::OutOfRange, "snapshot index out of range");
  return r->result.snapshots[snap];
}

} // namespace

extern "C" {

const char* km_last_error(void) { return last_error.c_str(); }

const char* km_status_string(km_status s) {
  switch (s) {
  case KM_OK: return "ok";
  case KM_ERR_INVALID_ARGUMENT: return "invalid argument";
  case KM_ERR_OUT_OF_RANGE: return "out of range";
  case KM_ERR_DOMAIN: return "domain error";
  case KM_ERR_STEP_SIZE: return "step size error";
  case KM_ERR_INVARIANT: return "invariant region breached";
  case KM_ERR_CONFIG: return "configuration error";
  case KM_ERR_PARSE: return "parse error";
  case KM_ERR_IO: return "i/o error";
  case KM_ERR_COMPARISON: return "comparison error";
  case KM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* km_version(void) { return "0.1.0"; }

km_status km_diagram_lwr(km_diagram** out) {
  return guarded([&] {
    require(out, "output pointer");
    *out = new km_diagram{FundamentalDiagram::lwr()};
  });
}

km_status km_diagram_create(km_scalar_fn flux, km_scalar_fn derivative, void* user, double rho_star,
                            double sigma, km_diagram** out) {
  return guarded([&] {
    require(out, "output pointer");
    require(reinterpret_cast<const void*>(flux), "flux callback");
    require(reinterpret_cast<const void*>(derivative), "derivative callback");
    *out = new km_diagram{FundamentalDiagram([flux, user](double r) { return flux(r, user); },
                                             [derivative, user](double r) { return derivative(r, user); },
                                             rho_star, sigma)};
  });
}

void km_diagram_free(km_diagram* d) { delete d; }

km_status km_flux(const km_diagram* d, double rho, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return f.flux(rho); });
}
km_status km_tau(const km_diagram* d, double rho, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return tau(f, rho); });
}
km_status km_rho_minus(const km_diagram* d, double c, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return rho_minus(f, c); });
}
km_status km_rho_plus(const km_diagram* d, double c, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return rho_plus(f, c); });
}
km_status km_z_of_rho(const km_diagram* d, double rho, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return z_of_rho(f, rho); });
}
km_status km_demand(const km_diagram* d, double rho_b, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return demand(f, rho_b); });
}
km_status km_supply(const km_diagram* d, double rho_b, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return supply(f, rho_b); });
}
km_status km_delta_bar(const km_diagram* d, double* out) {
  return scalar(d, out, [&](const FundamentalDiagram& f) { return delta_bar(f); });
}

km_status km_check_subcharacteristic(const km_diagram* d, int samples, int* out) {
  return guarded([&] {
    require(d, "diagram");
    require(out, "output pointer");
    if (samples < 2) fail(ErrorCode::InvalidArgument, "samples must be at least 2");
    *out = check_subcharacteristic(d->diagram, samples) ? 1 : 0;
  });
}

km_status km_kinetic_fair_merge(const km_trace* t, km_kinetic_outcome* out) {
  return guarded([&] {
    require(t, "trace");
    require(out, "output pointer");
    fill(junction::kinetic_fair_merge({t->z_hat_1, t->z_hat_2, t->w_hat_3}), out);
  });
}

km_status km_kinetic_priority_merge(const km_trace* t, km_kinetic_outcome* out) {
  return guarded([&] {
    require(t, "trace");
    require(out, "output pointer");
    fill(junction::kinetic_priority_merge({t->z_hat_1, t->z_hat_2, t->w_hat_3}), out);
  });
}

km_status km_kinetic_priority_merge_truncated(const km_trace* t, double delta, const km_diagram* d,
                                              km_kinetic_outcome* out) {
  return guarded([&] {
    require(t, "trace");
    require(d, "diagram");
    require(out, "output pointer");
    fill(junction::kinetic_priority_merge_truncated({t->z_hat_1, t->z_hat_2, t->w_hat_3}, delta,
                                                    d->diagram),
         out);
  });
}

km_status km_macro_fair_merge(const km_diagram* d, const double rho_b[3], km_macro_outcome* out) {
  return guarded([&] {
    require(d, "diagram");
    require(rho_b, "densities");
    require(out, "output pointer");
    fill(junction::macro_fair_merge(d->diagram, rho_b[0], rho_b[1], rho_b[2]), out);
  });
}

km_status km_macro_priority_merge(const km_diagram* d, const double rho_b[3], km_macro_outcome* out) {
  return guarded([&] {
    require(d, "diagram");
    require(rho_b, "densities");
    require(out, "output pointer");
    fill(junction::macro_priority_merge(d->diagram, rho_b[0], rho_b[1], rho_b[2]), out);
  });
}

km_status km_match_fair_merge(const km_diagram* d, const double rho_b[3], km_match* out) {
  return guarded([&] {
    require(d, "diagram");
    require(rho_b, "densities");
    require(out, "output pointer");
    const auto m = layer::match_fair_merge(d->diagram, rho_b[0], rho_b[1], rho_b[2]);
    for (int i = 0; i < 3; ++i) {
      out->flux[i] = m.flux[i];
      out->rho_k[i] = m.rho_k[i];
    }
    out->rho_0_lo = m.rho_0[0].lo;
    out->rho_0_hi = m.rho_0[0].hi;
    out->rp_case = m.rp_case;
    out->subcase = m.subcase;
    const std::string sig = layer::signature_string(m.signature);
    std::memcpy(out->signature, sig.c_str(), 4);
  });
}

km_status km_config_default(km_config** out) {
  return guarded([&] {
    require(out, "output pointer");
    auto* c = new km_config{};
    scenario::finalize(c->config);
    *out = c;
  });
}

km_status km_config_parse(const char* text, km_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output pointer");
    *out = new km_config{scenario::parse_config(text)};
  });
}

km_status km_config_from_preset(const char* name, const char* model, km_config** out) {
  return guarded([&] {
    require(name, "preset name");
    require(model, "model");
    require(out, "output pointer");
    const std::string m = model;
    if (m != "kinetic" && m != "lwr") fail(ErrorCode::Config, "model must be 'kinetic' or 'lwr'");
    *out = new km_config{scenario::preset_config(
        scenario::find_preset(name), m == "kinetic" ? network::Model::Kinetic : network::Model::Lwr)};
  });
}

km_status km_config_set(km_config* c, const char* key, const char* value) {
  return guarded([&] {
    require(c, "config");
    require(key, "key");
    require(value, "value");
    scenario::apply_setting(c->config, key, value);
  });
}

km_status km_config_validate(km_config* c) {
  return guarded([&] {
    require(c, "config");
    scenario::finalize(c->config);
  });
}

km_status km_config_render(const km_config* c, char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(c, "config");
    const std::string text = scenario::render_config(c->config);
    if (needed) *needed = text.size() + 1;
    if (buffer && capacity > 0) {
      const size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

const char* km_config_output_dir(const km_config* c) { return c ? c->config.output_dir.c_str() : ""; }

void km_config_free(km_config* c) { delete c; }

size_t km_preset_count(void) { return scenario::presets().size(); }

const char* km_preset_name(size_t index) {
  return index < km_preset_count() ? scenario::presets()[index].name.c_str() : nullptr;
}

const char* km_preset_caption(size_t index) {
  return index < km_preset_count() ? scenario::presets()[index].caption.c_str() : nullptr;
}

const char* km_preset_coupling(size_t index) {
  return index < km_preset_count() ? network::to_string(scenario::presets()[index].family).data()
                                   : nullptr;
}

km_status km_preset_densities(size_t index, double out[3]) {
  return guarded([&] {
    require(out, "output pointer");
    if (index >= km_preset_count()) fail(ErrorCode::OutOfRange, "preset index out of range");
    for (int i = 0; i < 3; ++i) out[i] = scenario::presets()[index].densities[i];
  });
}

km_status km_run_simulation(const km_config* c, km_run** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "output pointer");
    scenario::ScenarioConfig cfg = c->config;
    scenario::finalize(cfg);
    auto result = network::run(cfg.sim);
    *out = new km_run{std::move(result), std::move(cfg)};
  });
}

km_status km_run_write(const km_run* r, const char* dir) {
  return guarded([&] {
    require(r, "run");
    require(dir, "directory");
    scenario::emit_snapshots(r->result, r->config, dir);
  });
}

km_status km_run_read(const char* dir, km_run** out) {
  return guarded([&] {
    require(dir, "directory");
    require(out, "output pointer");
    auto result = scenario::read_snapshots(dir);
    scenario::ScenarioConfig cfg;
    cfg.sim = result.config;
    cfg.family = network::family_of(result.config.coupling);
    cfg.output_dir = dir;
    *out = new km_run{std::move(result), std::move(cfg)};
  });
}

void km_run_free(km_run* r) { delete r; }

int km_run_is_kinetic(const km_run* r) {
  return r && r->result.config.model == network::Model::Kinetic ? 1 : 0;
}

size_t km_run_snapshot_count(const km_run* r) { return r ? r->result.snapshots.size() : 0; }

km_status km_run_snapshot_time(const km_run* r, size_t snap, double* out) {
  return guarded([&] {
    require(out, "output pointer");
    *out = snapshot(r, snap).time;
  });
}

km_status km_run_junction(const km_run* r, size_t snap, double flux[3], double trace[3]) {
  return guarded([&] {
    const auto& s = snapshot(r, snap);
    for (int i = 0; i < 3; ++i) {
      if (flux) flux[i] = s.junction_flux[i];
      if (trace) trace[i] = s.junction_trace[i];
    }
  });
}

km_status km_run_diagnostics(const km_run* r, km_diagnostics* out) {
  return guarded([&] {
    require(r, "run");
    require(out, "output pointer");
    const auto& d = r->result.diagnostics;
    *out = {d.steps, d.relative_mass_error, d.max_junction_imbalance};
  });
}

km_status km_run_field(const km_run* r, size_t snap, int road, km_field field, double* buffer,
                       size_t capacity, size_t* length) {
  return guarded([&] {
    const auto& s = snapshot(r, snap);
    if (road < 0 || road > 2) fail(ErrorCode::OutOfRange, "road index must be 0, 1 or 2");
    const auto& p = s.roads[road];
    const std::vector<double>* v = nullptr;
    switch (field) {
    case KM_FIELD_X: v = &p.x; break;
    case KM_FIELD_RHO: v = &p.rho; break;
    case KM_FIELD_Q: v = &p.q; break;
    case KM_FIELD_Z: v = &p.z; break;
    default: fail(ErrorCode::InvalidArgument, "unknown field");
    }
    if (length) *length = v->size();
    if (buffer) {
      if (capacity < v->size()) fail(ErrorCode::InvalidArgument, "buffer too small");
      std::copy(v->begin(), v->end(), buffer);
    }
  });
}

km_status km_compare(const km_run* a, const km_run* b, km_report** out) {
  return guarded([&] {
    require(a, "first run");
    require(b, "second run");
    require(out, "output pointer");
    *out = new km_report{scenario::compare_runs(a->result, b->result)};
  });
}

km_status km_report_road(const km_report* rep, int road, km_road_metrics* out) {
  return guarded([&] {
    require(rep, "report");
    require(out, "output pointer");
    if (road < 0 || road > 2) fail(ErrorCode::OutOfRange, "road index must be 0, 1 or 2");
    const auto& r = rep->report.roads[road];
    *out = {r.l1,
            r.linf,
            r.trace_a,
            r.trace_b,
            r.shock_a.has_value(),
            r.shock_b.has_value(),
            r.shock_a.value_or(0.0),
            r.shock_b.value_or(0.0),
            r.shock_offset_cells.value_or(0.0)};
  });
}

double km_report_time(const km_report* rep) { return rep ? rep->report.time : 0.0; }

void km_report_free(km_report* rep) { delete rep; }

km_status km_preset_evaluate(const char* name, const km_run* kinetic, const km_run* lwr,
                             const km_report* comparison, km_markers** out) {
  return guarded([&] {
    require(name, "preset name");
    require(out, "output pointer");
    const auto& preset = scenario::find_preset(name);
    auto* m = new km_markers;
    m->results = scenario::evaluate_markers(preset, kinetic ? &kinetic->result : nullptr,
                                            lwr ? &lwr->result : nullptr,
                                            comparison ? &comparison->report : nullptr);
    for (const auto& r : m->results) m->descriptions.push_back(scenario::describe(r.marker));
    *out = m;
  });
}

size_t km_markers_count(const km_markers* m) { return m ? m->results.size() : 0; }

km_status km_markers_get(const km_markers* m, size_t index, km_marker_result* out) {
  return guarded([&] {
    require(m, "markers");
    require(out, "output pointer");
    if (index >= m->results.size()) fail(ErrorCode::OutOfRange, "marker index out of range");
    const auto& r = m->results[index];
    *out = {m->descriptions[index].c_str(), r.observed, r.evaluated ? 1 : 0, r.passed ? 1 : 0};
  });
}

void km_markers_free(km_markers* m) { delete m; }

} // extern "C"

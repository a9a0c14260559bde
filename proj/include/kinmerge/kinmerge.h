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

#ifndef KINMERGE_KINMERGE_H
#define KINMERGE_KINMERGE_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(KINMERGE_BUILDING_LIBRARY)
#define KINMERGE_API __declspec(dllexport)
#else
#define KINMERGE_API __declspec(dllimport)
#endif
#else
#define KINMERGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum km_status {
  KM_OK = 0,
  KM_ERR_INVALID_ARGUMENT = 1,
  KM_ERR_OUT_OF_RANGE = 2,
  KM_ERR_DOMAIN = 3,
  KM_ERR_STEP_SIZE = 4,
  KM_ERR_INVARIANT = 5,
  KM_ERR_CONFIG = 6,
  KM_ERR_PARSE = 7,
  KM_ERR_IO = 8,
  KM_ERR_COMPARISON = 9,
  KM_ERR_INTERNAL = 100
} km_status;

typedef struct km_diagram km_diagram;
typedef struct km_config km_config;
typedef struct km_run km_run;
typedef struct km_report km_report;
typedef struct km_markers km_markers;

typedef double (*km_scalar_fn)(double rho, void* user);

/* Message of the last failing call on this thread; never NULL. */
KINMERGE_API const char* km_last_error(void);
KINMERGE_API const char* km_status_string(km_status status);
KINMERGE_API const char* km_version(void);

/* Fundamental diagrams */
KINMERGE_API km_status km_diagram_lwr(km_diagram** out);
/* `user` must outlive the diagram. */
KINMERGE_API km_status km_diagram_create(km_scalar_fn flux, km_scalar_fn derivative, void* user,
                                         double rho_star, double sigma, km_diagram** out);
KINMERGE_API void km_diagram_free(km_diagram* d);
KINMERGE_API km_status km_flux(const km_diagram* d, double rho, double* out);
KINMERGE_API km_status km_tau(const km_diagram* d, double rho, double* out);
KINMERGE_API km_status km_rho_minus(const km_diagram* d, double c, double* out);
KINMERGE_API km_status km_rho_plus(const km_diagram* d, double c, double* out);
KINMERGE_API km_status km_z_of_rho(const km_diagram* d, double rho, double* out);
KINMERGE_API km_status km_demand(const km_diagram* d, double rho_b, double* out);
KINMERGE_API km_status km_supply(const km_diagram* d, double rho_b, double* out);
KINMERGE_API km_status km_delta_bar(const km_diagram* d, double* out);
KINMERGE_API km_status km_check_subcharacteristic(const km_diagram* d, int samples, int* out);

/* Junction coupling */
typedef struct km_trace {
  double z_hat_1;
  double z_hat_2;
  double w_hat_3;
} km_trace;

typedef enum km_kinetic_case {
  KM_FAIR_REGULAR = 0,
  KM_FAIR_DEGENERATE = 1,
  KM_PRIORITY_I = 2,
  KM_PRIORITY_II = 3,
  KM_PRIORITY_III = 4
} km_kinetic_case;

typedef struct km_kinetic_outcome {
  double w_1;
  double w_2;
  double z_3;
  km_kinetic_case case_label;
} km_kinetic_outcome;

typedef struct km_macro_outcome {
  double caps[3];
  double fluxes[3];
  char case_label; /* 'A'..'D' */
} km_macro_outcome;

KINMERGE_API km_status km_kinetic_fair_merge(const km_trace* t, km_kinetic_outcome* out);
KINMERGE_API km_status km_kinetic_priority_merge(const km_trace* t, km_kinetic_outcome* out);
KINMERGE_API km_status km_kinetic_priority_merge_truncated(const km_trace* t, double delta,
                                                           const km_diagram* d,
                                                           km_kinetic_outcome* out);
KINMERGE_API km_status km_macro_fair_merge(const km_diagram* d, const double rho_b[3],
                                           km_macro_outcome* out);
KINMERGE_API km_status km_macro_priority_merge(const km_diagram* d, const double rho_b[3],
                                               km_macro_outcome* out);

typedef struct km_match {
  double flux[3];
  double rho_k[3];
  double rho_0_lo;
  double rho_0_hi;
  int rp_case;
  int subcase;
  char signature[4]; /* e.g. "UUS" */
} km_match;

KINMERGE_API km_status km_match_fair_merge(const km_diagram* d, const double rho_b[3],
                                           km_match* out);

/* Configuration: flat "key = value" text, keys model, coupling, rho1, rho2,
   rho3, epsilon, cells, t_end, cfl, delta, snapshots, output_dir. */
KINMERGE_API km_status km_config_default(km_config** out);
KINMERGE_API km_status km_config_parse(const char* text, km_config** out);
KINMERGE_API km_status km_config_from_preset(const char* name, const char* model, km_config** out);
KINMERGE_API km_status km_config_set(km_config* c, const char* key, const char* value);
/* Validates after a series of km_config_set calls. */
KINMERGE_API km_status km_config_validate(km_config* c);
/* Writes at most `capacity` bytes including the terminator; `needed` gets the full size. */
KINMERGE_API km_status km_config_render(const km_config* c, char* buffer, size_t capacity,
                                        size_t* needed);
KINMERGE_API const char* km_config_output_dir(const km_config* c);
KINMERGE_API void km_config_free(km_config* c);

/* Presets */
KINMERGE_API size_t km_preset_count(void);
KINMERGE_API const char* km_preset_name(size_t index);
KINMERGE_API const char* km_preset_caption(size_t index);
KINMERGE_API const char* km_preset_coupling(size_t index);
KINMERGE_API km_status km_preset_densities(size_t index, double out[3]);

/* Runs */
typedef enum km_field { KM_FIELD_X = 0, KM_FIELD_RHO = 1, KM_FIELD_Q = 2, KM_FIELD_Z = 3 } km_field;

typedef struct km_diagnostics {
  long steps;
  double relative_mass_error;
  double max_junction_imbalance;
} km_diagnostics;

KINMERGE_API km_status km_run_simulation(const km_config* c, km_run** out);
KINMERGE_API km_status km_run_write(const km_run* r, const char* dir);
KINMERGE_API km_status km_run_read(const char* dir, km_run** out);
KINMERGE_API void km_run_free(km_run* r);
KINMERGE_API int km_run_is_kinetic(const km_run* r);
KINMERGE_API size_t km_run_snapshot_count(const km_run* r);
KINMERGE_API km_status km_run_snapshot_time(const km_run* r, size_t snap, double* out);
KINMERGE_API km_status km_run_junction(const km_run* r, size_t snap, double flux[3],
                                       double trace[3]);
KINMERGE_API km_status km_run_diagnostics(const km_run* r, km_diagnostics* out);
/* Copies a road profile (road 0..2); `length` gets the cell count. Pass a
   NULL buffer to query the length. KM_FIELD_Z is empty on LWR runs. */
KINMERGE_API km_status km_run_field(const km_run* r, size_t snap, int road, km_field field,
                                    double* buffer, size_t capacity, size_t* length);

/* Comparison of final snapshots */
typedef struct km_road_metrics {
  double l1;
  double linf;
  double trace_a;
  double trace_b;
  int has_shock_a;
  int has_shock_b;
  double shock_a;
  double shock_b;
  double shock_offset_cells; /* valid when both shocks exist */
} km_road_metrics;

KINMERGE_API km_status km_compare(const km_run* a, const km_run* b, km_report** out);
KINMERGE_API km_status km_report_road(const km_report* rep, int road, km_road_metrics* out);
KINMERGE_API double km_report_time(const km_report* rep);
KINMERGE_API void km_report_free(km_report* rep);

/* Expected markers of a preset. Any of the run/report pointers may be NULL;
   markers needing them stay unevaluated. */
typedef struct km_marker_result {
  const char* description; /* owned by the km_markers handle */
  double observed;
  int evaluated;
  int passed;
} km_marker_result;

KINMERGE_API km_status km_preset_evaluate(const char* name, const km_run* kinetic,
                                          const km_run* lwr, const km_report* comparison,
                                          km_markers** out);
KINMERGE_API size_t km_markers_count(const km_markers* m);
KINMERGE_API km_status km_markers_get(const km_markers* m, size_t index, km_marker_result* out);
KINMERGE_API void km_markers_free(km_markers* m);

#ifdef __cplusplus
}
#endif

#endif

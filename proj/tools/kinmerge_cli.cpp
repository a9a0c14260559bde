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

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinmerge/kinmerge.h"

namespace {

const char* const kKeys[] = {"model", "coupling", "rho1", "rho2", "rho3",      "epsilon",
                             "cells", "t_end",    "cfl",  "delta", "snapshots", "output_dir"};
const char* const kRunKeys[] = {"epsilon", "cells", "t_end", "cfl", "delta", "snapshots"};

struct Failure {
  std::string message;
};

void check(km_status s, const std::string& context) {
  if (s != KM_OK) throw Failure{context + ": " + km_status_string(s) + ": " + km_last_error()};
}

template <class T, void (*Free)(T*)>
struct Owned {
  T* ptr = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Config = Owned<km_config, km_config_free>;
using Run = Owned<km_run, km_run_free>;
using Report = Owned<km_report, km_report_free>;
using Markers = Owned<km_markers, km_markers_free>;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{"cannot open config file " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_overrides(km_config* c, const std::map<std::string, std::optional<std::string>>& overrides) {
  for (const auto& [key, value] : overrides)
    if (value) check(km_config_set(c, key.c_str(), value->c_str()), "--" + key);
  check(km_config_validate(c), "config");
}

void print_summary(const km_run* r, const std::string& dir) {
  km_diagnostics d{};
  check(km_run_diagnostics(r, &d), "diagnostics");
  const size_t n = km_run_snapshot_count(r);
  double t = 0.0, flux[3], trace[3];
  check(km_run_snapshot_time(r, n - 1, &t), "snapshot");
  check(km_run_junction(r, n - 1, flux, trace), "snapshot");
  std::printf("%s run: %ld steps, %zu snapshot(s) in %s\n", km_run_is_kinetic(r) ? "kinetic" : "lwr",
              d.steps, n, dir.c_str());
  std::printf("  t = %.6g  junction flux (%.6f, %.6f, %.6f)  trace (%.6f, %.6f, %.6f)\n", t,
              flux[0], flux[1], flux[2], trace[0], trace[1], trace[2]);
  std::printf("  relative mass error %.3e  max junction imbalance %.3e\n", d.relative_mass_error,
              d.max_junction_imbalance);
}

void print_report(const km_report* rep) {
  std::printf("comparison at t = %.6g\n", km_report_time(rep));
  std::printf("  road        L1      Linf   trace_a   trace_b  shock offset [cells]\n");
  for (int r = 0; r < 3; ++r) {
    km_road_metrics m{};
    check(km_report_road(rep, r, &m), "report");
    std::printf("  %4d  %.2e  %.2e  %.6f  %.6f  ", r + 1, m.l1, m.linf, m.trace_a, m.trace_b);
    if (m.has_shock_a && m.has_shock_b)
      std::printf("%.2f\n", m.shock_offset_cells);
    else
      std::printf("-\n");
  }
}

bool print_markers(const std::string& preset, const km_run* kinetic, const km_run* lwr,
                   const km_report* rep) {
  Markers m;
  check(km_preset_evaluate(preset.c_str(), kinetic, lwr, rep, m.out()), "markers");
  bool ok = true;
  for (size_t i = 0; i < km_markers_count(m.get()); ++i) {
    km_marker_result r{};
    check(km_markers_get(m.get(), i, &r), "markers");
    if (!r.evaluated) {
      std::printf("  [SKIP] %s\n", r.description);
      continue;
    }
    ok = ok && r.passed;
    std::printf("  [%s] %s (observed %.6g)\n", r.passed ? "PASS" : "FAIL", r.description, r.observed);
  }
  return ok;
}

std::optional<std::string> preset_for(const std::string& name) {
  for (size_t i = 0; i < km_preset_count(); ++i)
    if (name == km_preset_name(i)) return name;
  return std::nullopt;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic merge simulations with kinetic and LWR models"};
  app.require_subcommand(1);

  std::map<std::string, std::optional<std::string>> run_flags;
  std::string config_path;
  auto* run = app.add_subcommand("run", "run one simulation and write CSV snapshots");
  run->add_option("-c,--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  for (const char* key : kKeys) run->add_option(std::string("--") + key, run_flags[key], "override config key");

  std::string dir_a, dir_b, compare_preset;
  auto* compare = app.add_subcommand("compare", "compare the final snapshots of two output directories");
  compare->add_option("dir_a", dir_a, "first run directory")->required();
  compare->add_option("dir_b", dir_b, "second run directory")->required();
  compare->add_option("--preset", compare_preset, "evaluate the expected markers of this preset");

  auto* preset = app.add_subcommand("preset", "built-in merge scenarios");
  preset->require_subcommand(1);
  auto* preset_list = preset->add_subcommand("list", "list the presets");
  std::string preset_name, preset_dir = "out";
  std::map<std::string, std::optional<std::string>> preset_flags;
  auto* preset_run = preset->add_subcommand("run", "run a preset with both models and check markers");
  preset_run->add_option("name", preset_name, "preset name")->required();
  preset_run->add_option("--output_dir", preset_dir, "base output directory");
  for (const char* key : kRunKeys)
    preset_run->add_option(std::string("--") + key, preset_flags[key], "override config key");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Config cfg;
      if (config_path.empty())
        check(km_config_default(cfg.out()), "config");
      else
        check(km_config_parse(read_file(config_path).c_str(), cfg.out()), config_path);
      apply_overrides(cfg.get(), run_flags);
      Run r;
      check(km_run_simulation(cfg.get(), r.out()), "run");
      const std::string dir = km_config_output_dir(cfg.get());
      check(km_run_write(r.get(), dir.c_str()), "write");
      print_summary(r.get(), dir);
      return 0;
    }
    if (*compare) {
      Run a, b;
      check(km_run_read(dir_a.c_str(), a.out()), dir_a);
      check(km_run_read(dir_b.c_str(), b.out()), dir_b);
      Report rep;
      check(km_compare(a.get(), b.get(), rep.out()), "compare");
      print_report(rep.get());
      if (compare_preset.empty()) return 0;
      if (!preset_for(compare_preset)) throw Failure{"unknown preset '" + compare_preset + "'"};
      const bool a_kinetic = km_run_is_kinetic(a.get());
      const km_run* kinetic = a_kinetic ? a.get() : km_run_is_kinetic(b.get()) ? b.get() : nullptr;
      const km_run* lwr = !km_run_is_kinetic(b.get()) ? b.get() : !a_kinetic ? a.get() : nullptr;
      const bool mixed = kinetic && lwr;
      return print_markers(compare_preset, kinetic, lwr, mixed ? rep.get() : nullptr) ? 0 : 1;
    }
    if (*preset_list) {
      for (size_t i = 0; i < km_preset_count(); ++i) {
        double rho[3];
        check(km_preset_densities(i, rho), "preset");
        std::printf("%-18s %-8s rho = (%g, %g, %g)  %s\n", km_preset_name(i), km_preset_coupling(i),
                    rho[0], rho[1], rho[2], km_preset_caption(i));
      }
      return 0;
    }
    if (*preset_run) {
      if (!preset_for(preset_name)) throw Failure{"unknown preset '" + preset_name + "'"};
      Run runs[2];
      const char* models[2] = {"kinetic", "lwr"};
      for (int k = 0; k < 2; ++k) {
        Config cfg;
        check(km_config_from_preset(preset_name.c_str(), models[k], cfg.out()), preset_name);
        const std::string dir = preset_dir + "/" + preset_name + "/" + models[k];
        check(km_config_set(cfg.get(), "output_dir", dir.c_str()), "output_dir");
        apply_overrides(cfg.get(), preset_flags);
        check(km_run_simulation(cfg.get(), runs[k].out()), models[k]);
        check(km_run_write(runs[k].get(), dir.c_str()), "write");
        print_summary(runs[k].get(), dir);
      }
      Report rep;
      check(km_compare(runs[0].get(), runs[1].get(), rep.out()), "compare");
      print_report(rep.get());
      std::printf("expected markers of %s\n", preset_name.c_str());
      return print_markers(preset_name, runs[0].get(), runs[1].get(), rep.get()) ? 0 : 1;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return 2;
  }
  return 0;
}

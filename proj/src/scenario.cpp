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

#include "kinmerge/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kinmerge/error.hpp"

namespace kinmerge::scenario {

namespace fs = std::filesystem;
using network::CouplingFamily;
using network::Model;

namespace {

constexpr int kEdgeCells = 5;
constexpr int kPlateauOffset = 10;
constexpr double kMinJump = 0.02;

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_error(std::string_view key, int line, const std::string& what) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << "'" << key << "': " << what;
  fail(ErrorCode::Parse, os.str());
}

double to_double(std::string_view key, std::string_view text, int line) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    parse_error(key, line, "expected a number, got '" + std::string(text) + "'");
  return v;
}

int to_int(std::string_view key, std::string_view text, int line) {
  text = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    parse_error(key, line, "expected an integer, got '" + std::string(text) + "'");
  return v;
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* model_name(Model m) { return m == Model::Kinetic ? "kinetic" : "lwr"; }

void write_csv(const fs::path& path, const network::RoadProfile& p, bool kinetic) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  std::fputs(kinetic ? "x,rho,q,Z\n" : "x,rho,flux\n", f);
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    if (kinetic)
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", p.x[i], p.rho[i], p.q[i], p.z[i]);
    else
      std::fprintf(f, "%.17g,%.17g,%.17g\n", p.x[i], p.rho[i], p.q[i]);
  }
  bool bad = std::ferror(f) != 0;
  if (std::fclose(f) != 0 || bad) fail(ErrorCode::Io, "failed writing " + path.string());
}

network::RoadProfile read_csv(const fs::path& path, bool kinetic) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  network::RoadProfile p;
  const std::size_t columns = kinetic ? 4 : 3;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      char* end = nullptr;
      v.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str()) fail(ErrorCode::Io, path.string() + ":" + std::to_string(row) + ": bad number");
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (v.size() != columns)
      fail(ErrorCode::Io, path.string() + ":" + std::to_string(row) + ": wrong column count");
    p.x.push_back(v[0]);
    p.rho.push_back(v[1]);
    p.q.push_back(v[2]);
    if (kinetic) p.z.push_back(v[3]);
  }
  return p;
}

std::string csv_name(int road, std::size_t snap) {
  return "road" + std::to_string(road + 1) + "_snap" + std::to_string(snap) + ".csv";
}

} // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys{"model", "coupling", "rho1",  "rho2",
                                                  "rho3",  "epsilon",  "cells", "t_end",
                                                  "cfl",   "delta",    "snapshots", "output_dir"};
  return keys;
}

void apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value, int line) {
  value = trim(value);
  auto& s = c.sim;
  if (key == "model") {
    if (value == "kinetic") s.model = Model::Kinetic;
    else if (value == "lwr") s.model = Model::Lwr;
    else parse_error(key, line, "expected 'kinetic' or 'lwr', got '" + std::string(value) + "'");
  } else if (key == "coupling") {
    if (value == "fair") c.family = CouplingFamily::Fair;
    else if (value == "priority") c.family = CouplingFamily::Priority;
    else parse_error(key, line, "expected 'fair' or 'priority', got '" + std::string(value) + "'");
  } else if (key == "rho1" || key == "rho2" || key == "rho3") {
    double v = to_double(key, value, line);
    if (!(v >= 0.0 && v <= 1.0)) parse_error(key, line, "density must lie in [0,1]");
    s.initial_densities[key.back() - '1'] = v;
  } else if (key == "epsilon") {
    double v = to_double(key, value, line);
    if (!(v > 0.0)) parse_error(key, line, "must be positive");
    s.epsilon = v;
  } else if (key == "cells") {
    int v = to_int(key, value, line);
    if (v < 1) parse_error(key, line, "must be at least 1");
    s.cells_per_road = v;
  } else if (key == "t_end") {
    double v = to_double(key, value, line);
    if (!(v >= 0.0)) parse_error(key, line, "must be non-negative");
    s.t_end = v;
  } else if (key == "cfl") {
    double v = to_double(key, value, line);
    if (!(v > 0.0 && v < 1.0)) parse_error(key, line, "must lie in (0,1)");
    s.cfl_number = v;
  } else if (key == "delta") {
    double v = to_double(key, value, line);
    if (!(v >= 0.0)) parse_error(key, line, "must be non-negative");
    s.delta = v;
  } else if (key == "snapshots") {
    s.snapshot_times.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto item = trim(rest.substr(0, comma));
      if (!item.empty()) s.snapshot_times.push_back(to_double(key, item, line));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else if (key == "output_dir") {
    if (value.empty()) parse_error(key, line, "must not be empty");
    c.output_dir = std::string(value);
  } else {
    parse_error(key, line, "unknown key");
  }
}

void finalize(ScenarioConfig& c) {
  c.sim.coupling = network::paired_coupling(c.sim.model, c.family, c.sim.delta);
  network::validate(c.sim);
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream os;
      os << "line " << line_no << ": expected 'key = value', got '" << line << "'";
      fail(ErrorCode::Parse, os.str());
    }
    auto key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) parse_error(key, line_no, "given twice");
    apply_setting(c, key, line.substr(eq + 1), line_no);
  }
  try {
    finalize(c);
  } catch (const Error& e) {
    fail(ErrorCode::Parse, e.what());
  }
  return c;
}

std::string render_config(const ScenarioConfig& c) {
  std::ostringstream os;
  const auto& s = c.sim;
  os << "model = " << model_name(s.model) << '\n'
     << "coupling = " << network::to_string(c.family) << '\n';
  for (int i = 0; i < 3; ++i) os << "rho" << i + 1 << " = " << shortest(s.initial_densities[i]) << '\n';
  os << "epsilon = " << shortest(s.epsilon) << '\n'
     << "cells = " << s.cells_per_road << '\n'
     << "t_end = " << shortest(s.t_end) << '\n'
     << "cfl = " << shortest(s.cfl_number) << '\n'
     << "delta = " << shortest(s.delta) << '\n';
  if (!s.snapshot_times.empty()) {
    os << "snapshots = ";
    for (std::size_t i = 0; i < s.snapshot_times.size(); ++i)
      os << (i ? ", " : "") << shortest(s.snapshot_times[i]);
    os << '\n';
  }
  os << "output_dir = " << c.output_dir << '\n';
  return os.str();
}

std::string describe(const Marker& m) {
  std::ostringstream os;
  os.precision(6);
  const char* src = m.source == MarkerSource::Kinetic ? "kinetic"
                    : m.source == MarkerSource::Lwr  ? "lwr"
                                                     : "kinetic-vs-lwr";
  os << src << ": ";
  const int r = m.road + 1, o = m.other + 1;
  switch (m.kind) {
  case MarkerKind::TraceNear:
    os << "road " << r << " junction trace = " << m.value << " +- " << m.tolerance;
    break;
  case MarkerKind::TraceAtLeast: os << "road " << r << " junction trace >= " << m.value; break;
  case MarkerKind::FluxNear:
    os << "road " << r << " junction flux = " << m.value << " +- " << m.tolerance;
    break;
  case MarkerKind::FluxAtMost: os << "road " << r << " junction flux <= " << m.value; break;
  case MarkerKind::TraceGreater: os << "road " << r << " junction trace > road " << o; break;
  case MarkerKind::ShockUpstream: os << "road " << r << " shock upstream of road " << o; break;
  case MarkerKind::L1Below: os << "road " << r << " L1 distance < " << m.value; break;
  }
  return os.str();
}

const std::vector<ScenarioPreset>& presets() {
  using K = MarkerKind;
  constexpr auto kin = MarkerSource::Kinetic;
  constexpr auto lwr = MarkerSource::Lwr;
  constexpr auto cmp = MarkerSource::Comparison;
  const double congested = 0.5 * (1.0 + std::sqrt(0.5));
  static const std::vector<ScenarioPreset> all{
      {"merge_fair_1",
       {0.1, 0.15, 0.2},
       CouplingFamily::Fair,
       "fair merging, free flow through the junction",
       {{kin, K::TraceNear, 2, 0, 0.3197, 2e-3},
        {lwr, K::TraceNear, 2, 0, 0.3197, 2e-3},
        {cmp, K::L1Below, 0, 0, 0.02, 0.0},
        {cmp, K::L1Below, 1, 0, 0.02, 0.0},
        {cmp, K::L1Below, 2, 0, 0.02, 0.0}}},
      {"merge_fair_2",
       {0.7, 0.6, 0.2},
       CouplingFamily::Fair,
       "fair merging, jams on both incoming roads",
       {{kin, K::TraceNear, 0, 0, congested, 5e-3},
        {kin, K::TraceNear, 1, 0, congested, 5e-3},
        {lwr, K::TraceNear, 0, 0, congested, 5e-3},
        {lwr, K::TraceNear, 1, 0, congested, 5e-3}}},
      {"merge_fair_3",
       {0.05, 0.6, 0.2},
       CouplingFamily::Fair,
       "fair merging, road 1 passes, road 2 congested",
       {{kin, K::TraceNear, 1, 0, 0.7179, 2e-3}, {lwr, K::TraceNear, 1, 0, 0.7179, 2e-3}}},
      {"merge_fair_4",
       {0.2, 0.5, 0.8},
       CouplingFamily::Fair,
       "fair merging into a congested outgoing road",
       {{kin, K::TraceNear, 0, 0, 0.9123, 2e-3},
        {kin, K::TraceNear, 1, 0, 0.9123, 2e-3},
        {lwr, K::TraceNear, 0, 0, 0.9123, 2e-3},
        {lwr, K::TraceNear, 1, 0, 0.9123, 2e-3}}},
      {"merge_priority_1",
       {0.6, 0.7, 0.2},
       CouplingFamily::Priority,
       "priority merging, road 2 blocked",
       {{kin, K::FluxAtMost, 1, 0, 2.5e-3, 0.0},
        {kin, K::TraceAtLeast, 1, 0, 0.99, 0.0},
        {lwr, K::FluxAtMost, 1, 0, 1e-12, 0.0},
        {lwr, K::TraceAtLeast, 1, 0, 0.99, 0.0}}},
      {"merge_priority_2",
       {0.1, 0.5, 0.2},
       CouplingFamily::Priority,
       "priority merging, road 1 free, road 2 partly waiting",
       {{kin, K::FluxNear, 0, 0, 0.09, 2e-3},
        {lwr, K::FluxNear, 0, 0, 0.09, 1e-12},
        {lwr, K::FluxNear, 1, 0, 0.16, 1e-12}}},
      {"merge_priority_3",
       {0.4, 0.4, 0.7},
       CouplingFamily::Priority,
       "priority merging into a congested road, asymmetric jams",
       {{kin, K::ShockUpstream, 1, 0, 0.0, 0.0},
        {kin, K::TraceGreater, 1, 0, 0.0, 0.0},
        {lwr, K::ShockUpstream, 1, 0, 0.0, 0.0},
        {lwr, K::TraceGreater, 1, 0, 0.0, 0.0}}},
  };
  return all;
}

const ScenarioPreset& find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  fail(ErrorCode::Config, "unknown preset '" + std::string(name) + "'");
}

ScenarioConfig preset_config(const ScenarioPreset& p, Model model) {
  ScenarioConfig c;
  c.sim.model = model;
  c.sim.initial_densities = p.densities;
  c.family = p.family;
  c.output_dir = (fs::path("out") / p.name / model_name(model)).string();
  finalize(c);
  return c;
}

void emit_snapshots(const network::RunResult& run, const ScenarioConfig& c, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  const bool kinetic = run.config.model == Model::Kinetic;
  nlohmann::json manifest;
  const auto& s = run.config;
  manifest["config"] = {{"model", model_name(s.model)},
                        {"coupling", network::to_string(c.family)},
                        {"coupling_variant", network::to_string(s.coupling)},
                        {"rho", s.initial_densities},
                        {"epsilon", s.epsilon},
                        {"cells", s.cells_per_road},
                        {"t_end", s.t_end},
                        {"cfl", s.cfl_number},
                        {"delta", s.delta},
                        {"snapshots", s.snapshot_times},
                        {"output_dir", c.output_dir}};
  manifest["diagnostics"] = {{"steps", run.diagnostics.steps},
                             {"relative_mass_error", run.diagnostics.relative_mass_error},
                             {"max_junction_imbalance", run.diagnostics.max_junction_imbalance}};
  nlohmann::json snaps = nlohmann::json::array();
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const auto& snap = run.snapshots[k];
    nlohmann::json files = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
      write_csv(dir / csv_name(r, k), snap.roads[r], kinetic);
      files.push_back(csv_name(r, k));
    }
    snaps.push_back({{"index", k},
                     {"requested_time", snap.requested_time},
                     {"time", snap.time},
                     {"junction_flux", snap.junction_flux},
                     {"junction_trace", snap.junction_trace},
                     {"files", files}});
  }
  manifest["snapshots"] = snaps;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing " + (dir / "manifest.json").string());
}

network::RunResult read_snapshots(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) fail(ErrorCode::Io, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json m;
  try {
    in >> m;
    network::RunResult run;
    auto& s = run.config;
    const auto& c = m.at("config");
    s.model = c.at("model").get<std::string>() == "kinetic" ? Model::Kinetic : Model::Lwr;
    const auto family = c.at("coupling").get<std::string>() == "fair" ? CouplingFamily::Fair
                                                                       : CouplingFamily::Priority;
    s.initial_densities = c.at("rho").get<std::array<double, 3>>();
    s.epsilon = c.at("epsilon").get<double>();
    s.cells_per_road = c.at("cells").get<int>();
    s.t_end = c.at("t_end").get<double>();
    s.cfl_number = c.at("cfl").get<double>();
    s.delta = c.at("delta").get<double>();
    s.snapshot_times = c.at("snapshots").get<std::vector<double>>();
    s.coupling = network::paired_coupling(s.model, family, s.delta);
    const auto& d = m.at("diagnostics");
    run.diagnostics = {d.at("steps").get<long>(), d.at("relative_mass_error").get<double>(),
                       d.at("max_junction_imbalance").get<double>()};
    const bool kinetic = s.model == Model::Kinetic;
    for (const auto& j : m.at("snapshots")) {
      network::Snapshot snap;
      snap.requested_time = j.at("requested_time").get<double>();
      snap.time = j.at("time").get<double>();
      snap.junction_flux = j.at("junction_flux").get<std::array<double, 3>>();
      snap.junction_trace = j.at("junction_trace").get<std::array<double, 3>>();
      const auto files = j.at("files").get<std::vector<std::string>>();
      if (files.size() != 3) fail(ErrorCode::Io, "manifest snapshot needs three road files");
      for (int r = 0; r < 3; ++r) snap.roads[r] = read_csv(dir / files[r], kinetic);
      run.snapshots.push_back(std::move(snap));
    }
    return run;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Io, (dir / "manifest.json").string() + ": " + e.what());
  }
}

std::optional<double> shock_position(const std::vector<double>& x, const std::vector<double>& rho) {
  const int n = static_cast<int>(rho.size());
  if (n < 2 * kEdgeCells + 2) return std::nullopt;
  int best = -1;
  double jump = 0.0;
  for (int i = kEdgeCells; i + 1 < n - kEdgeCells; ++i) {
    double j = std::abs(rho[i + 1] - rho[i]);
    if (j > jump) {
      jump = j;
      best = i;
    }
  }
  if (best < 0 || jump < kMinJump) return std::nullopt;
  const int lo = std::max(best - kPlateauOffset, 0);
  const int hi = std::min(best + 1 + kPlateauOffset, n - 1);
  const double level = 0.5 * (rho[lo] + rho[hi]);
  for (int i = lo; i < hi; ++i) {
    const double a = rho[i] - level, b = rho[i + 1] - level;
    if (a == 0.0) return x[i];
    if (a * b < 0.0) return x[i] + (x[i + 1] - x[i]) * a / (a - b);
  }
  return 0.5 * (x[best] + x[best + 1]);
}

ComparisonReport compare_runs(const network::RunResult& a, const network::RunResult& b) {
  if (a.snapshots.empty() || b.snapshots.empty())
    fail(ErrorCode::Comparison, "both runs need at least one snapshot");
  if (a.snapshots.size() != b.snapshots.size())
    fail(ErrorCode::Comparison, "runs carry different numbers of snapshots");
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    if (std::abs(a.snapshots[k].time - b.snapshots[k].time) > 1e-12) {
      std::ostringstream os;
      os << "snapshot " << k << " taken at t = " << a.snapshots[k].time << " and t = "
         << b.snapshots[k].time;
      fail(ErrorCode::Comparison, os.str());
    }
  }
  const auto& sa = a.snapshots.back();
  const auto& sb = b.snapshots.back();
  ComparisonReport rep;
  rep.time = sa.time;
  for (int r = 0; r < 3; ++r) {
    const auto& pa = sa.roads[r];
    const auto& pb = sb.roads[r];
    if (pa.x.size() != pb.x.size() || pa.x.empty())
      fail(ErrorCode::Comparison, "road " + std::to_string(r + 1) + ": grids differ");
    for (std::size_t i = 0; i < pa.x.size(); ++i)
      if (std::abs(pa.x[i] - pb.x[i]) > 1e-12)
        fail(ErrorCode::Comparison, "road " + std::to_string(r + 1) + ": cell centres differ");
    const double dx = pa.x.size() > 1 ? pa.x[1] - pa.x[0] : 2.0 * pa.x[0];
    RoadComparison& rc = rep.roads[r];
    for (std::size_t i = 0; i < pa.rho.size(); ++i) {
      const double diff = std::abs(pa.rho[i] - pb.rho[i]);
      rc.l1 += diff * dx;
      rc.linf = std::max(rc.linf, diff);
    }
    rc.trace_a = sa.junction_trace[r];
    rc.trace_b = sb.junction_trace[r];
    rc.shock_a = shock_position(pa.x, pa.rho);
    rc.shock_b = shock_position(pb.x, pb.rho);
    if (rc.shock_a && rc.shock_b) rc.shock_offset_cells = (*rc.shock_b - *rc.shock_a) / dx;
  }
  return rep;
}

std::vector<MarkerResult> evaluate_markers(const ScenarioPreset& preset,
                                           const network::RunResult* kinetic,
                                           const network::RunResult* lwr,
                                           const ComparisonReport* comparison) {
  std::vector<MarkerResult> out;
  for (const Marker& m : preset.markers) {
    MarkerResult res;
    res.marker = m;
    if (m.source == MarkerSource::Comparison) {
      if (comparison) {
        res.evaluated = true;
        res.observed = comparison->roads[m.road].l1;
        res.passed = res.observed < m.value;
      }
      out.push_back(res);
      continue;
    }
    const network::RunResult* run = m.source == MarkerSource::Kinetic ? kinetic : lwr;
    if (!run || run->snapshots.empty()) {
      out.push_back(res);
      continue;
    }
    const auto& snap = run->snapshots.back();
    res.evaluated = true;
    switch (m.kind) {
    case MarkerKind::TraceNear:
      res.observed = snap.junction_trace[m.road];
      res.passed = std::abs(res.observed - m.value) <= m.tolerance;
      break;
    case MarkerKind::TraceAtLeast:
      res.observed = snap.junction_trace[m.road];
      res.passed = res.observed >= m.value;
      break;
    case MarkerKind::FluxNear:
      res.observed = snap.junction_flux[m.road];
      res.passed = std::abs(res.observed - m.value) <= m.tolerance;
      break;
    case MarkerKind::FluxAtMost:
      res.observed = snap.junction_flux[m.road];
      res.passed = res.observed <= m.value;
      break;
    case MarkerKind::TraceGreater:
      res.observed = snap.junction_trace[m.road] - snap.junction_trace[m.other];
      res.passed = res.observed > 0.0;
      break;
    case MarkerKind::ShockUpstream: {
      auto s = shock_position(snap.roads[m.road].x, snap.roads[m.road].rho);
      auto o = shock_position(snap.roads[m.other].x, snap.roads[m.other].rho);
      res.passed = s && o && *s < *o;
      res.observed = s && o ? *o - *s : std::nan("");
      break;
    }
    case MarkerKind::L1Below: res.evaluated = false; break;
    }
    out.push_back(res);
  }
  return out;
}

} // namespace kinmerge::scenario

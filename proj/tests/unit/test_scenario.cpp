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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support/generators.hpp"
#include "kinmerge/error.hpp"
#include "kinmerge/scenario.hpp"

using namespace kinmerge;
using namespace kinmerge::scenario;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("kinmerge_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string parse_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  return {};
}

network::RunResult quick_run(network::Model model, int cells) {
  ScenarioConfig c = preset_config(find_preset("merge_fair_1"), model);
  c.sim.cells_per_road = cells;
  c.sim.t_end = 0.2;
  return network::run(c.sim);
}

} // namespace

TEST_CASE("parse_config defaults and values") {
  auto c = parse_config("");
  CHECK(c.sim.model == network::Model::Kinetic);
  CHECK(c.sim.coupling == network::Coupling::KineticFair);
  CHECK(c.sim.epsilon == 1e-3);
  CHECK(c.sim.cells_per_road == 1000);
  CHECK(c.sim.t_end == 1.0);
  CHECK(c.output_dir == "out");

  auto d = parse_config("# comment\nmodel = lwr\ncoupling = priority\nrho1 = 0.1 # trailing\n"
                        "rho2=0.5\nrho3 = 0.2\nsnapshots = 0.25, 0.5,1\ncells = 50\n");
  CHECK(d.sim.model == network::Model::Lwr);
  CHECK(d.sim.coupling == network::Coupling::MacroPriority);
  CHECK(d.sim.initial_densities[1] == 0.5);
  CHECK(d.sim.snapshot_times == std::vector<double>{0.25, 0.5, 1.0});
  CHECK(d.sim.cells_per_road == 50);

  auto t = parse_config("coupling = priority\ndelta = 0.25\n");
  CHECK(t.sim.coupling == network::Coupling::KineticPriorityTruncated);
  auto u = parse_config("coupling = priority\ndelta = 0\n");
  CHECK(u.sim.coupling == network::Coupling::KineticPriority);
}

TEST_CASE("parse errors carry line and key") {
  const auto eps = parse_message("model = lwr\nepsilon = 0\n");
  CHECK(eps.find("line 2") != std::string::npos);
  CHECK(eps.find("epsilon") != std::string::npos);
  CHECK(parse_message("bogus = 1\n").find("bogus") != std::string::npos);
  CHECK(parse_message("cells = ten\n").find("line 1") != std::string::npos);
  CHECK(parse_message("rho1 = 1.5\n").find("rho1") != std::string::npos);
  CHECK(parse_message("model lwr\n").find("line 1") != std::string::npos);
  CHECK(parse_message("cells = 5\ncells = 6\n").find("line 2") != std::string::npos);
  CHECK_FALSE(parse_message("coupling = priority\ndelta = 0.9\n").empty());
  CHECK_FALSE(parse_message("t_end = 1\nsnapshots = 2\n").empty());
}

TEST_CASE("render_config round trip") {
  auto c = parse_config("model = lwr\nrho1 = 0.1\nrho2 = 0.3\nsnapshots = 0.5, 1\noutput_dir = x/y\n");
  auto again = parse_config(render_config(c));
  CHECK(render_config(again) == render_config(c));
  CHECK(again.output_dir == "x/y");
  CHECK(again.sim.initial_densities == c.sim.initial_densities);
  CHECK(config_keys().size() == 12);
}

TEST_CASE("presets") {
  const auto& all = presets();
  CHECK(all.size() == 7);
  CHECK(find_preset("merge_fair_1").densities == std::array<double, 3>{0.1, 0.15, 0.2});
  CHECK(find_preset("merge_priority_3").family == network::CouplingFamily::Priority);
  CHECK_THROWS_AS(find_preset("nope"), Error);
  for (const auto& p : all) {
    CHECK_FALSE(p.markers.empty());
    for (const auto& m : p.markers) CHECK_FALSE(describe(m).empty());
    auto k = preset_config(p, network::Model::Kinetic);
    auto l = preset_config(p, network::Model::Lwr);
    CHECK(network::is_kinetic(k.sim.coupling));
    CHECK_FALSE(network::is_kinetic(l.sim.coupling));
    CHECK(k.output_dir == (fs::path("out") / p.name / "kinetic").string());
  }
}

TEST_CASE("emit and read round trip bit-exactly") {
  for (network::Model model : {network::Model::Kinetic, network::Model::Lwr}) {
    ScenarioConfig c = preset_config(find_preset("merge_fair_1"), model);
    c.sim.cells_per_road = 1000;
    c.sim.t_end = 0.05;
    c.sim.snapshot_times = {0.0, 0.05};
    auto run = network::run(c.sim);
    const auto dir = scratch(std::string("roundtrip_") + (model == network::Model::Kinetic ? "k" : "l"));
    emit_snapshots(run, c, dir);
    CHECK(fs::exists(dir / "road1_snap0.csv"));
    CHECK(fs::exists(dir / "road3_snap1.csv"));

    std::ifstream csv(dir / "road2_snap1.csv");
    std::string header, row;
    std::getline(csv, header);
    CHECK(header == (model == network::Model::Kinetic ? "x,rho,q,Z" : "x,rho,flux"));
    int rows = 0;
    std::getline(csv, row);
    ++rows;
    CHECK(std::stod(row.substr(0, row.find(','))) == 0.0005);
    while (std::getline(csv, row)) ++rows;
    CHECK(rows == 1000);

    std::ifstream mf(dir / "manifest.json");
    auto manifest = nlohmann::json::parse(mf);
    CHECK(manifest["config"]["epsilon"].get<double>() == 0.001);
    CHECK(manifest["snapshots"].size() == 2);

    auto back = read_snapshots(dir);
    REQUIRE(back.snapshots.size() == run.snapshots.size());
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
      CHECK(back.snapshots[k].time == run.snapshots[k].time);
      CHECK(back.snapshots[k].junction_trace == run.snapshots[k].junction_trace);
      for (int r = 0; r < 3; ++r) {
        CHECK(back.snapshots[k].roads[r].x == run.snapshots[k].roads[r].x);
        CHECK(back.snapshots[k].roads[r].rho == run.snapshots[k].roads[r].rho);
        CHECK(back.snapshots[k].roads[r].q == run.snapshots[k].roads[r].q);
        CHECK(back.snapshots[k].roads[r].z == run.snapshots[k].roads[r].z);
      }
    }
    CHECK(back.config.model == model);
    CHECK(back.diagnostics.steps == run.diagnostics.steps);
    fs::remove_all(dir);
  }
  CHECK_THROWS_AS(read_snapshots(scratch("missing")), Error);
}

TEST_CASE("compare_runs") {
  auto a = quick_run(network::Model::Kinetic, 100);
  auto same = compare_runs(a, a);
  for (const auto& r : same.roads) {
    CHECK(r.l1 == 0.0);
    CHECK(r.linf == 0.0);
  }
  CHECK(same.time == 0.2);
  auto b = quick_run(network::Model::Lwr, 100);
  auto diff = compare_runs(a, b);
  for (const auto& r : diff.roads) CHECK(r.l1 < 0.02);
  auto coarse = quick_run(network::Model::Lwr, 50);
  CHECK_THROWS_AS(compare_runs(a, coarse), Error);
  auto later = a;
  later.snapshots.back().time = 0.3;
  CHECK_THROWS_AS(compare_runs(a, later), Error);
}

TEST_CASE("shock_position") {
  std::vector<double> x(200), rho(200);
  for (int i = 0; i < 200; ++i) {
    x[i] = (i + 0.5) / 200.0;
    rho[i] = x[i] < 0.6 ? 0.2 : 0.8;
  }
  auto s = shock_position(x, rho);
  REQUIRE(s.has_value());
  CHECK(std::abs(*s - 0.6) <= 1.0 / 200.0);
  std::vector<double> flat(200, 0.4);
  CHECK_FALSE(shock_position(x, flat).has_value());
}

TEST_CASE("property: shock_position finds random jumps") {
  gen::Source g(77);
  for (int n = 0; n < 1000; ++n) {
    const int cells = g.integer(100, 400);
    const double at = g.range(0.1, 0.9);
    const double lo = g.range(0.0, 0.45), hi = g.range(0.55, 1.0);
    std::vector<double> x(cells), rho(cells);
    for (int i = 0; i < cells; ++i) {
      x[i] = (i + 0.5) / cells;
      rho[i] = x[i] < at ? lo : hi;
    }
    auto s = shock_position(x, rho);
    REQUIRE(s.has_value());
    REQUIRE(std::abs(*s - at) <= 1.0 / cells);
  }
}

TEST_CASE("evaluate_markers leaves missing inputs unevaluated") {
  const auto& p = find_preset("merge_priority_2");
  auto results = evaluate_markers(p, nullptr, nullptr, nullptr);
  CHECK(results.size() == p.markers.size());
  for (const auto& r : results) CHECK_FALSE(r.evaluated);
}

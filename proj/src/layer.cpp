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

#include "kinmerge/layer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "kinmerge/error.hpp"

namespace kinmerge::layer {

namespace {

constexpr double kOdeTol = 1e-10;
constexpr double kConvergenceTol = 1e-6;
constexpr int kConvergenceWindow = 10;
constexpr double kDivergenceBand = 1e-8;
constexpr double kFixpointSnap = 1e-12;
// Ties between merge subcases are detected up to round-off.
constexpr double kTie = 1e-14;

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << v << " outside [0,1]";
    fail(ErrorCode::OutOfRange, os.str());
  }
}

void check_flux(const FundamentalDiagram& d, double c) {
  if (!(c >= 0.0 && c <= d.sigma())) {
    std::ostringstream os;
    os << "layer flux " << c << " outside [0, sigma]";
    fail(ErrorCode::OutOfRange, os.str());
  }
}

} // namespace

bool Interval::contains(double x, double tol) const {
  bool above = lo_closed ? x >= lo - tol : x > lo - tol;
  bool below = hi_closed ? x <= hi + tol : x < hi + tol;
  return above && below;
}

bool HalfRiemannClass::admits(double rho_k, double tol) const {
  return std::any_of(admissible_k.begin(), admissible_k.end(),
                     [&](const Interval& i) { return i.contains(rho_k, tol); });
}

FixpointReport classify_fixpoints(const FundamentalDiagram& d, Side side, double c) {
  check_flux(d, c);
  FixpointReport r;
  r.rho_minus = rho_minus(d, c);
  r.rho_plus = rho_plus(d, c);
  if (c == d.sigma()) {
    r.stable = d.rho_star();
    r.attraction = side == Side::Left ? Interval{d.rho_star(), 1.0, true, false}
                                      : Interval{0.0, d.rho_star(), true, true};
    return r;
  }
  if (side == Side::Left) {
    r.stable = r.rho_plus;
    r.unstable = r.rho_minus;
    r.attraction = c == 0.0 ? Interval{0.0, 1.0, false, true}
                            : Interval{r.rho_minus, 1.0, false, false};
  } else {
    r.stable = r.rho_minus;
    r.unstable = r.rho_plus;
    r.attraction = c == 0.0 ? Interval{0.0, 1.0, true, false}
                            : Interval{0.0, r.rho_plus, true, false};
  }
  return r;
}

LayerTrajectory integrate_layer(const LayerProblem& p, const FundamentalDiagram& d, double y_max,
                                int steps) {
  check_flux(d, p.flux);
  check_unit(p.rho0, "layer density rho0");
  if (!(y_max > 0.0) || steps < 1)
    fail(ErrorCode::InvalidArgument, "integrate_layer needs y_max > 0 and steps >= 1");

  const FixpointReport fix = classify_fixpoints(d, p.side, p.flux);
  const double h = y_max / steps;
  LayerTrajectory out;
  out.y.reserve(steps + 1);
  out.rho.reserve(steps + 1);

  auto constant = [&](double first, double rest) {
    for (int k = 0; k <= steps; ++k) {
      out.y.push_back(k * h);
      out.rho.push_back(k == 0 ? first : rest);
    }
    out.converged = true;
    out.limit = rest;
    return out;
  };

  const double C = p.flux;
  if (C == 0.0) {
    // Without flux the layer is a jump straight to the stable state.
    const double fixed = p.side == Side::Left ? 0.0 : 1.0;
    return constant(p.rho0, p.rho0 == fixed ? fixed : fix.stable);
  }

  const std::array<double, 3> candidates{fix.rho_minus, fix.rho_plus, 1.0};
  for (double c : candidates) {
    if (std::abs(p.rho0 - c) <= kFixpointSnap) {
      LayerTrajectory t = constant(p.rho0, p.rho0);
      t.diverged = c == 1.0;
      return t;
    }
  }

  namespace odeint = boost::numeric::odeint;
  const double sign = p.side == Side::Left ? 1.0 : -1.0;
  auto rhs = [&](const double& r, double& drdy, double) {
    drdy = sign * (1.0 - r) * (d.flux(r) - C) / C;
  };
  auto stepper = odeint::make_dense_output(kOdeTol, kOdeTol, h, odeint::runge_kutta_dopri5<double>());
  stepper.initialize(p.rho0, 0.0, std::min(1e-2, h));

  out.y.push_back(0.0);
  out.rho.push_back(p.rho0);
  int window = 0;
  double near = -1.0;
  for (int k = 1; k <= steps && !out.diverged; ++k) {
    const double yk = k * h;
    while (stepper.current_time() < yk) {
      stepper.do_step(rhs);
      const double r = stepper.current_state();
      if (!(r >= -kDivergenceBand && r <= 1.0 + kDivergenceBand)) {
        out.diverged = true;
        break;
      }
      auto best = std::min_element(candidates.begin(), candidates.end(), [&](double a, double b) {
        return std::abs(r - a) < std::abs(r - b);
      });
      if (std::abs(r - *best) < kConvergenceTol) {
        window = *best == near ? window + 1 : 1;
        near = *best;
        if (window >= kConvergenceWindow) {
          out.converged = true;
          out.limit = near;
        }
      } else {
        window = 0;
        near = -1.0;
        out.converged = false;
      }
    }
    if (out.diverged) break;
    double x = 0.0;
    stepper.calc_state(yk, x);
    out.y.push_back(yk);
    out.rho.push_back(x);
  }
  // rho = 1 is a fixpoint of the ODE, but it needs C = 0 in the limit.
  if (out.converged && out.limit == 1.0) out.diverged = true;
  return out;
}

HalfRiemannClass classify_half_riemann(const FundamentalDiagram& d, Side side, double rho_b) {
  check_unit(rho_b, "boundary trace rho_B");
  HalfRiemannClass c;
  c.side = side;
  const double star = d.rho_star();
  if (side == Side::Left) {
    if (rho_b <= star) {
      c.label = RiemannLabel::RP1;
      c.admissible_k = {{0.0, star, true, true}};
    } else {
      c.label = RiemannLabel::RP2;
      c.admissible_k = {{0.0, tau(d, rho_b), true, true}, Interval::point(rho_b)};
    }
  } else {
    if (rho_b >= star) {
      c.label = RiemannLabel::RP1;
      c.admissible_k = {{star, 1.0, true, true}};
    } else {
      c.label = RiemannLabel::RP2;
      c.admissible_k = {Interval::point(rho_b), {tau(d, rho_b), 1.0, true, true}};
    }
  }
  return c;
}

std::string_view to_string(BoundaryCase c) {
  switch (c) {
  case BoundaryCase::Ingoing1a: return "ingoing-1a";
  case BoundaryCase::Ingoing1b: return "ingoing-1b";
  case BoundaryCase::Transonic: return "transonic";
  case BoundaryCase::Outgoing: return "outgoing";
  }
  return "?";
}

BoundaryValue left_boundary_condition(const FundamentalDiagram& d, double z_in, double rho_b) {
  check_unit(z_in, "prescribed Z");
  check_unit(rho_b, "boundary trace rho_B");
  const double star = d.rho_star();
  const double sigma = d.sigma();
  BoundaryValue v;
  if (rho_b <= star) {
    if (z_in <= z_of_rho(d, star)) {
      double r = rho_of_z(d, z_in, 0.0, star);
      v = {d.flux(r), r, r, BoundaryCase::Ingoing1a};
    } else {
      v = {sigma, star, 1.0 + sigma - sigma / z_in, BoundaryCase::Transonic};
    }
  } else {
    const double t = tau(d, rho_b);
    if (z_in <= z_of_rho(d, t)) {
      double r = rho_of_z(d, z_in, 0.0, t);
      v = {d.flux(r), r, r, BoundaryCase::Ingoing1b};
    } else {
      const double c = d.flux(rho_b);
      v = {c, rho_b, 1.0 + c - c / z_in, BoundaryCase::Outgoing};
    }
  }
  v.rho_0 = std::clamp(v.rho_0, 0.0, 1.0);
  return v;
}

BoundaryValue right_boundary_condition(const FundamentalDiagram& d, double w_in, double rho_b) {
  check_unit(w_in, "prescribed w");
  check_unit(rho_b, "boundary trace rho_B");
  const double star = d.rho_star();
  const double sigma = d.sigma();
  auto congested_root = [&](double lo) {
    return bisect([&](double r) { return r - d.flux(r) - w_in; }, lo, 1.0);
  };
  BoundaryValue v;
  if (rho_b >= star) {
    if (w_in >= star - sigma) {
      double r = congested_root(star);
      v = {d.flux(r), r, r, BoundaryCase::Ingoing1a};
    } else {
      v = {sigma, star, w_in + sigma, BoundaryCase::Transonic};
    }
  } else {
    const double t = tau(d, rho_b);
    if (w_in >= t - d.flux(t)) {
      double r = congested_root(t);
      v = {d.flux(r), r, r, BoundaryCase::Ingoing1b};
    } else {
      const double c = d.flux(rho_b);
      v = {c, rho_b, w_in + c, BoundaryCase::Outgoing};
    }
  }
  v.flux = std::max(v.flux, 0.0);
  v.rho_0 = std::clamp(v.rho_0, 0.0, 1.0);
  return v;
}

std::string signature_string(const Signature& s) {
  std::string out;
  for (Stability x : s) out += x == Stability::Stable ? 'S' : 'U';
  return out;
}

std::string MatchResult::label() const {
  std::ostringstream os;
  os << "Case " << rp_case << "." << subcase << " " << signature_string(signature);
  return os.str();
}

MatchResult match_fair_merge(const FundamentalDiagram& d, double b1, double b2, double b3) {
  check_unit(b1, "rho_B^1");
  check_unit(b2, "rho_B^2");
  check_unit(b3, "rho_B^3");
  constexpr auto U = Stability::Unstable;
  constexpr auto S = Stability::Stable;
  const double star = d.rho_star();
  const double sigma = d.sigma();
  const double F1 = d.flux(b1);
  const double F2 = d.flux(b2);
  const double F3 = d.flux(b3);
  auto plus = [&](double c) { return rho_plus(d, c); };
  auto minus = [&](double c) { return rho_minus(d, c); };

  auto make = [](std::array<double, 3> flux, std::array<double, 3> rho_k, DensityBounds rho_0,
                 int rp_case, int subcase, Signature sig) {
    MatchResult m;
    m.flux = flux;
    m.rho_k = rho_k;
    m.rho_0 = {rho_0, rho_0, rho_0};
    m.rp_case = rp_case;
    m.subcase = subcase;
    m.signature = sig;
    m.ambiguous = rho_0.hi > rho_0.lo;
    return m;
  };
  auto at = [](double r) { return DensityBounds{r, r}; };

  // Both incoming roads jammed behind a junction that splits the outgoing capacity.
  auto symmetric = [&](double cap, double k3, int rp_case, int subcase) {
    const double k = plus(0.5 * cap);
    return make({0.5 * cap, 0.5 * cap, cap}, {k, k, k3}, at(k), rp_case, subcase, {U, U, S});
  };
  // One incoming road passes its full demand, the other takes the remainder.
  auto road2_limited = [&](double cap, double k3, int rp_case, int subcase) {
    const double rest = cap - F2;
    if (rest > sigma + kTie) fail(ErrorCode::Domain, "road-1 share exceeds sigma");
    const double k = plus(rest);
    return make({rest, F2, cap}, {k, b2, k3}, at(k), rp_case, subcase, {U, S, S});
  };
  auto road1_limited = [&](double cap, double k3, int rp_case, int subcase) {
    const double rest = cap - F1;
    if (rest > sigma + kTie) fail(ErrorCode::Domain, "road-2 share exceeds sigma");
    const double k = plus(rest);
    return make({F1, rest, cap}, {b1, k, k3}, at(k), rp_case, subcase, {S, U, S});
  };
  // Everything passes; SSS on the exact tie F1 + F2 = capacity.
  auto free_flow = [&](double cap, int rp_case, int subcase) {
    const double total = F1 + F2;
    const double k3 = minus(total);
    if (std::abs(total - cap) <= kTie) {
      DensityBounds range{k3, std::min(plus(F1), plus(F2))};
      return make({F1, F2, total}, {b1, b2, k3}, range, rp_case, subcase, {S, S, S});
    }
    return make({F1, F2, total}, {b1, b2, k3}, at(k3), rp_case, subcase, {S, S, U});
  };

  const bool hi1 = b1 >= star, lo1 = b1 <= star;
  const bool hi2 = b2 >= star, lo2 = b2 <= star;
  const bool hi3 = b3 >= star, lo3 = b3 <= star;

  if (hi1 && hi2 && lo3) return symmetric(sigma, star, 1, 1);
  if (hi1 && hi2 && hi3) return symmetric(F3, b3, 2, 1);
  if (hi1 && lo2 && lo3) {
    if (F2 >= 0.5 * sigma) return symmetric(sigma, star, 3, 1);
    return road2_limited(sigma, star, 3, 2);
  }
  if (lo1 && hi2 && lo3) {
    if (F1 >= 0.5 * sigma) return symmetric(sigma, star, 4, 1);
    return road1_limited(sigma, star, 4, 2);
  }
  if (hi1 && lo2 && hi3) {
    if (F3 <= 2.0 * F2) return symmetric(F3, b3, 5, 1);
    return road2_limited(F3, b3, 5, 2);
  }
  if (lo1 && hi2 && hi3) {
    if (F3 <= 2.0 * F1) return symmetric(F3, b3, 6, 1);
    return road1_limited(F3, b3, 6, 2);
  }
  if (lo3) {
    // Case 7: every trace free-flowing.
    if (F1 + F2 <= sigma || std::abs(F1 + F2 - sigma) <= kTie) return free_flow(sigma, 7, 1);
    if (F1 >= 0.5 * sigma && F2 >= 0.5 * sigma) return symmetric(sigma, star, 7, 2);
    if (F1 >= 0.5 * sigma) return road2_limited(sigma, star, 7, 3);
    return road1_limited(sigma, star, 7, 4);
  }
  // Case 8: incoming free-flowing, outgoing congested.
  if (std::abs(F1 + F2 - F3) <= kTie) return free_flow(F3, 8, 4);
  if (F3 <= 2.0 * F1 && F3 <= 2.0 * F2) return symmetric(F3, b3, 8, 1);
  if (F3 >= 2.0 * F2 && F1 + F2 >= F3) return road2_limited(F3, b3, 8, 2);
  if (F3 >= 2.0 * F1 && F1 + F2 >= F3) return road1_limited(F3, b3, 8, 3);
  return free_flow(F3, 8, 4);
}

CouplingVerdict enumerate_layer_couplings(const FundamentalDiagram& d, const Signature& sig,
                                          const std::array<double, 3>& flux) {
  constexpr auto U = Stability::Unstable;
  const double sigma = d.sigma();
  const double C1 = flux[0], C2 = flux[1], C3 = flux[2];
  for (double c : flux) {
    if (!(c >= 0.0 && c <= sigma + kTie)) fail(ErrorCode::OutOfRange, "coupling flux outside [0, sigma]");
  }
  CouplingVerdict v;
  v.flux = flux;
  auto reject = [&](std::string why) {
    v.admissible = false;
    v.relation = std::move(why);
    return v;
  };

  const bool in1 = sig[0] == U, in2 = sig[1] == U, out3 = sig[2] == U;
  if (out3 && (in1 || in2))
    return reject("unstable incoming layer needs C = sigma against an unstable outgoing one");

  if (in1 && in2) {
    v.flux = {0.5 * C3, 0.5 * C3, C3};
    const double r = rho_plus(d, 0.5 * C3);
    v.rho_0 = {r, r};
    v.admissible = true;
    v.relation = "C1 = C2 = C3/2, rho_0 = rho_plus(C3/2)";
    return v;
  }
  if (in1 && !in2) {
    if (2.0 * C2 > C3 + kTie) return reject("needs C3 >= 2 C2");
    v.flux = {C3 - C2, C2, C3};
    const double r = rho_plus(d, C3 - C2);
    v.rho_0 = {r, r};
    v.admissible = true;
    v.relation = "C1 = C3 - C2, rho_0 = rho_plus(C3 - C2)";
    return v;
  }
  if (!in1 && in2) {
    if (2.0 * C1 > C3 + kTie) return reject("needs C3 >= 2 C1");
    v.flux = {C1, C3 - C1, C3};
    const double r = rho_plus(d, C3 - C1);
    v.rho_0 = {r, r};
    v.admissible = true;
    v.relation = "C2 = C3 - C1, rho_0 = rho_plus(C3 - C1)";
    return v;
  }
  // Both incoming layers stable.
  if (C1 + C2 > sigma + kTie) return reject("needs C1 + C2 <= sigma");
  v.flux = {C1, C2, C1 + C2};
  const double lo = rho_minus(d, C1 + C2);
  v.admissible = true;
  if (out3) {
    v.rho_0 = {lo, lo};
    v.relation = "C3 = C1 + C2, rho_0 = rho_minus(C1 + C2)";
  } else {
    v.rho_0 = {lo, std::min(rho_plus(d, C1), rho_plus(d, C2))};
    v.relation = "C3 = C1 + C2, rho_minus(C1 + C2) <= rho_0 <= min(rho_plus(C1), rho_plus(C2))";
  }
  return v;
}

void write_match_table(std::ostream& os, const FundamentalDiagram& d, int n) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "match table needs n >= 2");
  os << "rho_b_1,rho_b_2,rho_b_3,case,subcase,signature,C1,C2,C3,rho_k_1,rho_k_2,rho_k_3,"
        "rho_0_lo,rho_0_hi\n";
  const auto old = os.precision(17);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double b1 = double(i) / (n - 1), b2 = double(j) / (n - 1), b3 = double(k) / (n - 1);
        const MatchResult m = match_fair_merge(d, b1, b2, b3);
        os << b1 << ',' << b2 << ',' << b3 << ',' << m.rp_case << ',' << m.subcase << ','
           << signature_string(m.signature);
        for (double c : m.flux) os << ',' << c;
        for (double r : m.rho_k) os << ',' << r;
        os << ',' << m.rho_0[0].lo << ',' << m.rho_0[0].hi << '\n';
      }
  os.precision(old);
}

} // namespace kinmerge::layer

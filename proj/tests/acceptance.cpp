// Acceptance suite: one pass/fail line per criterion on stdout, enforced via
// doctest assertions so ctest reports failures.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <vector>

#include "v2xsim/apm.hpp"
#include "v2xsim/engine.hpp"
#include "v2xsim/propagation.hpp"
#include "v2xsim/relay.hpp"
#include "v2xsim/report.hpp"
#include "v2xsim/rng.hpp"

using namespace v2xsim;

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void verdict(int criterion, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", criterion, ": ", detail);
}

long double oracle_nu(long double h, long double lambda, long double d1, long double d2) {
  return h * sqrtl((1.0L / lambda) * (1.0L / d1 + 1.0L / d2));
}

long double oracle_knife(long double nu) {
  if (nu <= 0.0L) return 0.0L;
  const long double u = nu - 0.1L;
  return 6.9L + 20.0L * log10l(sqrtl(u * u + 1.0L) + u);
}

// Shared 20-seed policy study at the designed configuration (N = 50 m,
// ego 30 km/h, compression 32x). Computed once, reused by criteria 3-6.
struct PolicyStudy {
  std::map<std::string, std::vector<RunMetrics>> runs;
  std::map<std::string, double> mean_prr;
  std::map<std::string, double> mean_switches;
  double elapsed_s = 0.0;

  static const PolicyStudy& get() {
    static const PolicyStudy study = [] {
      PolicyStudy s;
      const double start = now_s();
      ScenarioConfig scenario;  // defaults: N = 50, 30 km/h
      SimConfig sim;            // defaults: compression 32x
      std::vector<uint64_t> seeds;
      for (uint64_t i = 1; i <= 20; ++i) seeds.push_back(i);
      const std::vector<PolicyKind> policies = {PolicyKind::Mohed, PolicyKind::SignalStrength,
                                                PolicyKind::Random, PolicyKind::Direct};
      const SweepResult sweep =
          sweep_density({scenario.spawn_spacing_N}, seeds, scenario, sim, policies, 2);
      for (const auto& m : sweep.all_runs) s.runs[m.policy].push_back(m);
      for (const auto& [policy, list] : s.runs) {
        double prr = 0.0, sw = 0.0;
        for (const auto& m : list) {
          prr += m.prr;
          sw += m.relay_switches;
        }
        s.mean_prr[policy] = prr / list.size();
        s.mean_switches[policy] = sw / list.size();
      }
      s.elapsed_s = now_s() - start;
      return s;
    }();
    return study;
  }
};

}  // namespace

TEST_CASE("criterion 1: formula oracles") {
  const double start = now_s();
  ChannelParams params;
  bool ok = std::abs(knife_edge_loss(0.1) - 6.9) <= 1e-9;
  Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double h = rng.uniform(-2.0, 5.0);
    const double d1 = rng.uniform(0.5, 300.0);
    const double d2 = rng.uniform(0.5, 300.0);
    const double nu = fresnel_nu(h, params.wavelength_m, d1, d2);
    const long double nu_o = oracle_nu(h, params.wavelength_m, d1, d2);
    const double nu_err = std::abs(nu - static_cast<double>(nu_o)) /
                          std::max(1.0, std::abs(static_cast<double>(nu_o)));
    const double loss = knife_edge_loss(nu);
    const long double loss_o = oracle_knife(static_cast<long double>(nu));
    const double loss_err = std::abs(loss - static_cast<double>(loss_o)) /
                            std::max(1.0, std::abs(static_cast<double>(loss_o)));
    worst = std::max(worst, std::max(nu_err, loss_err));
    ok = ok && nu_err <= 1e-9 && loss_err <= 1e-9;
  }
  for (int c = 0; c <= 6; ++c) {
    ok = ok && building_penetration_loss(c) == 9.6 * c;
  }
  const double elapsed = now_s() - start;
  ok = ok && elapsed < 1.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "knife(0.1)=6.9, 1000-tuple worst rel err %.2e, 9.6 dB/wall exact, %.2fs",
                worst, elapsed);
  verdict(1, ok, detail);
}

TEST_CASE("criterion 2: vehicle shadow magnitude in the reported range") {
  const double start = now_s();
  ChannelParams params;
  Rng rng(7);
  int in_range = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double ha = rng.uniform(1.5, 1.9);
    const double hb = rng.uniform(1.5, 1.9);
    const double d1 = rng.uniform(10.0, 50.0);
    const double d2 = rng.uniform(10.0, 50.0);
    const double line_h = ha + (d1 / (d1 + d2)) * (hb - ha);
    const double nu = fresnel_nu(4.0 - line_h, params.wavelength_m, d1, d2);
    const double loss = knife_edge_loss(nu);
    if (loss >= 15.0 && loss <= 25.0) ++in_range;
  }
  const double frac = static_cast<double>(in_range) / n;
  const double elapsed = now_s() - start;
  const bool ok = frac >= 0.95 && elapsed < 1.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail), "loss in [15,25] dB for %.1f%% of %d geometries, %.2fs",
                100.0 * frac, n, elapsed);
  verdict(2, ok, detail);
}

TEST_CASE("criterion 3: policy ordering and margin over 20 seeds") {
  const PolicyStudy& study = PolicyStudy::get();
  const double mohed = study.mean_prr.at("mohed");
  const double ss = study.mean_prr.at("signal_strength");
  const double rnd = study.mean_prr.at("random");
  const double direct = study.mean_prr.at("direct");
  const double margin = mohed - std::max(ss, rnd);
  const bool ok = mohed > rnd && mohed > ss && ss > direct && rnd > direct &&
                  margin >= 0.15 && study.elapsed_s < 300.0;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "mean PRR mohed %.4f, signal %.4f, random %.4f, direct %.4f; margin %.1f pp; "
                "%.1fs",
                mohed, ss, rnd, direct, 100.0 * margin, study.elapsed_s);
  verdict(3, ok, detail);
}

TEST_CASE("criterion 4: direct-link degradation during the blocking window") {
  const PolicyStudy& study = PolicyStudy::get();
  double mean_per = 0.0, min_per = 1.0;
  uint64_t window_packets = 0;
  for (const auto& m : study.runs.at("direct")) {
    mean_per += m.blocking_window_per;
    min_per = std::min(min_per, m.blocking_window_per);
    window_packets += m.blocking_window_packets;
  }
  mean_per /= study.runs.at("direct").size();
  const bool ok = mean_per >= 0.45 && window_packets > 0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "direct blocking-window PER mean %.3f (min %.3f over seeds, %llu packets)",
                mean_per, min_per, static_cast<unsigned long long>(window_packets));
  verdict(4, ok, detail);
}

TEST_CASE("criterion 5: relay stability orderings") {
  const PolicyStudy& study = PolicyStudy::get();
  const double mohed = study.mean_switches.at("mohed");
  const double ss = study.mean_switches.at("signal_strength");
  const double rnd = study.mean_switches.at("random");
  bool direct_zero = true;
  for (const auto& m : study.runs.at("direct")) direct_zero = direct_zero && m.relay_switches == 0;
  const bool ok = mohed < ss && mohed < rnd && direct_zero;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "mean switches mohed %.2f < signal %.2f, random %.2f; direct all zero: %s",
                mohed, ss, rnd, direct_zero ? "yes" : "no");
  verdict(5, ok, detail);
}

TEST_CASE("criterion 6: signal-strength anomaly appears on some seed") {
  const PolicyStudy& study = PolicyStudy::get();
  const auto& ss = study.runs.at("signal_strength");
  const auto& rnd = study.runs.at("random");
  int anomalies = 0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if (ss[i].prr < rnd[i].prr) ++anomalies;
  }
  const bool ok = anomalies >= 1;
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "signal_strength < random on %d of %zu seeds", anomalies, ss.size());
  verdict(6, ok, detail);
}

TEST_CASE("criterion 7: APM wire format") {
  Apm apm;
  apm.frame = {{3.0, -4.0}, 0.25, 2.0, 20, 20};
  apm.cells.assign(400, 9);
  const auto bytes = serialize_apm(apm, nullptr, 77, 12.5);
  bool ok = bytes.size() - 54 == 1600;

  Rng rng(99);
  int round_trips = 0;
  for (int i = 0; i < 10000; ++i) {
    Apm a;
    const int rows = 1 + static_cast<int>(rng.uniform_int(24));
    const int cols = 1 + static_cast<int>(rng.uniform_int(24));
    a.frame = {{rng.uniform(-500, 500), rng.uniform(-500, 500)}, rng.uniform(-M_PI, M_PI),
               rng.uniform(0.25, 8.0), rows, cols};
    a.cells.resize(static_cast<std::size_t>(rows) * cols);
    for (auto& c : a.cells) c = static_cast<uint32_t>(rng.next_u64());
    const uint32_t src = static_cast<uint32_t>(rng.next_u64());
    const double stamp = rng.uniform(0.0, 1e6);
    const auto wire = serialize_apm(a, nullptr, src, stamp);
    const ApmMessage msg = deserialize_apm(wire);
    const auto wire2 = serialize_apm(msg.apm, nullptr, msg.source_id, msg.timestamp);
    if (wire2 == wire && msg.apm.cells == a.cells && msg.apm.frame.rows == rows &&
        msg.apm.frame.cols == cols && msg.source_id == src && msg.timestamp == stamp) {
      ++round_trips;
    }
  }
  ok = ok && round_trips == 10000;
  char detail[120];
  std::snprintf(detail, sizeof(detail), "20x20 payload 1600 B; %d/10000 bit-exact round trips",
                round_trips);
  verdict(7, ok, detail);
}

TEST_CASE("criterion 8: APMM conservation, soundness, benefit oracles") {
  Rng rng(55);
  bool conservation = true;
  for (int trial = 0; trial < 60; ++trial) {
    const Point2 center{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const double heading = rng.uniform(0, 2 * M_PI);
    const int rows = 6 + static_cast<int>(rng.uniform_int(18));
    const int cols = 6 + static_cast<int>(rng.uniform_int(18));
    const double k = rng.uniform(0.5, 4.0);
    const FramePose pose{center, heading};
    std::vector<Point2> samples;
    const int inside = static_cast<int>(rng.uniform_int(3000));
    for (int i = 0; i < inside; ++i) {
      samples.push_back(pose.to_world({rng.uniform(-0.499, 0.499) * cols * k,
                                       rng.uniform(-0.499, 0.499) * rows * k}));
    }
    const int outside = static_cast<int>(rng.uniform_int(500));
    const double out_r = (rows + cols) * k;
    for (int i = 0; i < outside; ++i) {
      samples.push_back(pose.to_world({out_r + rng.uniform(1, 100), rng.uniform(-5, 5)}));
    }
    const Apm apm = build_apm(samples, center, heading, k, rows, cols);
    conservation = conservation && apm.total() == static_cast<uint64_t>(inside);
  }

  bool soundness = true;
  const std::vector<int> windows = {3, 5};
  for (int trial = 0; trial < 40; ++trial) {
    Apm apm;
    apm.frame = {{0, 0}, 0.0, 2.0, 14, 14};
    apm.cells.resize(14 * 14);
    for (auto& c : apm.cells) c = static_cast<uint32_t>(rng.uniform_int(4));
    const auto zones = find_blind_zones(apm, 1.5, windows);
    for (const auto& zone : zones) {
      // exhaustive re-scan: some qualifying placement must sit inside the zone
      bool found = false;
      const Point2 local = apm.frame.pose().to_local(zone.center);
      for (int w : windows) {
        for (int r = 0; r + w <= 14 && !found; ++r) {
          for (int c = 0; c + w <= 14 && !found; ++c) {
            uint64_t sum = 0;
            for (int i = 0; i < w; ++i) {
              for (int j = 0; j < w; ++j) sum += apm.at(r + i, c + j);
            }
            if (static_cast<double>(sum) >= 1.5 * w * w) continue;
            const double cx = (0.5 * (2 * c + w) - 7.0) * 2.0;
            const double cy = (0.5 * (2 * r + w) - 7.0) * 2.0;
            found = std::hypot(cx - local.x, cy - local.y) <= zone.range + 1e-9;
          }
        }
      }
      soundness = soundness && found;
    }
  }

  bool benefit_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 1 + static_cast<int>(rng.uniform_int(8));
    const int cols = 1 + static_cast<int>(rng.uniform_int(8));
    const double k = rng.uniform(0.5, 3.0);
    Apm apm;
    apm.frame = {{0, 0}, 0.0, k, rows, cols};
    apm.cells.resize(static_cast<std::size_t>(rows) * cols);
    for (auto& c : apm.cells) c = static_cast<uint32_t>(rng.uniform_int(25));
    const BlindZone zone{{rng.uniform(-12, 12), rng.uniform(-12, 12)}, rng.uniform(0, 15)};
    double want = 0.0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const Point2 cc = apm.frame.cell_center_local(r, c);
        if (std::hypot(cc.x - zone.center.x, cc.y - zone.center.y) <= zone.range) {
          want += static_cast<double>(apm.at(r, c)) * k * k;
        }
      }
    }
    benefit_ok = benefit_ok && std::abs(perception_benefit(zone, apm) - want) <= 1e-9;
  }

  const bool ok = conservation && soundness && benefit_ok;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "conservation %s; zone soundness %s; benefit oracle (100 grids) %s",
                conservation ? "exact" : "BROKEN", soundness ? "holds" : "BROKEN",
                benefit_ok ? "matches" : "BROKEN");
  verdict(8, ok, detail);
}

TEST_CASE("criterion 9: sub-matrix restriction equals full-grid brute force") {
  Rng rng(41);
  int worlds = 0, agreements = 0;
  while (worlds < 1000) {
    WorldState world;
    const int n = static_cast<int>(rng.uniform_int(12));
    for (int i = 0; i < n; ++i) {
      VehicleState v;
      v.id = static_cast<uint32_t>(10 + i);
      v.position = {rng.uniform(-30, 30), rng.uniform(-30, 30)};
      v.velocity = {rng.uniform(-12, 12), rng.uniform(-12, 12)};
      v.heading = rng.uniform(0, 2 * M_PI);
      v.length = rng.uniform(4, 13);
      v.width = rng.uniform(1.6, 2.6);
      v.height = rng.uniform(1.2, 4.5);
      world.vehicles.push_back(v);
    }
    Apm apm;
    apm.frame = {{rng.uniform(-5, 5), rng.uniform(-5, 5)}, rng.uniform(0, 2 * M_PI),
                 rng.uniform(1.5, 3.0), 32, 32};
    apm.cells.assign(32 * 32, 0);
    const MobilityHeightLayer layer = build_mobility_height_layer(world, apm);

    VehicleState a, b;
    a.id = 1;
    a.position = {rng.uniform(-28, 28), rng.uniform(-28, 28)};
    a.antenna_height = rng.uniform(1.4, 2.0);
    b.id = 2;
    b.position = {rng.uniform(-28, 28), rng.uniform(-28, 28)};
    b.antenna_height = rng.uniform(1.4, 2.0);
    if (distance(a.position, b.position) < 2.0) continue;
    const auto got = obstacles_between(layer, a, b);
    if (!got) continue;
    ++worlds;

    // full-grid brute force: same qualifying rule, no sub-grid restriction
    const FramePose pose = layer.frame.pose();
    const Point2 la = pose.to_local(a.position);
    const Point2 lb = pose.to_local(b.position);
    const auto ca = layer.frame.cell_of_world(a.position);
    const auto cb = layer.frame.cell_of_world(b.position);
    const double k = layer.frame.k;
    const double seg_len = std::hypot(lb.x - la.x, lb.y - la.y);
    struct Span {
      double u0, u1, height;
    };
    std::vector<Span> spans;
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        if ((r == ca->first && c == ca->second) || (r == cb->first && c == cb->second)) continue;
        const auto& cell = layer.at(r, c);
        if (cell.sample_count == 0) continue;
        const double x0 = (c - 16.0) * k;
        const double y0 = (r - 16.0) * k;
        double u0 = 0.0, u1 = 1.0;
        const double dx = lb.x - la.x, dy = lb.y - la.y;
        const double p[4] = {-dx, dx, -dy, dy};
        const double q[4] = {la.x - x0, x0 + k - la.x, la.y - y0, y0 + k - la.y};
        bool hit = true;
        for (int e = 0; e < 4 && hit; ++e) {
          if (p[e] == 0.0) {
            hit = q[e] >= 0.0;
          } else {
            const double u = q[e] / p[e];
            if (p[e] < 0.0) {
              if (u > u0) u0 = u;
            } else {
              if (u < u1) u1 = u;
            }
          }
        }
        if (!hit || !(u1 - u0 > kGeomEps / seg_len)) continue;
        const double um = 0.5 * (u0 + u1);
        const double line_h = a.antenna_height + um * (b.antenna_height - a.antenna_height);
        if (!(cell.max_height > line_h)) continue;
        spans.push_back({u0, u1, cell.max_height});
      }
    }
    std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) { return x.u0 < y.u0; });
    std::vector<std::pair<double, double>> merged;  // (t_mid, height)
    const double touch = 0.5 * k / seg_len;
    std::size_t i = 0;
    while (i < spans.size()) {
      double lo = spans[i].u0, hi = spans[i].u1, h = spans[i].height;
      std::size_t j = i + 1;
      while (j < spans.size() && spans[j].u0 <= hi + touch) {
        hi = std::max(hi, spans[j].u1);
        h = std::max(h, spans[j].height);
        ++j;
      }
      merged.emplace_back(0.5 * (lo + hi), h);
      i = j;
    }
    bool same = got->size() == merged.size();
    for (std::size_t m = 0; same && m < merged.size(); ++m) {
      same = std::abs((*got)[m].t_mid - merged[m].first) <= 1e-9 &&
             (*got)[m].height == merged[m].second;
    }
    agreements += same;
  }
  const bool ok = agreements == worlds;
  char detail[120];
  std::snprintf(detail, sizeof(detail), "%d/%d randomized worlds agree", agreements, worlds);
  verdict(9, ok, detail);
}

TEST_CASE("criterion 10: forced two-hop statistics and bit-identical reruns") {
  ScenarioConfig scenario;
  scenario.seed = 3;
  scenario.duration = 70.0;
  SimConfig sim;
  sim.policy.kind = PolicyKind::Direct;
  sim.forced_hop_psr = {0.9, 0.8};
  const RunMetrics a = run(scenario, sim);
  const RunMetrics b = run(scenario, sim);
  const double p = 0.72;
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(a.packets_generated));
  const bool enough = a.packets_generated >= 100000;
  const bool stat_ok = std::abs(a.prr - p) <= 3.0 * se;
  const bool identical = metrics_to_json(a, scenario, sim) == metrics_to_json(b, scenario, sim);
  const bool ok = enough && stat_ok && identical;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "delivery %.5f vs 0.72 (3SE = %.5f, n = %llu); reruns identical: %s",
                a.prr, 3.0 * se, static_cast<unsigned long long>(a.packets_generated),
                identical ? "yes" : "no");
  verdict(10, ok, detail);
}

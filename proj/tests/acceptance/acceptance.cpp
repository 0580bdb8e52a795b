// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance            run everything
//   acceptance NAME...    run the named criteria only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "activecanvas/features.hpp"
#include "activecanvas/harness.hpp"
#include "activecanvas/mi.hpp"
#include "activecanvas/refiner.hpp"
#include "activecanvas/workspace.hpp"
#include "support/oracles.hpp"

using namespace activecanvas;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << v;
  return s.str();
}

Outcome mi_oracle() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (double rho : {0.0, 0.5, 0.9}) {
    const auto g = oracle::correlated_gaussian(2000, rho, 1000 + static_cast<int>(rho * 10));
    const double est = mi::estimate_mi(g.x, g.y, 3, 0).nats;
    const double err = std::abs(est - oracle::gaussian_mi(rho));
    ok = ok && err <= 0.10;
    detail += "rho=" + fmt(rho, 1) + " err=" + fmt(err) + " ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 5.0;
  return {ok, detail + "time=" + fmt(secs, 2) + "s (tol 0.10 nats, 5 s)"};
}

Outcome invariance() {
  struct Transform {
    const char* name;
    std::function<double(double)> f;
  };
  const std::vector<Transform> transforms{
      {"2v+1", [](double v) { return 2.0 * v + 1.0; }},
      {"-0.5v+3", [](double v) { return -0.5 * v + 3.0; }},
      {"v^3+v", [](double v) { return v * v * v + v; }},
  };
  double worst = 0.0;
  std::string worst_case;
  bool symmetric = true;
  for (double rho : {0.5, 0.9}) {
    const auto g = oracle::correlated_gaussian(2000, rho, 77);
    const double base = mi::estimate_mi(g.x, g.y, 3, 0).nats;
    for (const auto& t : transforms) {
      const auto tx = oracle::map_block(g.x, t.f);
      const auto ty = oracle::map_block(g.y, t.f);
      for (double v : {mi::estimate_mi(tx, g.y, 3, 0).nats, mi::estimate_mi(g.x, ty, 3, 0).nats}) {
        if (std::abs(v - base) > worst) {
          worst = std::abs(v - base);
          worst_case = std::string(t.name) + " rho=" + fmt(rho, 1);
        }
      }
      symmetric = symmetric && mi::estimate_mi(tx, g.y, 3, 5).nats == mi::estimate_mi(g.y, tx, 3, 5).nats;
    }
    symmetric = symmetric && mi::estimate_mi(g.x, g.y, 3, 5).nats == mi::estimate_mi(g.y, g.x, 3, 5).nats;
  }
  return {worst <= 0.05 && symmetric, "max shift=" + fmt(worst) + " (" + worst_case + ", tol 0.05) symmetry " +
                                          (symmetric ? "bit-exact" : "BROKEN")};
}

Outcome ranking_oracle() {
  int informative_first = 0;
  int mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    const std::size_t n = 60, touched = 30;
    const std::size_t hot = std::uniform_int_distribution<std::size_t>(0, 9)(rng);
    std::vector<std::vector<double>> cols(10, std::vector<double>(n));
    for (auto& c : cols) {
      for (auto& v : c) v = z(rng);
    }
    auto layout = oracle::make_layout(n);
    for (std::size_t i = 0; i < touched; ++i) {
      layout.move(i, 0.5 + 0.12 * cols[hot][i] + 0.03 * z(rng), 0.5 + 0.1 * z(rng));
    }
    const auto m = oracle::matrix_from_columns(std::move(cols));
    const auto fast = features::rank_features(m, layout, 3, seed);
    const auto brute = oracle::per_column_mi(m, layout, 3, seed);
    const auto order = oracle::rank_by_score(brute);
    bool same = fast.size() == order.size();
    for (std::size_t i = 0; same && i < order.size(); ++i) {
      same = fast[i].column == order[i] && fast[i].mi_nats == std::max(0.0, brute[order[i]]);
    }
    mismatches += !same;
    informative_first += fast.front().column == hot;
  }
  return {informative_first >= 95 && mismatches == 0,
          "informative first " + std::to_string(informative_first) + "/100 (need 95), brute-force mismatches " +
              std::to_string(mismatches)};
}

Outcome refinement_monotonicity() {
  int violations = 0;
  double worst_disp = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    const std::size_t n = 40;
    const std::size_t dims = 2 + seed % 9;
    const std::size_t touched = 5 + seed % 16;
    std::vector<std::vector<double>> cols(dims, std::vector<double>(n));
    for (auto& c : cols) {
      for (auto& v : c) v = z(rng);
    }
    auto layout = oracle::make_layout(n);
    for (std::size_t i = 0; i < touched; ++i) layout.move(i, u(rng), u(rng));
    EngineConfig config;
    config.seed = seed;
    const auto reduced = oracle::matrix_from_columns(std::move(cols));
    const auto r = refine::refine_positions(reduced, layout, config);
    double disp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      disp = std::max({disp, std::abs(r.refined[i].x - layout[i].x), std::abs(r.refined[i].y - layout[i].y)});
    }
    worst_disp = std::max(worst_disp, disp);
    violations += (r.mi_after < r.mi_before) + (disp > config.delta);
  }
  return {violations == 0, std::to_string(violations) + " violations over 100 instances, max displacement " +
                               fmt(worst_disp, 6) + " (delta 0.15)"};
}

Outcome guided_workflow() {
  std::vector<double> aris;
  double slowest_ms = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    harness::SyntheticSpec spec;
    spec.seed = 100 + s;
    const auto d = harness::generate_synthetic(spec);
    workspace::Workspace ws("guided", d.manifest, d.features, workspace::random_layout(d.manifest, s));
    harness::SimulatedUser user;  // class anchors, sigma 0.03, schedule 8/14/20
    user.seed = s;
    EngineConfig config;
    config.seed = s;
    const auto report = harness::simulate(ws, d.labels, user, config);
    for (const auto& r : report.records) slowest_ms = std::max(slowest_ms, r.engine_ms);
    aris.push_back(report.final_ari);
  }
  const double med = median(aris);
  return {med >= 0.8 && slowest_ms <= 10'000.0,
          "median final ARI " + fmt(med) + " (need 0.8), slowest refinement " + fmt(slowest_ms, 1) + " ms (budget 10000)"};
}

Outcome commit_semantics() {
  oracle::TempDir tmp("accept-commit");
  const auto d = harness::generate_synthetic(harness::SyntheticSpec{});
  workspace::Workspace ws("commits", d.manifest, d.features, workspace::random_layout(d.manifest, 3));
  bool growth = ws.dims() == 500;
  harness::SimulatedUser user;
  user.schedule = {8};
  harness::simulate(ws, d.labels, user, EngineConfig{});
  workspace::commit(ws, "s1", "first", tmp.path());
  growth = growth && ws.dims() == 502;
  workspace::commit(ws, "s1", "second", tmp.path());
  growth = growth && ws.dims() == 504 && ws.commits().size() == 2;

  const auto back = workspace::reload_workspace(tmp.path(), "commits");
  double worst = 0.0;
  bool shape = back.dims() == ws.dims() && back.size() == ws.size();
  for (std::size_t c = 0; shape && c < ws.dims(); ++c) {
    for (std::size_t r = 0; r < ws.size(); ++r) {
      worst = std::max(worst, std::abs(back.raw_features()(r, c) - ws.raw_features()(r, c)));
    }
  }
  const bool logs = back.commits() == ws.commits() && back.layout() == ws.layout() &&
                    back.raw_features().provenance() == ws.raw_features().provenance();
  return {growth && shape && worst <= 1e-12 && logs,
          std::string("D 500->502->504 ") + (growth ? "ok" : "WRONG") + ", reload max diff " + fmt(worst, 15) +
              ", logs " + (logs ? "equal" : "DIFFER")};
}

Outcome lazy_user_leverage() {
  std::vector<double> with, without, bull_with, bull_without;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    harness::SyntheticSpec spec;
    spec.seed = 100 + s;
    const auto d = harness::generate_synthetic(spec);
    const workspace::Workspace plain("lazy", d.manifest, d.features, workspace::random_layout(d.manifest, s));
    auto primed = plain;
    harness::commit_sorted_layout(primed, d.labels, harness::Strategy::kClassAnchors, 0.03, s * 31, "diligent");
    EngineConfig config;
    config.seed = s;
    for (auto strategy : {harness::Strategy::kClassAnchors, harness::Strategy::kBullseye}) {
      harness::SimulatedUser lazy;
      lazy.strategy = strategy;
      lazy.sigma = 0.10;
      lazy.schedule = {10};
      lazy.seed = s;
      auto a = primed;
      auto b = plain;
      const double wa = harness::simulate(a, d.labels, lazy, config).final_ari;
      const double wb = harness::simulate(b, d.labels, lazy, config).final_ari;
      if (strategy == harness::Strategy::kClassAnchors) {
        with.push_back(wa);
        without.push_back(wb);
      } else {
        bull_with.push_back(wa);
        bull_without.push_back(wb);
      }
    }
  }
  const double mw = median(with), mo = median(without);
  return {mw >= 0.6 && mo < mw, "class-anchors median ARI " + fmt(mw) + " with commit (need 0.6) vs " + fmt(mo) +
                                    " without; bullseye " + fmt(median(bull_with)) + " vs " + fmt(median(bull_without))};
}

Outcome protocol_conformance() {
  const std::string cmd =
      std::string("\"") + GOLDEN_REPLAY_EXE + "\" \"" + GOLDEN_DIR + "\" > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return {rc == 0, rc == 0 ? "all golden transcripts replay byte-compatibly (elapsed_ms masked)"
                           : "golden replay reported mismatches; run golden_replay for the diff"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mi-estimator-oracle", mi_oracle},
      {"invariance-suite", invariance},
      {"feature-ranking-oracle", ranking_oracle},
      {"refinement-monotonicity", refinement_monotonicity},
      {"guided-workflow", guided_workflow},
      {"commit-semantics", commit_semantics},
      {"lazy-user-leverage", lazy_user_leverage},
      {"protocol-conformance", protocol_conformance},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

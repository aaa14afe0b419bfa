// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mcsim/analytics.hpp"
#include "mcsim/engine.hpp"
#include "mcsim/error.hpp"
#include "mcsim/geometry.hpp"
#include "mcsim/metrics.hpp"
#include "oracles.hpp"

using namespace mcsim;
namespace fs = std::filesystem;

namespace {

constexpr double um = 1e-6;
constexpr std::int64_t kDeskMolecules = 100000;
constexpr std::int64_t kDeskRealizations = 20;

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> analytic_curve(const std::vector<double>& times, double a, double d, double D) {
  std::vector<double> out;
  for (double t : times) out.push_back(t > 0 ? hitting_fraction(a, d, D, t) : 0.0);
  return out;
}

BatchResult desk_run(const Scene& s, PolicyKind k, std::uint64_t seed, double xi = 0.0) {
  return run_batch(s, {k, xi}, seed, kDeskRealizations, workers());
}

// Binomial standard deviation of a pooled fraction near p.
double pooled_sigma(double p, std::int64_t trials) {
  return std::sqrt(std::max(p * (1 - p), 1e-300) / static_cast<double>(trials));
}

Outcome small_receiver_apmc() {
  Outcome o;
  const double a = 0.5 * um, d = 50 * um, D = 1e-9;
  const Scene s = single_receiver_scene(a, d, D, 0.1, 100, kDeskMolecules);
  const BatchResult b = desk_run(s, PolicyKind::Apmc, 101);
  const auto ref = analytic_curve(b.curve.times, a, d, D);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    worst = std::max(worst, std::fabs(b.curve.fractions[0][i] - ref[i]));
  const double r2 = r_squared(ref, b.curve.fractions[0]);
  o.require(worst <= 5e-4, "max |APMC - analytic| = " + fmt("%.3g", worst) + " (<= 5e-4)");
  o.require(r2 >= 0.99, "R2 = " + fmt("%.5f", r2) + " (>= 0.99)");
  return o;
}

Outcome small_step_ordering() {
  Outcome o;
  const double a = 20 * um, d = 50 * um, D = 1e-9;
  const Scene s = single_receiver_scene(a, d, D, 0.1, 100, kDeskMolecules);
  const BatchResult rmc = desk_run(s, PolicyKind::Rmc, 201);
  const BatchResult smc = desk_run(s, PolicyKind::Smc, 202);
  const BatchResult apmc = desk_run(s, PolicyKind::Apmc, 203);
  const auto ref = analytic_curve(rmc.curve.times, a, d, D);
  const double r2 = r_squared(ref, rmc.curve.fractions[0]);
  const std::int64_t trials = kDeskMolecules * kDeskRealizations;
  double smc_excess = -1.0, apmc_deficit = -1.0;  // in units of sigma
  for (std::size_t i = 1; i < ref.size(); ++i) {
    const double sigma = pooled_sigma(ref[i], trials);
    smc_excess = std::max(smc_excess, (smc.curve.fractions[0][i] - ref[i]) / sigma);
    apmc_deficit = std::max(apmc_deficit, (ref[i] - apmc.curve.fractions[0][i]) / sigma);
  }
  o.require(r2 >= 0.99, "RMC R2 = " + fmt("%.5f", r2) + " (>= 0.99)");
  o.require(smc_excess <= 3.0, "max (SMC - analytic)/sigma = " + fmt("%.2f", smc_excess) + " (<= 3)");
  o.require(apmc_deficit <= 3.0,
            "max (analytic - APMC)/sigma = " + fmt("%.2f", apmc_deficit) + " (<= 3)");
  return o;
}

Outcome large_step_separation() {
  Outcome o;
  const double a = 10 * um, d = 50 * um, D = 1e-9;
  const Scene s = single_receiver_scene(a, d, D, 5.0, 10, kDeskMolecules);
  const BatchResult apmc = desk_run(s, PolicyKind::Apmc, 301);
  const BatchResult rmc = desk_run(s, PolicyKind::Rmc, 302);
  const auto ref = analytic_curve(apmc.curve.times, a, d, D);
  double worst = 0.0, min_ratio = INFINITY;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    worst = std::max(worst, std::fabs(apmc.curve.fractions[0][i] - ref[i]));
    if (apmc.curve.times[i] >= 10.0 - 1e-9)
      min_ratio = std::min(min_ratio, rmc.curve.fractions[0][i] / apmc.curve.fractions[0][i]);
  }
  o.require(worst <= 0.01, "max |APMC - analytic| = " + fmt("%.4f", worst) + " (<= 0.01)");
  o.require(min_ratio >= 1.5, "min RMC/APMC for t >= 10 s = " + fmt("%.3f", min_ratio) + " (>= 1.5)");
  return o;
}

double one_step_r2(double a, double d, double D, double dt, std::uint64_t seed) {
  const AccuracyReport r = try_measure_one_step_accuracy({D, d, a, dt, kDeskMolecules},
                                                         {PolicyKind::Rmc, 0.0}, seed,
                                                         kDeskRealizations, workers());
  return r.r_squared;
}

Outcome kappa_invariance() {
  Outcome o;
  // D dt = 2000 um^2 for every split; kappa ~ 0.46, where R2 still varies quickly.
  const double splits[][2] = {{2e-9, 1.0}, {1e-9, 2.0}, {0.5e-9, 4.0}};
  double lo = INFINITY, hi = -INFINITY;
  std::string values;
  std::uint64_t seed = 401;
  for (const auto& sp : splits) {
    const double r2 = one_step_r2(20 * um, 40 * um, sp[0], sp[1], seed++);
    lo = std::min(lo, r2);
    hi = std::max(hi, r2);
    values += (values.empty() ? "" : "/") + fmt("%.4f", r2);
  }
  o.require(hi - lo < 0.02, "R2 over three splits " + values + ", spread " + fmt("%.4f", hi - lo) +
                                " (< 0.02)");
  return o;
}

// D dt from 200 to 3000 um^2. The third-order fit is scored in its clamped form,
// which is the form the fit comparison uses.
std::vector<double> dddt_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 15; ++k) g.push_back(200.0 * k * um * um);
  return g;
}

constexpr double kSplitD[] = {0.5e-9, 1e-9, 2e-9};

Outcome prediction_fidelity() {
  Outcome o;
  std::uint64_t seed = 501;
  const double rd = 50 * um;
  for (double a : {20 * um, 25 * um, 30 * um}) {
    double sum = 0.0;
    int n = 0;
    for (double p : dddt_grid())
      for (double D : kSplitD) {
        const double measured = one_step_r2(a, rd, D, p / D, seed++);
        sum += std::fabs(measured - predict_r2(kappa(a, rd, D, p / D), FitOrder::ClampedCubic));
        ++n;
      }
    const double mean = sum / n;
    o.require(mean < 0.06, "a=" + fmt("%.0f", a / um) + " um mean |diff| " + fmt("%.4f", mean) +
                               " (< 0.06)");
  }
  const double rd40 = 40 * um;
  for (double a : {15 * um, 20 * um}) {
    double se[3] = {0, 0, 0};
    int n = 0;
    for (double p : dddt_grid()) {
      const double measured = one_step_r2(a, rd40, 1e-9, p / 1e-9, seed++);
      const double k = kappa(a, rd40, 1e-9, p / 1e-9);
      const FitOrder orders[] = {FitOrder::Linear, FitOrder::Quadratic, FitOrder::ClampedCubic};
      for (int i = 0; i < 3; ++i) se[i] += std::pow(measured - predict_r2(k, orders[i]), 2);
      ++n;
    }
    double rm[3];
    for (int i = 0; i < 3; ++i) rm[i] = std::sqrt(se[i] / n);
    o.require(rm[2] < rm[0] && rm[2] < rm[1],
              "a=" + fmt("%.0f", a / um) + " um RMSE fit1/fit2/fit3 " + fmt("%.4f", rm[0]) + "/" +
                  fmt("%.4f", rm[1]) + "/" + fmt("%.4f", rm[2]));
  }
  return o;
}

Outcome polynomial_pins() {
  Outcome o;
  const double k = 0.3;
  const double cubic = (979 * k * k * k - 1523 * k * k + 813 * k - 51) / 100;
  const double c = predict_r2(0.3, FitOrder::Cubic);
  o.require(std::fabs(c - cubic) <= 1e-12 && std::fabs(c - 0.82263) <= 1e-12,
            "cubic(0.3) = " + fmt("%.15g", c));
  o.require(predict_r2(0.05, FitOrder::ClampedCubic) == 0.0, "clamp(0.05) = 0");
  o.require(predict_r2(0.7, FitOrder::ClampedCubic) == 1.0, "clamp(0.7) = 1");
  return o;
}

Outcome two_receiver_asymptote() {
  Outcome o;
  const double a = 40 * um, d = 100 * um, D = 1.05e-9, dt = 2.0;
  const SeriesResult v1 = two_rx_asymptote(a, d, 1e-12, 500);
  o.require(v1.converged, "series converged in " + std::to_string(v1.terms) + " terms");
  o.require(v1.value >= 0.2 && v1.value <= 0.4, "V1 = " + fmt("%.15f", v1.value) + " in [0.2, 0.4]");
  const SeriesResult far = two_rx_asymptote(1 * um, 1000 * um, 1e-12, 500);
  o.require(far.converged && std::fabs(far.value / 1e-3 - 1) < 1e-3,
            "d/a=1000 gives " + fmt("%.6e", far.value));

  // Independent cross-check of the series value by walk on spheres.
  oracle::WalkOnSpheres wos({{d, 0, 0}, {-d, 0, 0}}, a, 1e-3 * a, 7);
  const int walkers = 200000;
  int hits = 0;
  for (int i = 0; i < walkers; ++i) hits += wos.walk({0, 0, 0}) == 0;
  const double p = static_cast<double>(hits) / walkers;
  const double sigma = std::sqrt(p * (1 - p) / walkers);
  o.require(std::fabs(p - v1.value) < 4 * sigma + 2e-3,
            "walk-on-spheres " + fmt("%.4f", p) + " +- " + fmt("%.4f", sigma));

  // M = 5000 samples at reduced N (see decisions ledger for the sizing).
  const std::int64_t molecules = 10000, realizations = 2;
  const Scene s = symmetric_scene(2, a, d, D, dt, 5000, molecules);
  for (PolicyKind k : {PolicyKind::Apmc, PolicyKind::Rmc}) {
    const BatchResult b = run_batch(s, {k, 0.0}, 701, realizations, workers());
    const double f1 = b.curve.fractions[0].back(), f2 = b.curve.fractions[1].back();
    const std::string text = std::string(to_string(k)) + " per-receiver " + fmt("%.4f", f1) + "/" +
                             fmt("%.4f", f2) + " vs band [" + fmt("%.4f", v1.value - 0.02) + ", " +
                             fmt("%.4f", v1.value + 0.01) + "]";
    const bool in_band = [&] {
      for (double f : {f1, f2})
        if (f < v1.value - 0.02 || f > v1.value + 0.01) return false;
      return true;
    }();
    if (k == PolicyKind::Apmc)
      o.require(in_band, text);
    else
      o.detail += "; info: " + text;
  }
  return o;
}

struct SweepPoint {
  double xi, n_uniform, n_total, r2;
};

std::vector<SweepPoint> apmc_sweep(double a, const std::vector<double>& xis) {
  const double d = 50 * um, D = 1e-9;
  const Scene s = single_receiver_scene(a, d, D, 10.0, 10, kDeskMolecules);
  std::vector<SweepPoint> out;
  for (double xi : xis) {
    const BatchResult b = desk_run(s, PolicyKind::Apmc, 801, xi);
    const auto ref = analytic_curve(b.curve.times, a, d, D);
    out.push_back({xi, static_cast<double>(b.ledger.n_uniform), ledger_total(b.ledger),
                   r_squared(ref, b.curve.fractions[0])});
  }
  return out;
}

Outcome threshold_economics() {
  Outcome o;
  const std::vector<double> xis{0, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, 0.15};
  const auto p10 = apmc_sweep(10 * um, xis);
  bool monotone = true;
  for (std::size_t i = 1; i < p10.size(); ++i) monotone = monotone && p10[i].n_uniform <= p10[i - 1].n_uniform;
  o.require(monotone, "n_uniform nonincreasing over xi in [0, 0.15]");

  const auto best = std::min_element(p10.begin(), p10.end(), [](auto& l, auto& r) {
    return l.n_total < r.n_total;
  });
  const bool interior = best != p10.begin() && best != p10.end() - 1;
  o.require(interior, "min n_total at xi = " + fmt("%.3g", best->xi));

  double best_saving = 0.0, at = 0.0, drop_at = 0.0;
  for (const auto& p : p10) {
    const double saving = 1 - p.n_total / p10[0].n_total;
    const double drop = p10[0].r2 - p.r2;
    if (drop < 0.05 && saving > best_saving) {
      best_saving = saving;
      at = p.xi;
      drop_at = drop;
    }
  }
  o.require(best_saving >= 0.10, "n_total saving " + fmt("%.1f", 100 * best_saving) + "% at xi = " +
                                     fmt("%.3g", at) + " with R2 drop " + fmt("%.4f", drop_at));

  const std::vector<double> pair{0.0, 0.04};
  const auto q10 = std::vector<SweepPoint>{p10[0], p10[5]};
  const auto q20 = apmc_sweep(20 * um, pair);
  const double pen10 = q10[0].r2 - q10[1].r2, pen20 = q20[0].r2 - q20[1].r2;
  o.require(pen20 < pen10, "R2 penalty at xi = 0.04: a=20 um " + fmt("%.4f", pen20) + " vs a=10 um " +
                               fmt("%.4f", pen10));
  return o;
}

// Runs the CLI; returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(MCSIM_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string body_of(const fs::path& p) {
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism_and_conservation() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("mcsim_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({
  "scene": {"diffusion": "1e-9 m2/s", "time_step": "0.5 s", "samples": 20, "molecules": 5000,
            "layout": {"count": 2, "radius": "10 um", "distance": "30 um"}},
  "run": {"seed": 99, "realizations": 8}
})";
  bool same = true;
  for (const char* alg : {"smc", "rmc", "line", "apmc"}) {
    const std::string base = "simulate --config " + (dir / "cfg.json").string() + " --algorithm " + alg;
    const int s1 = run_cli(base + " --workers 1 --out " + (dir / "w1.csv").string());
    const int s8 = run_cli(base + " --workers 8 --out " + (dir / "w8.csv").string());
    same = same && s1 == 0 && s8 == 0 && !body_of(dir / "w1.csv").empty() &&
           body_of(dir / "w1.csv") == body_of(dir / "w8.csv");
  }
  fs::remove_all(dir);
  o.require(same, "CSV bodies identical for 1 and 8 workers (4 algorithms)");

  std::int64_t broken = 0, outside = 0, checked = 0;
  for (int count : {1, 2, 4})
    for (PolicyKind k : {PolicyKind::Smc, PolicyKind::Rmc, PolicyKind::LineCrossing, PolicyKind::Apmc}) {
      const Scene s = symmetric_scene(count, 10 * um, 30 * um, 1e-9, 2.0, 30, 5000);
      const BatchResult b = run_batch(s, {k, 0.0}, 900 + count, 4, workers());
      for (const auto& r : b.realizations) {
        outside += r.outside_violations;
        std::int64_t absorbed = 0;
        for (std::size_t i = 0; i < r.free_count.size(); ++i) {
          for (const auto& row : r.histogram.new_absorbed) absorbed += row[i];
          broken += absorbed + r.free_count[i] != s.molecules;
          ++checked;
        }
      }
    }
  o.require(broken == 0, "absorbed + free = N at " + std::to_string(checked) + " samples");
  o.require(outside == 0, "free molecules inside a receiver: " + std::to_string(outside));
  return o;
}

Outcome geometry_oracle() {
  Outcome o;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int disagreements = 0, hits = 0;
  for (int i = 0; i < 10000; ++i) {
    const SphereReceiver rx{1, {20 * um * u(rng), 20 * um * u(rng), 20 * um * u(rng)},
                            (2.0 + 18.0 * std::fabs(u(rng))) * um};
    const Vector3 p0{30 * um * u(rng), 30 * um * u(rng), 30 * um * u(rng)};
    const Vector3 p1{30 * um * u(rng), 30 * um * u(rng), 30 * um * u(rng)};
    const bool exact = segment_intersects_sphere(p0, p1, rx);
    hits += exact;
    disagreements += exact != oracle::segment_hits_ball_sampled({p0.x, p0.y, p0.z}, {p1.x, p1.y, p1.z},
                                                                {rx.center.x, rx.center.y, rx.center.z},
                                                                rx.radius);
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements in 10000 (" +
                                    std::to_string(hits) + " hits)");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, small_receiver_apmc},   {2, small_step_ordering},   {3, large_step_separation},
      {4, kappa_invariance},      {5, prediction_fidelity},   {6, polynomial_pins},
      {7, two_receiver_asymptote}, {8, threshold_economics}, {9, determinism_and_conservation},
      {10, geometry_oracle}};
  int failed = 0, ran = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("criterion %2d: %s  %s  (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}

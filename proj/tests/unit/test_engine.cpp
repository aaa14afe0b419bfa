#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcsim/analytics.hpp"
#include "mcsim/engine.hpp"
#include "mcsim/error.hpp"

using namespace mcsim;

namespace {

constexpr double um = 1e-6;
const PolicyKind kAll[] = {PolicyKind::Smc, PolicyKind::Rmc, PolicyKind::LineCrossing,
                           PolicyKind::Apmc};

bool rejects(const Scene& s) {
  try {
    s.validate();
  } catch (const Error& e) {
    return e.code() == ErrorCode::InvalidArgument;
  }
  return false;
}

}  // namespace

TEST_CASE("scene validation") {
  Scene ok = single_receiver_scene(10 * um, 50 * um, 1e-9, 0.1, 10, 100);
  CHECK_NOTHROW(ok.validate());

  Scene s = ok;
  s.samples = 1;
  CHECK(rejects(s));
  s = ok;
  s.molecules = 0;
  CHECK(rejects(s));
  s = ok;
  s.diffusion = 0;
  CHECK(rejects(s));
  s = ok;
  s.transmitter = {45 * um, 0, 0};
  CHECK(rejects(s));
  s = ok;
  s.transmitter = {40 * um, 0, 0};  // on the surface
  CHECK(rejects(s));
  s = ok;
  s.receivers.push_back({2, {65 * um, 0, 0}, 6 * um});  // overlaps
  CHECK(rejects(s));
  s = ok;
  s.receivers.push_back({1, {-50 * um, 0, 0}, 6 * um});  // duplicate id
  CHECK(rejects(s));
  CHECK_NOTHROW(symmetric_scene(4, 10 * um, 50 * um, 1e-9, 0.1, 10, 100).validate());
  CHECK_THROWS_AS(symmetric_scene(3, 10 * um, 50 * um, 1e-9, 0.1, 10, 100), Error);
}

TEST_CASE("a vanishing receiver absorbs nothing except through the planar approximation") {
  const Scene s = single_receiver_scene(1e-15, 50 * um, 1e-9, 0.1, 20, 2000);
  for (auto k : {PolicyKind::Smc, PolicyKind::LineCrossing, PolicyKind::Apmc}) {
    const RealizationResult r = run_realization(s, {k, 0.0}, 1, 0);
    CHECK(r.histogram.total() == 0);
    CHECK(r.free_count.back() == 2000);
  }
  // The wall model does not shrink with the sphere: a start and end both within
  // about sqrt(D dt) of the center still give exp(-l_i l_f / (D dt)) of order one.
  const RealizationResult r = run_realization(s, {PolicyKind::Rmc, 0.0}, 1, 0);
  CHECK(r.histogram.total() < 100);
}

TEST_CASE("APMC absorbs a molecule released just outside the surface in step one") {
  const double a = 10 * um;
  const Scene s = single_receiver_scene(a, a * (1 + 1e-9), 1e-9, 0.1, 3, 1000);
  const RealizationResult r = run_realization(s, {PolicyKind::Apmc, 0.0}, 9, 0);
  CHECK(r.histogram.new_absorbed[0][1] == 1000);
}

TEST_CASE("conservation, containment and curve shape for every policy and layout") {
  for (int count : {1, 2, 4})
    for (auto k : kAll) {
      CAPTURE(count);
      CAPTURE(to_string(k));
      const Scene s = symmetric_scene(count, 10 * um, 30 * um, 1e-9, 0.5, 12, 3000);
      const BatchResult b = run_batch(s, {k, 0.0}, 77, 3, 2);
      for (const auto& r : b.realizations) {
        CHECK(r.outside_violations == 0);
        std::int64_t absorbed = 0;
        for (std::size_t i = 0; i < r.free_count.size(); ++i) {
          for (const auto& row : r.histogram.new_absorbed) absorbed += row[i];
          REQUIRE(absorbed + r.free_count[i] == s.molecules);
        }
        for (const auto& row : r.histogram.new_absorbed) CHECK(row[0] == 0);
      }
      const auto& f = b.curve.fractions;
      for (std::size_t i = 0; i < b.curve.times.size(); ++i) {
        double sum = 0.0;
        for (const auto& row : f) {
          REQUIRE(row[i] >= 0.0);
          REQUIRE(row[i] <= 1.0);
          if (i > 0) REQUIRE(row[i] >= row[i - 1]);
          sum += row[i];
        }
        REQUIRE(sum <= 1.0 + 1e-12);
      }
      for (const auto& row : f) CHECK(row[0] == 0.0);
      CHECK(b.curve.times[3] == doctest::Approx(1.5));
    }
}

TEST_CASE("one realization gives cumulative counts over N") {
  const Scene s = single_receiver_scene(10 * um, 30 * um, 1e-9, 0.5, 8, 5000);
  const BatchResult b = run_batch(s, {PolicyKind::Rmc, 0.0}, 4, 1);
  const RealizationResult r = run_realization(s, {PolicyKind::Rmc, 0.0}, 4, 0);
  std::int64_t cum = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    cum += r.histogram.new_absorbed[0][i];
    CHECK(b.curve.fractions[0][i] == static_cast<double>(cum) / 5000.0);
  }
}

TEST_CASE("batches are deterministic and independent of worker count") {
  const Scene s = symmetric_scene(2, 10 * um, 30 * um, 1e-9, 0.5, 10, 2000);
  for (auto k : kAll) {
    const BatchResult a = run_batch(s, {k, 0.0}, 123, 6, 1);
    const BatchResult b = run_batch(s, {k, 0.0}, 123, 6, 1);
    const BatchResult c = run_batch(s, {k, 0.0}, 123, 6, 4);
    CHECK(a.curve.fractions == b.curve.fractions);
    CHECK(a.curve.fractions == c.curve.fractions);
    CHECK(a.mean_new_absorbed == c.mean_new_absorbed);
    CHECK(a.ledger == c.ledger);
    const BatchResult other = run_batch(s, {k, 0.0}, 124, 6, 4);
    CHECK(other.curve.fractions != a.curve.fractions);
  }
}

TEST_CASE("Gaussian accounting: three per diffusion move") {
  const Scene s = single_receiver_scene(10 * um, 30 * um, 1e-9, 0.5, 10, 2000);
  for (auto k : {PolicyKind::Smc, PolicyKind::LineCrossing, PolicyKind::Rmc}) {
    const RealizationResult r = run_realization(s, {k, 0.0}, 8, 0);
    std::uint64_t moves = 0;
    for (std::size_t i = 0; i + 1 < r.free_count.size(); ++i) moves += r.free_count[i];
    CHECK(r.ledger.n_gaussian == 3 * moves);
    if (k != PolicyKind::Rmc) CHECK(r.ledger.n_uniform == 0);
  }
  // APMC moves only molecules that survive the a priori test, plus re-propagations.
  const RealizationResult r = run_realization(s, {PolicyKind::Apmc, 0.0}, 8, 0);
  std::uint64_t moves = 0, tests = 0;
  for (std::size_t i = 1; i < r.free_count.size(); ++i) {
    moves += r.free_count[i];
    tests += r.free_count[i - 1];
  }
  CHECK(r.ledger.n_gaussian == 3 * (moves + r.apmc_reverts));
  CHECK(r.ledger.n_uniform == tests);
}

TEST_CASE("RMC tracks the analytic curve at small steps") {
  const Scene s = single_receiver_scene(20 * um, 50 * um, 1e-9, 0.1, 30, 20000);
  const BatchResult b = run_batch(s, {PolicyKind::Rmc, 0.0}, 5, 4, 4);
  for (std::size_t i = 1; i < 30; ++i) {
    const double ref = hitting_fraction(20 * um, 50 * um, 1e-9, b.curve.times[i]);
    CHECK(std::fabs(b.curve.fractions[0][i] - ref) < 0.01);
  }
}

TEST_CASE("run_batch rejects an invalid scene") {
  Scene s = single_receiver_scene(10 * um, 30 * um, 1e-9, 0.5, 10, 10);
  s.transmitter = {25 * um, 0, 0};
  try {
    run_batch(s, {PolicyKind::Rmc, 0.0}, 1, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

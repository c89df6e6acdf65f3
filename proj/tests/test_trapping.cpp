#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavityfock/measurement.hpp"
#include "cavityfock/trapping.hpp"

using namespace cavityfock;

TEST_CASE("eta for a trapping state") {
  CHECK(eta_for_trap(35, 6) == 1.0);
  CHECK(eta_for_trap(48, 7) == 1.0);
  CHECK(eta_for_trap(63, 8) == 1.0);
  CHECK(eta_for_trap(0, 1) == 1.0);
  CHECK(eta_for_trap(10, 1) == doctest::Approx(0.30151134457776362).epsilon(1e-15));
  CHECK_THROWS_AS(eta_for_trap(3, 0), std::invalid_argument);
}

TEST_CASE("trapping states for a given eta") {
  const auto traps = trap_states(1.0, 100);
  const std::vector<std::size_t> expected{0, 3, 8, 15, 24, 35, 48, 63, 80, 99};
  REQUIRE(traps.size() == expected.size());
  for (std::size_t i = 0; i < traps.size(); ++i) {
    CHECK(traps[i].n_prime == expected[i]);
    CHECK(traps[i].q == i + 1);
  }
  const auto half = trap_states(0.5, 20);
  REQUIRE(half.size() == 2);
  CHECK(half[0] == TrappingState{3, 1});
  CHECK(half[1] == TrappingState{15, 2});
  CHECK(trap_states(std::numbers::pi / 7, 50).empty());
  CHECK_THROWS_AS(trap_states(0.0, 10), std::invalid_argument);
}

TEST_CASE("property: eta_for_trap and trap_states are inverse") {
  for (std::size_t n = 0; n <= 60; ++n) {
    for (std::size_t q = 1; q <= 9; ++q) {
      const auto traps = trap_states(eta_for_trap(n, q), n);
      REQUIRE(!traps.empty());
      CHECK(traps.back() == TrappingState{n, q});
      // q - 1 trapping states below n whenever the eta is (q / sqrt(n+1)).
      CHECK(traps.size() <= q);
    }
  }
}

TEST_CASE("block boundaries") {
  const auto blocks = block_boundaries(1.0, 10);
  const std::vector<Block> expected{{0, 0}, {1, 3}, {4, 8}, {9, 10}};
  CHECK(blocks == expected);
  CHECK(block_boundaries(std::numbers::pi / 7, 12) == std::vector<Block>{{0, 12}});
  CHECK(block_boundaries(1.0, 8).back() == Block{4, 8});
}

TEST_CASE("blocks conserve mass and trapping states only gain population") {
  const auto d0 = make_distribution({CoherentState{20.0}});
  for (double eta : {1.0, 0.5, eta_for_trap(10, 1)}) {
    const auto f = resonant_filter(eta, d0.nmax() + 400);
    const auto blocks = block_boundaries(eta, d0.nmax() + 300);
    const auto traps = trap_states(eta, d0.nmax() + 300);
    auto d = d0;
    auto masses = block_masses(d, blocks);
    for (int m = 0; m < 300; ++m) {
      const auto next = ensemble_step(d, f, AtomCase::a);
      const auto next_masses = block_masses(next, blocks);
      for (std::size_t b = 0; b < blocks.size(); ++b) CHECK(std::abs(next_masses[b] - masses[b]) <= 1e-12);
      for (const auto& t : traps) CHECK(next[t.n_prime] >= d[t.n_prime]);
      d = next;
      masses = next_masses;
    }
  }
}

TEST_CASE("schedules") {
  const auto fixed = make_schedule_fixed(10, 1, 3);
  REQUIRE(fixed.etas.size() == 3);
  for (double e : fixed.etas) CHECK(e == doctest::Approx(0.30151134457776362).epsilon(1e-15));
  CHECK(make_schedule_fixed(0, 1, 1).etas == std::vector<double>{1.0});
  CHECK(make_schedule_fixed(35, 6, 2).etas == std::vector<double>{1.0, 1.0});

  const auto inc = make_schedule_incrementing(10, 1, 3);
  CHECK(inc.etas[0] == doctest::Approx(1 / std::sqrt(11.0)));
  CHECK(inc.etas[1] == doctest::Approx(2 / std::sqrt(11.0)));
  CHECK(inc.etas[2] == doctest::Approx(3 / std::sqrt(11.0)));
  CHECK(make_schedule_incrementing(7, 2, 1).etas == make_schedule_fixed(7, 2, 1).etas);
  for (std::size_t j = 1; j < 30; ++j) {
    const auto s = make_schedule_incrementing(10, 2, 30);
    CHECK(s.etas[j] > s.etas[j - 1]);
    // Every atom still traps n' = 10, with index q_start + j.
    const auto traps = trap_states(s.etas[j], 10);
    REQUIRE(!traps.empty());
    CHECK(traps.back() == TrappingState{10, 2 + j});
  }
  CHECK_THROWS_AS(make_schedule_incrementing(10, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS((Schedule{{1.0, -0.5}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((NoiseModel{1.0, 0}.validate()), std::invalid_argument);
}

TEST_CASE("noiseless schedule runs") {
  const auto d0 = make_distribution({CoherentState{4.0}});
  const auto fixed = run_schedule(d0, make_schedule_fixed(10, 1, 150), AtomCase::a, {}, 10, 200);
  CHECK(fixed.realizations == 1);
  REQUIRE(fixed.mean.size() == 151);
  CHECK(fixed.mean[0] == doctest::Approx(d0[10]));
  for (std::size_t m = 1; m < fixed.mean.size(); ++m) CHECK(fixed.mean[m] >= fixed.mean[m - 1]);
  for (double s : fixed.stddev) CHECK(s == 0.0);

  const auto inc = run_schedule(d0, make_schedule_incrementing(10, 1, 150), AtomCase::a, {}, 10, 1);
  for (double threshold : {0.5, 0.8, 0.9}) {
    const auto a = first_reaching(fixed.mean, threshold);
    const auto b = first_reaching(inc.mean, threshold);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*b < *a);
  }

  // Same as iterating the step by hand.
  auto d = d0;
  const auto schedule = make_schedule_incrementing(10, 1, 20);
  for (double eta : schedule.etas) d = ensemble_step(d, resonant_filter(eta, d.nmax() + 1), AtomCase::a);
  const auto direct = run_schedule(d0, schedule, AtomCase::a, {}, 10, 1);
  CHECK(direct.mean.back() == d[10]);
}

TEST_CASE("noisy schedule runs: reproducible, thread-independent, degraded") {
  const auto d0 = make_distribution({CoherentState{4.0}});
  const auto schedule = make_schedule_incrementing(10, 1, 25);
  const NoiseModel noise{0.02, 7};
  const auto serial = run_schedule(d0, schedule, AtomCase::a, noise, 10, 40, Execution::serial);
  const auto parallel = run_schedule(d0, schedule, AtomCase::a, noise, 10, 40, Execution::parallel);
  CHECK(serial.mean == parallel.mean);
  CHECK(serial.stddev == parallel.stddev);
  CHECK(serial.realizations == 40);

  const auto clean = run_schedule(d0, schedule, AtomCase::a, {}, 10, 1);
  CHECK(serial.mean.back() < clean.mean.back());
  CHECK(serial.stddev.back() > 0.0);

  const auto reseeded = run_schedule(d0, schedule, AtomCase::a, NoiseModel{0.02, 8}, 10, 40);
  CHECK(reseeded.mean != serial.mean);
}

TEST_CASE("first_reaching") {
  const std::vector<double> s{0.1, 0.5, 0.95, 0.99};
  CHECK(first_reaching(s, 0.9) == 2u);
  CHECK(first_reaching(s, 0.1) == 0u);
  CHECK(!first_reaching(s, 0.999).has_value());
}

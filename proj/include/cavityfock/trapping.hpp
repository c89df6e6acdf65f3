#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cavityfock/dynamics.hpp"
#include "cavityfock/execution.hpp"
#include "cavityfock/fockspace.hpp"

namespace cavityfock {

// Fock state n_prime in which a resonant atom performs exactly q Rabi
// cycles: sqrt(n_prime + 1) * eta = q.
struct TrappingState {
  std::size_t n_prime = 0;
  std::size_t q = 1;

  bool operator==(const TrappingState&) const = default;
};

// Closed range of photon numbers [first, last].
struct Block {
  std::size_t first = 0;
  std::size_t last = 0;

  bool operator==(const Block&) const = default;
};

// One coupling strength eta = g0 T per atom, i.e. one atomic velocity each.
struct Schedule {
  std::vector<double> etas;

  // Throws std::invalid_argument unless every eta is finite and > 0.
  void validate() const;
};

// Gaussian relative error on each atom's interaction time (and so on eta).
struct NoiseModel {
  double relative_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

double eta_for_trap(std::size_t n_prime, std::size_t q);

// All trapping states with n_prime <= nmax for this eta, sorted by n_prime.
std::vector<TrappingState> trap_states(double eta, std::size_t nmax);

// Blocks closed above by each trapping state, plus a final open block if the
// last trap is below nmax. Case a populations never cross a block boundary.
std::vector<Block> block_boundaries(double eta, std::size_t nmax);

// Probability mass inside each block (entries past d.nmax() count as 0).
std::vector<double> block_masses(const PhotonDistribution& d, std::span<const Block> blocks);

Schedule make_schedule_fixed(std::size_t n_prime, std::size_t q, std::size_t m);

// Atom j (1-based) traps n_prime with index q_start + j - 1.
Schedule make_schedule_incrementing(std::size_t n_prime, std::size_t q_start, std::size_t m);

struct ScheduleRun {
  std::vector<double> mean;    // mean P_m(target_n) over realizations, m = 0..atoms
  std::vector<double> stddev;  // sample standard deviation (0 for one realization)
  std::size_t realizations = 1;
  std::size_t resampled = 0;   // noise draws with eta' <= 0 that were redrawn
};

// Nonselective resonant evolution along a schedule. Atom j in realization r
// uses eta_j (1 + eps), eps ~ N(0, sigma) drawn from stream (seed, r).
// Noiseless runs are deterministic and use a single realization.
ScheduleRun run_schedule(const PhotonDistribution& d0, const Schedule& schedule, AtomCase atom_case,
                         const NoiseModel& noise, std::size_t target_n, std::size_t realizations,
                         Execution exec = Execution::parallel);

// First m with series[m] >= threshold.
std::optional<std::size_t> first_reaching(std::span<const double> series, double threshold);

}  // namespace cavityfock

#include "cavityfock/trapping.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "cavityfock/filters.hpp"
#include "cavityfock/measurement.hpp"
#include "parallel.hpp"

namespace cavityfock {

void Schedule::validate() const {
  for (std::size_t j = 0; j < etas.size(); ++j) {
    if (!std::isfinite(etas[j]) || !(etas[j] > 0.0))
      throw std::invalid_argument(fmt::format("schedule eta[{}] = {} must be > 0", j, etas[j]));
  }
}

void NoiseModel::validate() const {
  if (!(relative_sigma >= 0.0 && relative_sigma < 1.0))
    throw std::invalid_argument(fmt::format("relative_sigma = {} must lie in [0, 1)", relative_sigma));
}

double eta_for_trap(std::size_t n_prime, std::size_t q) {
  if (q < 1) throw std::invalid_argument("trapping index q must be >= 1");
  return static_cast<double>(q) / std::sqrt(static_cast<double>(n_prime) + 1.0);
}

std::vector<TrappingState> trap_states(double eta, std::size_t nmax) {
  if (!std::isfinite(eta) || !(eta > 0.0)) throw std::invalid_argument(fmt::format("eta = {} must be > 0", eta));
  std::vector<TrappingState> traps;
  const double limit = static_cast<double>(nmax) + 1.0;
  for (std::size_t q = 1;; ++q) {
    const double ratio = static_cast<double>(q) / eta;
    const double photons_plus_one = ratio * ratio;
    if (photons_plus_one > limit + 0.5) break;
    const double nearest = std::round(photons_plus_one);
    if (nearest >= 1.0 && nearest <= limit &&
        std::abs(photons_plus_one - nearest) <= 1e-9 * std::max(1.0, nearest))
      traps.push_back({static_cast<std::size_t>(nearest) - 1, q});
  }
  return traps;
}

std::vector<Block> block_boundaries(double eta, std::size_t nmax) {
  std::vector<Block> blocks;
  std::size_t first = 0;
  for (const TrappingState& trap : trap_states(eta, nmax)) {
    blocks.push_back({first, trap.n_prime});
    first = trap.n_prime + 1;
  }
  if (first <= nmax) blocks.push_back({first, nmax});
  return blocks;
}

std::vector<double> block_masses(const PhotonDistribution& d, std::span<const Block> blocks) {
  std::vector<double> masses;
  masses.reserve(blocks.size());
  for (const Block& b : blocks) {
    double sum = 0.0;
    for (std::size_t n = b.first; n <= b.last; ++n) sum += d[n];
    masses.push_back(sum);
  }
  return masses;
}

Schedule make_schedule_fixed(std::size_t n_prime, std::size_t q, std::size_t m) {
  return Schedule{std::vector<double>(m, eta_for_trap(n_prime, q))};
}

Schedule make_schedule_incrementing(std::size_t n_prime, std::size_t q_start, std::size_t m) {
  if (q_start < 1) throw std::invalid_argument("q_start must be >= 1");
  Schedule schedule;
  schedule.etas.reserve(m);
  for (std::size_t j = 0; j < m; ++j) schedule.etas.push_back(eta_for_trap(n_prime, q_start + j));
  return schedule;
}

ScheduleRun run_schedule(const PhotonDistribution& d0, const Schedule& schedule, AtomCase atom_case,
                         const NoiseModel& noise, std::size_t target_n, std::size_t realizations, Execution exec) {
  schedule.validate();
  noise.validate();
  if (realizations < 1) throw std::invalid_argument("run_schedule needs at least one realization");
  if (noise.relative_sigma == 0.0) realizations = 1;

  const std::size_t atoms = schedule.etas.size();
  std::vector<std::vector<double>> series(realizations);
  std::vector<std::size_t> redraws(realizations, 0);

  detail::for_each_index(static_cast<long>(realizations), exec, [&](long r) {
    const auto slot = static_cast<std::size_t>(r);
    std::mt19937_64 engine = make_stream_engine(noise.seed, slot);
    std::normal_distribution<double> gaussian(0.0, noise.relative_sigma);
    std::vector<double>& out = series[slot];
    out.reserve(atoms + 1);
    PhotonDistribution d = d0;
    out.push_back(d[target_n]);
    for (const double eta : schedule.etas) {
      double effective = eta;
      if (noise.relative_sigma > 0.0) {
        effective = eta * (1.0 + gaussian(engine));
        while (!(effective > 0.0)) {
          ++redraws[slot];
          effective = eta * (1.0 + gaussian(engine));
        }
      }
      d = ensemble_step(d, resonant_filter(effective, d.nmax() + 1), atom_case);
      out.push_back(d[target_n]);
    }
  });

  ScheduleRun run;
  run.realizations = realizations;
  for (std::size_t count : redraws) run.resampled += count;
  run.mean.resize(atoms + 1);
  run.stddev.resize(atoms + 1);
  const double count = static_cast<double>(realizations);
  for (std::size_t m = 0; m <= atoms; ++m) {
    // Neumaier summation in realization order.
    double sum = 0.0;
    double compensation = 0.0;
    for (const auto& s : series) {
      const double value = s[m];
      const double t = sum + value;
      compensation += std::abs(sum) >= std::abs(value) ? (sum - t) + value : (value - t) + sum;
      sum = t;
    }
    const double mean = (sum + compensation) / count;
    double squares = 0.0;
    for (const auto& s : series) squares += (s[m] - mean) * (s[m] - mean);
    run.mean[m] = mean;
    run.stddev[m] = realizations > 1 ? std::sqrt(squares / (count - 1.0)) : 0.0;
  }
  return run;
}

std::optional<std::size_t> first_reaching(std::span<const double> series, double threshold) {
  const auto it = std::find_if(series.begin(), series.end(), [threshold](double p) { return p >= threshold; });
  if (it == series.end()) return std::nullopt;
  return static_cast<std::size_t>(it - series.begin());
}

}  // namespace cavityfock

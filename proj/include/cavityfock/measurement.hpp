#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cavityfock/dynamics.hpp"
#include "cavityfock/execution.hpp"
#include "cavityfock/filters.hpp"
#include "cavityfock/fockspace.hpp"

namespace cavityfock {

// One recorded atom: its entry level and the flip indicator k, where
// k = +1 for |-> -> |+>, k = -1 for |+> -> |->, k = 0 for no flip.
struct Outcome {
  AtomCase atom_case = AtomCase::a;
  int k = 0;

  bool operator==(const Outcome&) const = default;
};

// Case a admits k in {0, -1}; case b admits k in {0, +1}.
bool admissible(const Outcome& outcome);

class OutcomeSequence {
 public:
  OutcomeSequence() = default;
  // Throws std::invalid_argument for an inadmissible entry.
  explicit OutcomeSequence(std::vector<Outcome> entries);

  std::span<const Outcome> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const Outcome& operator[](std::size_t j) const { return entries_[j]; }

  // nu = sum of k_j; the final field is the initial one shifted by -nu.
  int nu() const;

  bool operator==(const OutcomeSequence&) const = default;

 private:
  std::vector<Outcome> entries_;
};

struct Trajectory {
  OutcomeSequence sequence;
  double probability = 1.0;
  PhotonDistribution final;
};

struct DetectionProbabilities {
  double p_plus_out = 0.0;
  double p_minus_out = 0.0;
};

class ImpossibleOutcomeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Probability of finding the atom in |+> or |-> after the cavity.
// Distribution index n sits in manifold n + 1 for case a and in manifold n
// for case b. Throws std::out_of_range if the filter is too short.
DetectionProbabilities detection_probability(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case);

struct SelectiveResult {
  PhotonDistribution next;
  double probability = 0.0;
};

// Conditional field after one recorded atom. The update rules are
//   case a, k =  0:  next[n] ~ p_plus(n + 1) d[n]
//   case a, k = -1:  next[n] ~ p_minus(n) d[n - 1]     (one photon more)
//   case b, k =  0:  next[n] ~ p_plus(n) d[n]
//   case b, k = +1:  next[n] ~ p_minus(n + 1) d[n + 1] (one photon less)
// and `probability` is the mass before normalization. Throws
// ImpossibleOutcomeError when that mass is below 1e-300.
SelectiveResult apply_selective(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case, int k);

// Probability of recording `k` starting from d0. `filters` holds one table
// per atom, or a single table shared by all atoms. Impossible sequences give 0.
double sequence_probability(const PhotonDistribution& d0, std::span<const FilterTable> filters,
                            const OutcomeSequence& k);

// Monte Carlo realizations of the recorded process. Trajectory i draws from
// its own stream (seed, i), so results do not depend on the thread count.
// `filters` and `cases` have length m or 1.
std::vector<Trajectory> sample_trajectories(const PhotonDistribution& d0, std::span<const FilterTable> filters,
                                            std::span<const AtomCase> cases, std::size_t m, std::size_t count,
                                            std::uint64_t seed, Execution exec = Execution::parallel);

// Every outcome sequence with nonzero probability, in lexicographic order of
// (no flip < flip) per atom. Refuses m > kMaxEnumeratedAtoms.
std::vector<Trajectory> enumerate_trajectories(const PhotonDistribution& d0, std::span<const FilterTable> filters,
                                               std::span<const AtomCase> cases, std::size_t m);

// Unrecorded atom: the diagonal of the reduced field density matrix.
//   case a: P'(n) = p_plus(n + 1) P(n) + p_minus(n) P(n - 1)
//   case b: P'(n) = p_plus(n) P(n) + p_minus(n + 1) P(n + 1)
// Case a grows nmax by one only when the new top entry receives mass.
PhotonDistribution ensemble_step(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case);

// [d0, step(d0), ..., step^m(d0)].
std::vector<PhotonDistribution> ensemble_run(const PhotonDistribution& d0, const FilterTable& f, AtomCase atom_case,
                                             std::size_t m);

inline constexpr std::size_t kMaxEnumeratedAtoms = 20;

// Ensemble as the probability-weighted sum of the conditional fields of all
// 2^m recorded outcome sequences. Independent of ensemble_step; used as its
// oracle. Refuses m > kMaxEnumeratedAtoms.
PhotonDistribution brute_force_ensemble(const PhotonDistribution& d0, const FilterTable& f, AtomCase atom_case,
                                        std::size_t m, Execution exec = Execution::parallel);

// C(m, n) kappa^(m - n) (1 - kappa)^n over n = 0..m; log-space for m > 60.
PhotonDistribution binomial_closed_form(Kappa kappa, std::size_t m);

}  // namespace cavityfock

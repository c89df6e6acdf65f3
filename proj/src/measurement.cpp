#include "cavityfock/measurement.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "parallel.hpp"

namespace cavityfock {

bool admissible(const Outcome& outcome) {
  if (outcome.k == 0) return true;
  return outcome.atom_case == AtomCase::a ? outcome.k == -1 : outcome.k == +1;
}

OutcomeSequence::OutcomeSequence(std::vector<Outcome> entries) : entries_(std::move(entries)) {
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    if (!admissible(entries_[j]))
      throw std::invalid_argument(fmt::format("outcome {} has k = {}, not admissible for case {}", j, entries_[j].k,
                                              entries_[j].atom_case == AtomCase::a ? "a" : "b"));
  }
}

int OutcomeSequence::nu() const {
  return std::accumulate(entries_.begin(), entries_.end(), 0, [](int acc, const Outcome& o) { return acc + o.k; });
}

namespace {

constexpr double kImpossibleMass = 1e-300;

int flip_of(AtomCase atom_case) { return atom_case == AtomCase::a ? -1 : +1; }

void require_coverage(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case) {
  const std::size_t needed = atom_case == AtomCase::a ? d.nmax() + 1 : d.nmax();
  if (f.nmax() < needed)
    throw std::out_of_range(fmt::format("filter covers manifolds up to {}, field with nmax = {} needs {}", f.nmax(),
                                        d.nmax(), needed));
}

// Unnormalized conditional field for one recorded outcome.
std::vector<double> filtered(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case, int k) {
  require_coverage(d, f, atom_case);
  const std::size_t size = d.size();
  if (atom_case == AtomCase::a && k == 0) {
    std::vector<double> out(size);
    for (std::size_t n = 0; n < size; ++n) out[n] = f.p_plus(n + 1) * d[n];
    return out;
  }
  if (atom_case == AtomCase::a && k == -1) {
    std::vector<double> out(size + 1, 0.0);
    for (std::size_t n = 1; n <= size; ++n) out[n] = f.p_minus(n) * d[n - 1];
    return out;
  }
  if (atom_case == AtomCase::b && k == 0) {
    std::vector<double> out(size);
    for (std::size_t n = 0; n < size; ++n) out[n] = f.p_plus(n) * d[n];
    return out;
  }
  if (atom_case == AtomCase::b && k == +1) {
    std::vector<double> out(size, 0.0);
    for (std::size_t n = 0; n + 1 < size; ++n) out[n] = f.p_minus(n + 1) * d[n + 1];
    return out;
  }
  throw std::invalid_argument(
      fmt::format("k = {} is not admissible for case {}", k, atom_case == AtomCase::a ? "a" : "b"));
}

std::optional<SelectiveResult> try_selective(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case,
                                             int k) {
  std::vector<double> out = filtered(d, f, atom_case, k);
  const double mass = std::accumulate(out.begin(), out.end(), 0.0);
  if (!(mass >= kImpossibleMass)) return std::nullopt;
  for (double& p : out) p /= mass;
  return SelectiveResult{PhotonDistribution(std::move(out)), mass};
}

template <class T>
const T& per_atom(std::span<const T> items, std::size_t j, const char* what) {
  if (items.size() == 1) return items[0];
  if (j >= items.size())
    throw std::invalid_argument(fmt::format("{} list has {} entries, atom {} requested", what, items.size(), j));
  return items[j];
}

void check_lengths(std::size_t filters, std::size_t cases, std::size_t m) {
  if (filters != 1 && filters != m)
    throw std::invalid_argument(fmt::format("need 1 or {} filter tables, got {}", m, filters));
  if (cases != 1 && cases != m) throw std::invalid_argument(fmt::format("need 1 or {} atom cases, got {}", m, cases));
}

void accumulate_into(std::vector<double>& acc, const PhotonDistribution& d, double weight) {
  if (acc.size() < d.size()) acc.resize(d.size(), 0.0);
  for (std::size_t n = 0; n < d.size(); ++n) acc[n] += weight * d[n];
}

// Depth-first sum of probability-weighted conditional fields below one node.
void accumulate_branches(const PhotonDistribution& d, double probability, std::size_t depth, std::size_t m,
                         const FilterTable& f, AtomCase atom_case, std::vector<double>& acc) {
  if (depth == m) {
    accumulate_into(acc, d, probability);
    return;
  }
  for (const int k : {0, flip_of(atom_case)}) {
    if (auto step = try_selective(d, f, atom_case, k))
      accumulate_branches(step->next, probability * step->probability, depth + 1, m, f, atom_case, acc);
  }
}

void collect_branches(const Trajectory& node, std::size_t depth, std::size_t m, std::span<const FilterTable> filters,
                      std::span<const AtomCase> cases, std::vector<Trajectory>& out) {
  if (depth == m) {
    out.push_back(node);
    return;
  }
  const AtomCase atom_case = per_atom(cases, depth, "atom case");
  const FilterTable& f = per_atom(filters, depth, "filter");
  for (const int k : {0, flip_of(atom_case)}) {
    if (auto step = try_selective(node.final, f, atom_case, k)) {
      std::vector<Outcome> entries(node.sequence.entries().begin(), node.sequence.entries().end());
      entries.push_back({atom_case, k});
      collect_branches(Trajectory{OutcomeSequence(std::move(entries)), node.probability * step->probability,
                                  std::move(step->next)},
                       depth + 1, m, filters, cases, out);
    }
  }
}

void check_enumeration_bound(std::size_t m) {
  if (m > kMaxEnumeratedAtoms)
    throw std::invalid_argument(
        fmt::format("enumerating 2^{} outcome sequences refused; limit is m <= {}", m, kMaxEnumeratedAtoms));
}

}  // namespace

DetectionProbabilities detection_probability(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case) {
  require_coverage(d, f, atom_case);
  double up = 0.0;
  double down = 0.0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    const std::size_t manifold = atom_case == AtomCase::a ? n + 1 : n;
    const double stay = f.p_plus(manifold) * d[n];
    const double flip = f.p_minus(manifold) * d[n];
    if (atom_case == AtomCase::a) {
      up += stay;
      down += flip;
    } else {
      up += flip;
      down += stay;
    }
  }
  const double total = up + down;
  return DetectionProbabilities{up / total, down / total};
}

SelectiveResult apply_selective(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case, int k) {
  if (auto result = try_selective(d, f, atom_case, k)) return std::move(*result);
  throw ImpossibleOutcomeError(
      fmt::format("outcome k = {} for case {} has probability below {}", k, atom_case == AtomCase::a ? "a" : "b",
                  kImpossibleMass));
}

double sequence_probability(const PhotonDistribution& d0, std::span<const FilterTable> filters,
                            const OutcomeSequence& k) {
  check_lengths(filters.size(), 1, k.size());
  PhotonDistribution d = d0;
  double probability = 1.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    auto step = try_selective(d, per_atom(filters, j, "filter"), k[j].atom_case, k[j].k);
    if (!step) return 0.0;
    probability *= step->probability;
    d = std::move(step->next);
  }
  return probability;
}

std::vector<Trajectory> sample_trajectories(const PhotonDistribution& d0, std::span<const FilterTable> filters,
                                            std::span<const AtomCase> cases, std::size_t m, std::size_t count,
                                            std::uint64_t seed, Execution exec) {
  if (count < 1) throw std::invalid_argument("sample_trajectories needs count >= 1");
  check_lengths(filters.size(), cases.size(), m);

  std::vector<Trajectory> out(count);
  detail::for_each_index(static_cast<long>(count), exec, [&](long i) {
    std::mt19937_64 engine = make_stream_engine(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    PhotonDistribution d = d0;
    double probability = 1.0;
    std::vector<Outcome> entries;
    entries.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      const AtomCase atom_case = per_atom(cases, j, "atom case");
      const FilterTable& f = per_atom(filters, j, "filter");
      const DetectionProbabilities det = detection_probability(d, f, atom_case);
      const double p_flip = atom_case == AtomCase::a ? det.p_minus_out : det.p_plus_out;
      const int k = uniform(engine) < p_flip ? flip_of(atom_case) : 0;
      SelectiveResult step = apply_selective(d, f, atom_case, k);
      probability *= step.probability;
      d = std::move(step.next);
      entries.push_back({atom_case, k});
    }
    out[static_cast<std::size_t>(i)] = Trajectory{OutcomeSequence(std::move(entries)), probability, std::move(d)};
  });
  return out;
}

std::vector<Trajectory> enumerate_trajectories(const PhotonDistribution& d0, std::span<const FilterTable> filters,
                                               std::span<const AtomCase> cases, std::size_t m) {
  check_enumeration_bound(m);
  check_lengths(filters.size(), cases.size(), m);
  std::vector<Trajectory> out;
  collect_branches(Trajectory{OutcomeSequence{}, 1.0, d0}, 0, m, filters, cases, out);
  return out;
}

PhotonDistribution ensemble_step(const PhotonDistribution& d, const FilterTable& f, AtomCase atom_case) {
  require_coverage(d, f, atom_case);
  const std::size_t size = d.size();
  if (atom_case == AtomCase::a) {
    std::vector<double> out(size + 1);
    out[0] = f.p_plus(1) * d[0];
    for (std::size_t n = 1; n < size; ++n) out[n] = f.p_plus(n + 1) * d[n] + f.p_minus(n) * d[n - 1];
    out[size] = f.p_minus(size) * d[size - 1];
    if (out[size] == 0.0) out.pop_back();
    return PhotonDistribution(std::move(out));
  }
  std::vector<double> out(size);
  for (std::size_t n = 0; n + 1 < size; ++n) out[n] = f.p_plus(n) * d[n] + f.p_minus(n + 1) * d[n + 1];
  out[size - 1] = f.p_plus(size - 1) * d[size - 1];
  return PhotonDistribution(std::move(out));
}

std::vector<PhotonDistribution> ensemble_run(const PhotonDistribution& d0, const FilterTable& f, AtomCase atom_case,
                                             std::size_t m) {
  std::vector<PhotonDistribution> history;
  history.reserve(m + 1);
  history.push_back(d0);
  for (std::size_t j = 0; j < m; ++j) history.push_back(ensemble_step(history.back(), f, atom_case));
  return history;
}

PhotonDistribution brute_force_ensemble(const PhotonDistribution& d0, const FilterTable& f, AtomCase atom_case,
                                        std::size_t m, Execution exec) {
  check_enumeration_bound(m);
  if (exec == Execution::serial) {
    std::vector<double> acc(d0.size(), 0.0);
    accumulate_branches(d0, 1.0, 0, m, f, atom_case, acc);
    return PhotonDistribution(std::move(acc));
  }

  // Each subtree below a fixed-depth prefix is summed on its own; the
  // subtree sums are then added in prefix order.
  const std::size_t split = std::min<std::size_t>(m, 6);
  const long prefixes = 1L << split;
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(prefixes));
  detail::for_each_index(prefixes, exec, [&](long prefix) {
    PhotonDistribution d = d0;
    double probability = 1.0;
    for (std::size_t j = 0; j < split; ++j) {
      const bool flipped = (prefix >> (split - 1 - j)) & 1L;
      auto step = try_selective(d, f, atom_case, flipped ? flip_of(atom_case) : 0);
      if (!step) return;
      probability *= step->probability;
      d = std::move(step->next);
    }
    auto& acc = partial[static_cast<std::size_t>(prefix)];
    acc.assign(d0.size(), 0.0);
    accumulate_branches(d, probability, split, m, f, atom_case, acc);
  });

  std::vector<double> total(d0.size(), 0.0);
  for (const auto& acc : partial) {
    if (total.size() < acc.size()) total.resize(acc.size(), 0.0);
    for (std::size_t n = 0; n < acc.size(); ++n) total[n] += acc[n];
  }
  return PhotonDistribution(std::move(total));
}

PhotonDistribution binomial_closed_form(Kappa kappa, std::size_t m) {
  const double k = kappa.value();
  std::vector<double> p(m + 1, 0.0);
  if (m <= 60) {
    double coefficient = 1.0;  // C(m, n)
    for (std::size_t n = 0; n <= m; ++n) {
      p[n] = coefficient * std::pow(k, static_cast<double>(m - n)) * std::pow(1.0 - k, static_cast<double>(n));
      coefficient = coefficient * static_cast<double>(m - n) / static_cast<double>(n + 1);
    }
    return PhotonDistribution(std::move(p));
  }
  const double dm = static_cast<double>(m);
  for (std::size_t n = 0; n <= m; ++n) {
    const double dn = static_cast<double>(n);
    // 0 * log(0) terms are taken as 0.
    const double stay_term = m - n == 0 ? 0.0 : (dm - dn) * std::log(k);
    const double flip_term = n == 0 ? 0.0 : dn * std::log1p(-k);
    p[n] = std::exp(std::lgamma(dm + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(dm - dn + 1.0) + stay_term + flip_term);
  }
  return PhotonDistribution(std::move(p));
}

}  // namespace cavityfock

#include "cavityfock/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

namespace cavityfock {

PhotonDistribution::PhotonDistribution() : probs_{1.0} {}

PhotonDistribution::PhotonDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("photon distribution needs at least one entry");
  for (std::size_t n = 0; n < probs_.size(); ++n) {
    if (!std::isfinite(probs_[n]) || probs_[n] < 0.0)
      throw std::invalid_argument(fmt::format("photon distribution entry {} is {}", n, probs_[n]));
  }
}

PhotonDistribution PhotonDistribution::normalized(std::vector<double> probs) {
  PhotonDistribution d(std::move(probs));
  d.normalize();
  return d;
}

double PhotonDistribution::mass() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

PhotonDistribution& PhotonDistribution::normalize() {
  const double total = mass();
  if (!(total > 0.0)) throw std::domain_error("cannot normalize a distribution with zero mass");
  for (double& p : probs_) p /= total;
  return *this;
}

void PhotonDistribution::grow_to(std::size_t new_nmax) {
  if (new_nmax + 1 > probs_.size()) probs_.resize(new_nmax + 1, 0.0);
}

namespace {

// P(N > nmax) for N ~ Poisson(nbar).
double poisson_tail(double nbar, std::size_t nmax) {
  if (nbar == 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(nmax) + 1.0, nbar);
}

std::size_t required_coherent_nmax(double nbar, double tail_epsilon) {
  std::size_t n = static_cast<std::size_t>(nbar);
  while (poisson_tail(nbar, n) >= tail_epsilon) ++n;
  return n;
}

}  // namespace

std::size_t default_nmax(const InitialFieldSpec& spec) {
  struct Visitor {
    std::size_t operator()(const Vacuum&) const { return 0; }
    std::size_t operator()(const FockState& f) const { return f.n; }
    std::size_t operator()(const CoherentState& c) const {
      return static_cast<std::size_t>(std::ceil(c.nbar + 10.0 * std::sqrt(c.nbar) + 20.0));
    }
  };
  return std::visit(Visitor{}, spec.kind);
}

PhotonDistribution make_distribution(const InitialFieldSpec& spec, std::size_t nmax) {
  if (!(spec.tail_epsilon > 0.0)) throw std::invalid_argument("tail_epsilon must be positive");
  std::vector<double> probs(nmax + 1, 0.0);

  if (std::holds_alternative<Vacuum>(spec.kind)) {
    probs[0] = 1.0;
    return PhotonDistribution(std::move(probs));
  }
  if (const auto* fock = std::get_if<FockState>(&spec.kind)) {
    if (fock->n > nmax)
      throw std::invalid_argument(fmt::format("fock state n = {} exceeds nmax = {}", fock->n, nmax));
    probs[fock->n] = 1.0;
    return PhotonDistribution(std::move(probs));
  }

  const double nbar = std::get<CoherentState>(spec.kind).nbar;
  if (!std::isfinite(nbar) || nbar < 0.0)
    throw std::invalid_argument(fmt::format("coherent state needs nbar >= 0, got {}", nbar));
  const double tail = poisson_tail(nbar, nmax);
  if (tail >= spec.tail_epsilon) {
    const std::size_t required = required_coherent_nmax(nbar, spec.tail_epsilon);
    throw TruncationError(fmt::format("coherent state nbar = {} loses tail mass {:.3g} >= {:.3g} at nmax = {}; "
                                      "need nmax >= {}",
                                      nbar, tail, spec.tail_epsilon, nmax, required),
                          required);
  }
  if (nbar == 0.0) {
    probs[0] = 1.0;
    return PhotonDistribution(std::move(probs));
  }
  const double log_nbar = std::log(nbar);
  for (std::size_t n = 0; n <= nmax; ++n) {
    const double dn = static_cast<double>(n);
    probs[n] = std::exp(-nbar + dn * log_nbar - std::lgamma(dn + 1.0));
  }
  return PhotonDistribution::normalized(std::move(probs));
}

PhotonDistribution make_distribution(const InitialFieldSpec& spec) {
  return make_distribution(spec, default_nmax(spec));
}

double mean_photon(const PhotonDistribution& d) {
  double sum = 0.0;
  const auto p = d.probs();
  for (std::size_t n = 0; n < p.size(); ++n) sum += static_cast<double>(n) * p[n];
  return sum;
}

double variance(const PhotonDistribution& d) {
  // Central second moment; avoids the cancellation in <n^2> - <n>^2.
  const double mean = mean_photon(d);
  double sum = 0.0;
  const auto p = d.probs();
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double dev = static_cast<double>(n) - mean;
    sum += dev * dev * p[n];
  }
  return sum;
}

PhotonDistribution shift(const PhotonDistribution& d, long nu) {
  const auto p = d.probs();
  const long size = static_cast<long>(p.size());
  std::vector<double> out(p.size(), 0.0);
  for (long n = 0; n < size; ++n) {
    const long src = n + nu;
    if (src >= 0 && src < size) out[static_cast<std::size_t>(n)] = p[static_cast<std::size_t>(src)];
  }
  return PhotonDistribution(std::move(out));
}

double sup_distance(const PhotonDistribution& a, const PhotonDistribution& b) {
  const std::size_t size = std::max(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t n = 0; n < size; ++n) worst = std::max(worst, std::abs(a[n] - b[n]));
  return worst;
}

}  // namespace cavityfock

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cavityfock {

// Probability distribution over photon numbers n = 0..nmax.
//
// Entries are finite and non-negative. Most operations return a normalized
// distribution; `shift` is the exception and leaves the mass as is so callers
// can detect probability pushed past the truncation boundary.
class PhotonDistribution {
 public:
  // Vacuum with nmax = 0.
  PhotonDistribution();

  // Validates entries (finite, >= 0, non-empty). Does not normalize.
  explicit PhotonDistribution(std::vector<double> probs);

  static PhotonDistribution normalized(std::vector<double> probs);

  std::size_t nmax() const { return probs_.size() - 1; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
  std::span<const double> probs() const& { return probs_; }
  std::span<const double> probs() const&& = delete;

  // Sum of all entries.
  double mass() const;

  // Rescales to unit mass. Throws std::domain_error for zero mass.
  PhotonDistribution& normalize();

  // Extends the array with zeros so that nmax() >= new_nmax.
  void grow_to(std::size_t new_nmax);

  bool operator==(const PhotonDistribution&) const = default;

 private:
  std::vector<double> probs_;
};

struct Vacuum {};
struct FockState {
  std::size_t n = 0;
};
struct CoherentState {
  double nbar = 0.0;
};

struct InitialFieldSpec {
  std::variant<Vacuum, FockState, CoherentState> kind;
  double tail_epsilon = 1e-12;
};

// Raised when a truncated distribution would drop more than the allowed tail.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, std::size_t required_nmax)
      : std::runtime_error(what), required_nmax_(required_nmax) {}
  std::size_t required_nmax() const { return required_nmax_; }

 private:
  std::size_t required_nmax_;
};

// Default truncation: 0 for vacuum, n for Fock, ceil(nbar + 10 sqrt(nbar) + 20)
// for coherent states.
std::size_t default_nmax(const InitialFieldSpec& spec);

// Coherent states are Poissonian, renormalized over 0..nmax.
// Throws std::invalid_argument for fock n > nmax or a bad spec, and
// TruncationError when the dropped Poisson tail is >= tail_epsilon.
PhotonDistribution make_distribution(const InitialFieldSpec& spec, std::size_t nmax);
PhotonDistribution make_distribution(const InitialFieldSpec& spec);

double mean_photon(const PhotonDistribution& d);
double variance(const PhotonDistribution& d);

// result[n] = d[n + nu], zero outside 0..nmax. Same nmax as d, unnormalized.
PhotonDistribution shift(const PhotonDistribution& d, long nu);

// Largest |a[n] - b[n]| over the union of supports.
double sup_distance(const PhotonDistribution& a, const PhotonDistribution& b);

}  // namespace cavityfock

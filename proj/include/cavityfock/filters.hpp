#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cavityfock/dynamics.hpp"
#include "cavityfock/execution.hpp"

namespace cavityfock {

enum class FilterProvenance { exact_dk, adiabatic_kappa, resonant, numeric };

std::string_view to_string(FilterProvenance provenance);

// Filter functions p_plus(n) = |a+(n)|^2 for manifolds n = 0..nmax, in the
// convention of an atom entering in |+>. By unitarity of the 2x2 propagator
// p_plus(n) is also the probability that a |->-entering atom stays in |->, so
// the same table serves both atomic cases. p_minus(n) = 1 - p_plus(n).
class FilterTable {
 public:
  // Throws std::invalid_argument if empty or any entry lies outside [0, 1].
  FilterTable(std::vector<double> p_plus, FilterProvenance provenance);

  std::size_t nmax() const { return p_plus_.size() - 1; }
  std::size_t size() const { return p_plus_.size(); }
  FilterProvenance provenance() const { return provenance_; }
  std::span<const double> values() const& { return p_plus_; }
  std::span<const double> values() const&& = delete;

  // Bounds-checked; throws std::out_of_range naming the missing manifold.
  double p_plus(std::size_t n) const;
  double p_minus(std::size_t n) const { return 1.0 - p_plus(n); }

  // Probability that an atom of the given case leaves manifold n in the
  // level it entered.
  double stay(std::size_t n, AtomCase /*atom_case*/) const { return p_plus(n); }
  double flip(std::size_t n, AtomCase /*atom_case*/) const { return p_minus(n); }

  bool operator==(const FilterTable&) const = default;

 private:
  std::vector<double> p_plus_;
  FilterProvenance provenance_;
};

class Kappa {
 public:
  // Throws std::invalid_argument outside [0, 1].
  explicit Kappa(double value);
  double value() const { return value_; }

 private:
  double value_;
};

// Exact Demkov-Kunike filter in the cosine form
//   p_plus(n) = [cosh 2pi L1 + cos(2pi sqrt(eta^2 n - L2^2))] / [2 cosh pi(L1+L2) cosh pi(L1-L2)],
// continued to cosh(2pi sqrt(L2^2 - eta^2 n)) below the threshold. The
// denominator equals cosh 2pi L1 + cosh 2pi L2, so the two level-ordering
// branches coincide and the result is even in both lambdas. Evaluated in log
// space; p_plus(0) = 1 exactly. Throws std::range_error on non-finite input.
FilterTable dk_filter(double lambda1, double lambda2, double eta, std::size_t nmax);

// Same filter from the product-of-hyperbolic-functions form. Complex
// arithmetic, no overflow protection: a cross-check for moderate parameters.
double dk_filter_hyperbolic_form(double lambda1, double lambda2, double eta, std::size_t n);

// Non-oscillating part of the exact filter, the n >= 1 adiabatic plateau.
Kappa adiabatic_kappa(double lambda1, double lambda2);

// p_plus = {1 for n = 0, kappa otherwise}.
FilterTable adiabatic_filter(Kappa kappa, std::size_t nmax);

// Resonant pulse (e_bar = e0 = 0): p_plus(n) = cos^2(pi eta sqrt(n)).
FilterTable resonant_filter(double eta, std::size_t nmax);

// Tabulates the stay probability from the ODE propagator. Manifolds are
// independent, so the parallel kernel distributes them over threads.
FilterTable numeric_filter(const DKParams& params, AtomCase atom_case, std::size_t nmax,
                           const PropagationOptions& options = {}, Execution exec = Execution::parallel);

}  // namespace cavityfock

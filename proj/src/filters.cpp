#include "cavityfock/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"

namespace cavityfock {

std::string_view to_string(FilterProvenance provenance) {
  switch (provenance) {
    case FilterProvenance::exact_dk: return "exact-dk";
    case FilterProvenance::adiabatic_kappa: return "adiabatic-kappa";
    case FilterProvenance::resonant: return "resonant";
    case FilterProvenance::numeric: return "numeric";
  }
  return "unknown";
}

FilterTable::FilterTable(std::vector<double> p_plus, FilterProvenance provenance)
    : p_plus_(std::move(p_plus)), provenance_(provenance) {
  if (p_plus_.empty()) throw std::invalid_argument("filter table needs at least the n = 0 entry");
  for (std::size_t n = 0; n < p_plus_.size(); ++n) {
    if (!(p_plus_[n] >= 0.0 && p_plus_[n] <= 1.0))
      throw std::invalid_argument(fmt::format("filter entry p_plus({}) = {} outside [0, 1]", n, p_plus_[n]));
  }
}

double FilterTable::p_plus(std::size_t n) const {
  if (n >= p_plus_.size())
    throw std::out_of_range(fmt::format("filter table covers manifolds 0..{}, manifold {} requested", nmax(), n));
  return p_plus_[n];
}

Kappa::Kappa(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::invalid_argument(fmt::format("kappa = {} outside [0, 1]", value));
}

namespace {

constexpr double kPi = std::numbers::pi;

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_finite(double lambda1, double lambda2, double eta) {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || !std::isfinite(eta))
    throw std::range_error(fmt::format("Demkov-Kunike parameters out of range: lambda1 = {}, lambda2 = {}, eta = {}",
                                       lambda1, lambda2, eta));
  if (eta < 0.0) throw std::invalid_argument(fmt::format("eta must be >= 0, got {}", eta));
}

// log(2 cosh pi(L1+L2) cosh pi(L1-L2)) = log(cosh 2pi L1 + cosh 2pi L2)
double log_denominator(double lambda1, double lambda2) {
  return log_add_exp(log_cosh(2.0 * kPi * lambda1), log_cosh(2.0 * kPi * lambda2));
}

double dk_p_plus(double lambda1, double lambda2, double eta, std::size_t n, double log_den) {
  if (n == 0) return 1.0;
  const double plateau = std::exp(log_cosh(2.0 * kPi * lambda1) - log_den);
  const double radicand = eta * eta * static_cast<double>(n) - lambda2 * lambda2;
  if (!std::isfinite(radicand)) throw std::range_error(fmt::format("eta^2 n overflows at n = {}", n));
  const double oscillation = radicand >= 0.0
                                 ? std::cos(2.0 * kPi * std::sqrt(radicand)) * std::exp(-log_den)
                                 : std::exp(log_cosh(2.0 * kPi * std::sqrt(-radicand)) - log_den);
  return std::clamp(plateau + oscillation, 0.0, 1.0);
}

}  // namespace

FilterTable dk_filter(double lambda1, double lambda2, double eta, std::size_t nmax) {
  check_finite(lambda1, lambda2, eta);
  const double log_den = log_denominator(lambda1, lambda2);
  std::vector<double> p(nmax + 1);
  for (std::size_t n = 0; n <= nmax; ++n) p[n] = dk_p_plus(lambda1, lambda2, eta, n, log_den);
  return FilterTable(std::move(p), FilterProvenance::exact_dk);
}

double dk_filter_hyperbolic_form(double lambda1, double lambda2, double eta, std::size_t n) {
  check_finite(lambda1, lambda2, eta);
  using C = std::complex<double>;
  const C s = std::sqrt(C(lambda2 * lambda2 - eta * eta * static_cast<double>(n), 0.0));
  const double den = std::cosh(kPi * (lambda1 + lambda2)) * std::cosh(kPi * (lambda1 - lambda2));
  if (lambda1 > lambda2) {
    const C num = std::sinh(kPi * (lambda2 + s)) * std::sinh(kPi * (lambda2 - s));
    return 1.0 - num.real() / den;
  }
  const C num = std::cosh(kPi * (lambda1 + s)) * std::cosh(kPi * (lambda1 - s));
  return num.real() / den;
}

Kappa adiabatic_kappa(double lambda1, double lambda2) {
  check_finite(lambda1, lambda2, 0.0);
  const double kappa = std::exp(log_cosh(2.0 * kPi * lambda1) - log_denominator(lambda1, lambda2));
  return Kappa(std::clamp(kappa, 0.0, 1.0));
}

FilterTable adiabatic_filter(Kappa kappa, std::size_t nmax) {
  std::vector<double> p(nmax + 1, kappa.value());
  p[0] = 1.0;
  return FilterTable(std::move(p), FilterProvenance::adiabatic_kappa);
}

FilterTable resonant_filter(double eta, std::size_t nmax) {
  if (!std::isfinite(eta) || eta < 0.0) throw std::invalid_argument(fmt::format("eta must be >= 0, got {}", eta));
  std::vector<double> p(nmax + 1);
  for (std::size_t n = 0; n <= nmax; ++n) {
    const double c = std::cos(kPi * eta * std::sqrt(static_cast<double>(n)));
    p[n] = c * c;
  }
  return FilterTable(std::move(p), FilterProvenance::resonant);
}

FilterTable numeric_filter(const DKParams& params, AtomCase atom_case, std::size_t nmax,
                           const PropagationOptions& options, Execution exec) {
  const PulseShape pulse = PulseShape::demkov_kunike(params);
  std::vector<double> p(nmax + 1, 1.0);

  auto stay = [&](std::size_t n) {
    const TransitionProbabilities t = transition_probabilities(pulse, n, atom_case, options);
    return atom_case == AtomCase::a ? t.p_plus : t.p_minus;
  };

  detail::for_each_index(static_cast<long>(nmax), exec,
                         [&](long i) { p[static_cast<std::size_t>(i) + 1] = stay(static_cast<std::size_t>(i) + 1); });
  return FilterTable(std::move(p), FilterProvenance::numeric);
}

}  // namespace cavityfock

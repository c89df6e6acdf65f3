#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cavityfock {

// Demkov-Kunike pulse: detuning/2 = e_bar + e0 tanh(t/T), coupling g0 sech(t/T).
struct DKParams {
  double e_bar = 0.0;
  double e0 = 0.0;
  double g0 = 0.0;
  double t_scale = 1.0;

  // Builds parameters with T = 1 from the dimensionless triple.
  static DKParams from_dimensionless(double lambda1, double lambda2, double eta);

  double lambda1() const { return e_bar * t_scale; }
  double lambda2() const { return e0 * t_scale; }
  double eta() const { return g0 * t_scale; }

  // Throws std::invalid_argument unless t_scale > 0, g0 >= 0 and all finite.
  void validate() const;
};

// Initial atomic level: case a enters in |+>, case b in |->.
enum class AtomCase { a, b };

struct TwoLevelAmplitudes {
  std::complex<double> a_plus;
  std::complex<double> a_minus;
  double norm() const { return std::norm(a_plus) + std::norm(a_minus); }
};

struct TransitionProbabilities {
  double p_plus = 1.0;
  double p_minus = 0.0;
};

// Pulse given in dimensionless time tau = t/T: returns T*detuning/2 and the
// T*g envelope (without the sqrt(n) factor).
struct PulseShape {
  std::function<double(double)> half_detuning;
  std::function<double(double)> coupling;

  static PulseShape demkov_kunike(const DKParams& params);

  // Piecewise-linear interpolation of samples (tau, T*detuning/2, T*g);
  // constant extrapolation outside the sampled range. Taus must increase.
  static PulseShape tabulated(std::vector<double> tau, std::vector<double> half_detuning,
                              std::vector<double> coupling);
};

struct PropagationOptions {
  double window = 20.0;  // integrate over tau in [-window, window]
  double tol = 1e-10;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double tau, double step)
      : std::runtime_error(what), tau_(tau), step_(step) {}
  double tau() const { return tau_; }
  double step() const { return step_; }

 private:
  double tau_;
  double step_;
};

// Integrates the manifold-n two-level Schroedinger equation
//   i d/dtau (a+, a-) = [[D(tau), C(tau) sqrt(n)], [C(tau) sqrt(n), -D(tau)]] (a+, a-)
// with Dormand-Prince 5(4) step control. Only moduli of the result are
// meaningful; the global phase is whatever the interaction frame gives.
TwoLevelAmplitudes propagate(const PulseShape& pulse, std::size_t n, AtomCase atom_case,
                             const PropagationOptions& options = {});
TwoLevelAmplitudes propagate(const DKParams& params, std::size_t n, AtomCase atom_case,
                             const PropagationOptions& options = {});

// (|a+|^2, |a-|^2) after the pulse. The n = 0 manifold is uncoupled: case a
// gives (1, 0), case b gives (0, 1).
TransitionProbabilities transition_probabilities(const DKParams& params, std::size_t n, AtomCase atom_case,
                                                 const PropagationOptions& options = {});
TransitionProbabilities transition_probabilities(const PulseShape& pulse, std::size_t n, AtomCase atom_case,
                                                 const PropagationOptions& options = {});

}  // namespace cavityfock

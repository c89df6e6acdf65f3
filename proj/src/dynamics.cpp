#include "cavityfock/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

namespace cavityfock {

namespace odeint = boost::numeric::odeint;

DKParams DKParams::from_dimensionless(double lambda1, double lambda2, double eta) {
  return DKParams{lambda1, lambda2, eta, 1.0};
}

void DKParams::validate() const {
  if (!std::isfinite(e_bar) || !std::isfinite(e0) || !std::isfinite(g0) || !std::isfinite(t_scale))
    throw std::invalid_argument("Demkov-Kunike parameters must be finite");
  if (!(t_scale > 0.0)) throw std::invalid_argument(fmt::format("t_scale must be > 0, got {}", t_scale));
  if (g0 < 0.0) throw std::invalid_argument(fmt::format("g0 must be >= 0, got {}", g0));
}

PulseShape PulseShape::demkov_kunike(const DKParams& params) {
  params.validate();
  const double l1 = params.lambda1();
  const double l2 = params.lambda2();
  const double eta = params.eta();
  return PulseShape{[l1, l2](double tau) { return l1 + l2 * std::tanh(tau); },
                    [eta](double tau) { return eta / std::cosh(tau); }};
}

PulseShape PulseShape::tabulated(std::vector<double> tau, std::vector<double> half_detuning,
                                 std::vector<double> coupling) {
  if (tau.empty() || tau.size() != half_detuning.size() || tau.size() != coupling.size())
    throw std::invalid_argument("tabulated pulse needs equal-length, non-empty sample lists");
  if (!std::is_sorted(tau.begin(), tau.end(), std::less_equal<>{}) ||
      std::adjacent_find(tau.begin(), tau.end()) != tau.end())
    throw std::invalid_argument("tabulated pulse times must be strictly increasing");

  auto interp = [tau](const std::vector<double>& values) {
    return [tau, values](double t) {
      if (t <= tau.front()) return values.front();
      if (t >= tau.back()) return values.back();
      const auto hi = static_cast<std::size_t>(std::upper_bound(tau.begin(), tau.end(), t) - tau.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - tau[lo]) / (tau[hi] - tau[lo]);
      return values[lo] + w * (values[hi] - values[lo]);
    };
  };
  return PulseShape{interp(half_detuning), interp(coupling)};
}

namespace {

using State = std::array<double, 4>;  // Re a+, Im a+, Re a-, Im a-

struct ManifoldSystem {
  const PulseShape* pulse;
  double sqrt_n;

  void operator()(const State& x, State& dxdt, double tau) const {
    const double d = pulse->half_detuning(tau);
    const double c = pulse->coupling(tau) * sqrt_n;
    // -i * (H x)
    const double hp_re = d * x[0] + c * x[2];
    const double hp_im = d * x[1] + c * x[3];
    const double hm_re = c * x[0] - d * x[2];
    const double hm_im = c * x[1] - d * x[3];
    dxdt = {hp_im, -hp_re, hm_im, -hm_re};
  }
};

constexpr double kMaxStep = 0.5;

// Local step errors add up over the thousands of steps a window takes (about
// 500x the per-step target at the parameter extremes), so step control runs
// tighter than the requested end-of-window tolerance.
constexpr double kStepToleranceFactor = 1.0 / 200.0;

}  // namespace

TwoLevelAmplitudes propagate(const PulseShape& pulse, std::size_t n, AtomCase atom_case,
                             const PropagationOptions& options) {
  if (n < 1) throw std::invalid_argument("propagate needs a manifold n >= 1");
  if (!(options.window >= 10.0))
    throw std::invalid_argument(fmt::format("integration window must be >= 10, got {}", options.window));
  if (!(options.tol > 0.0)) throw std::invalid_argument("integration tolerance must be > 0");

  State x = atom_case == AtomCase::a ? State{1.0, 0.0, 0.0, 0.0} : State{0.0, 0.0, 1.0, 0.0};
  const ManifoldSystem system{&pulse, std::sqrt(static_cast<double>(n))};

  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(
      options.tol * kStepToleranceFactor, options.tol * kStepToleranceFactor);
  const double end = options.window;
  const double min_step = 1e-14 * options.window;
  double tau = -options.window;
  double dt = 1e-3;

  while (tau < end) {
    dt = std::min({dt, kMaxStep, end - tau});
    if (stepper.try_step(system, x, tau, dt) == odeint::fail) {
      if (dt < min_step)
        throw IntegrationError(fmt::format("step size underflow at tau = {:.6g} (step {:.3g}, manifold n = {})",
                                           tau, dt, n),
                               tau, dt);
    }
    if (!std::isfinite(x[0]) || !std::isfinite(x[2]))
      throw IntegrationError(fmt::format("non-finite amplitude at tau = {:.6g}", tau), tau, dt);
  }
  return TwoLevelAmplitudes{{x[0], x[1]}, {x[2], x[3]}};
}

TwoLevelAmplitudes propagate(const DKParams& params, std::size_t n, AtomCase atom_case,
                             const PropagationOptions& options) {
  return propagate(PulseShape::demkov_kunike(params), n, atom_case, options);
}

TransitionProbabilities transition_probabilities(const PulseShape& pulse, std::size_t n, AtomCase atom_case,
                                                 const PropagationOptions& options) {
  if (n == 0) return atom_case == AtomCase::a ? TransitionProbabilities{1.0, 0.0} : TransitionProbabilities{0.0, 1.0};

  const TwoLevelAmplitudes amps = propagate(pulse, n, atom_case, options);
  const double norm = amps.norm();
  const double drift_limit = std::max(10.0 * options.tol, 1e-9);
  if (std::abs(norm - 1.0) > drift_limit)
    throw IntegrationError(fmt::format("norm drifted to {:.15g} in manifold n = {}", norm, n), options.window, 0.0);

  // Rescale by the (checked) norm so the pair sums to one.
  double p_plus = std::norm(amps.a_plus) / norm;
  p_plus = std::clamp(p_plus, 0.0, 1.0);
  return TransitionProbabilities{p_plus, 1.0 - p_plus};
}

TransitionProbabilities transition_probabilities(const DKParams& params, std::size_t n, AtomCase atom_case,
                                                 const PropagationOptions& options) {
  return transition_probabilities(PulseShape::demkov_kunike(params), n, atom_case, options);
}

}  // namespace cavityfock

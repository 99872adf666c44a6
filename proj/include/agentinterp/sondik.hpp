#pragma once

#include <map>
#include <string>

#include "agentinterp/interpretation.hpp"
#include "agentinterp/machine.hpp"
#include "agentinterp/pomdp.hpp"

// Sondik's two-state maintenance problem and the parametric machine whose
// state m in [0,1] is read as the belief that the hidden state is "1".
namespace agentinterp::sondik {

/// Branch point of g and of the expose function. The upper branch is closed
/// on the left: m == kThreshold uses the second formula and outputs "2".
inline constexpr double kThreshold = 0.1188;

/// g(input, m) for input index 0 ("1") or 1 ("2"), without perturbation.
double update(std::size_t input, double m, double threshold = kThreshold);

/// Machine with I = O = {"1","2"}. Params: "threshold" (default kThreshold),
/// "g_offset" (added to g and clamped to [0,1]; default 0).
StochasticMooreMachine machine(const std::map<std::string, double>& params = {});

/// The two-state sondik POMDP (nu, phi, r). The model carries no discount; the
/// caller chooses one.
Pomdp pomdp(double discount = 0.95);

/// psi(m) = (m, 1 - m) over hidden states {"1","2"}.
FiniteDist belief_of(double m);

/// psi as an interpretation map (Bernoulli over {"1","2"}).
InterpretationMap psi();

/// (H, O, psi, omega, kappa) for `machine`, which must have the Sondik
/// input/output sets.
Interpretation interpretation(const StochasticMooreMachine& machine);

}  // namespace agentinterp::sondik

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agentinterp/prob.hpp"
#include "agentinterp/random.hpp"

namespace agentinterp {

using Point = std::vector<double>;

/// A machine state: a label for tabular machines, a point of the continuous
/// state space for parametric ones.
using MachineState = std::variant<Label, Point>;

MachineState scalar_state(double m);
std::string to_string(const MachineState& m);
/// Total order used to sort samples and reports: labels before points,
/// points lexicographically.
bool state_less(const MachineState& a, const MachineState& b);

struct Successor {
    MachineState state;
    double probability;
};

/// Deterministic closed-form dynamics over a subset of R^dimension.
struct ParametricDynamics {
    std::size_t dimension = 1;
    /// g(input index, m); must return a point inside the domain.
    std::function<Point(std::size_t, const Point&)> update;
    /// Index into the output set.
    std::function<std::size_t(const Point&)> expose;
    std::function<bool(const Point&)> contains;
    /// Points where g or the expose function switch branches. Always part of
    /// the default verification sample.
    std::vector<Point> branch_points;
    /// Registry name and parameters, kept for serialization; empty for
    /// machines built in code.
    std::string builtin;
    std::map<std::string, double> params;
};

/// Stochastic Moore machine (M, I, O, upsilon, omega). The kernel upsilon maps
/// (input, state) to a distribution over next states; omega is an ordinary
/// function of the state.
class StochasticMooreMachine {
public:
    /// `kernel` has domain (inputs, states) and codomain states; `expose[k]` is
    /// the output of `states[k]`.
    static StochasticMooreMachine tabular(LabelSet states, LabelSet inputs, LabelSet outputs,
                                          TabularKernel kernel, std::vector<Label> expose);
    static StochasticMooreMachine parametric(LabelSet inputs, LabelSet outputs, ParametricDynamics dynamics);

    bool is_tabular() const { return std::holds_alternative<Tabular>(rep_); }
    bool is_deterministic() const;

    const LabelSet& inputs() const { return inputs_; }
    const LabelSet& outputs() const { return outputs_; }
    /// Tabular machines only; throws DomainError otherwise.
    const LabelSet& states() const;
    const TabularKernel& kernel() const;
    /// Parametric machines only; throws DomainError otherwise.
    const ParametricDynamics& dynamics() const;

    /// Throws LabelError if `m` is not a state of this machine.
    void validate(const MachineState& m) const;

    /// Support of upsilon(input, m) with probabilities, in state order.
    std::vector<Successor> successors(const MachineState& m, const Label& input) const;
    /// upsilon(next | input, m).
    double transition_probability(const MachineState& m, const Label& input, const MachineState& next) const;
    Label expose(const MachineState& m) const;

    /// States a verification visits by default: every state of a tabular
    /// machine; for a one-dimensional parametric machine, `grid_points`
    /// uniform points of [0,1] plus the branch points, sorted.
    std::vector<MachineState> default_sample(std::size_t grid_points) const;

private:
    struct Tabular {
        LabelSet states;
        TabularKernel kernel;
        std::vector<std::size_t> expose;
    };

    StochasticMooreMachine(LabelSet inputs, LabelSet outputs, std::variant<Tabular, ParametricDynamics> rep);

    LabelSet inputs_;
    LabelSet outputs_;
    std::variant<Tabular, ParametricDynamics> rep_;
};

struct TrajectoryStep {
    MachineState state;
    std::optional<Label> input;  // empty on the final step
    Label output;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::uint64_t seed = 0;
};

/// Samples m' ~ upsilon(input, m). Deterministic machines do not draw from `rng`.
MachineState step(const StochasticMooreMachine& machine, const MachineState& m, const Label& input, Rng& rng);

/// Feeds `inputs` one at a time starting from `m0`; the trajectory has
/// inputs.size() + 1 steps and is reproducible from `seed`.
Trajectory run(const StochasticMooreMachine& machine, const MachineState& m0, const std::vector<Label>& inputs,
               std::uint64_t seed);

/// Registered parametric machines. Known names: "sondik" (params "threshold",
/// "g_offset"). Throws RegistryError for unknown names.
StochasticMooreMachine builtin_machine(const std::string& name, const std::map<std::string, double>& params = {});

}  // namespace agentinterp

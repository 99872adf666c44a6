#include "agentinterp/machine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agentinterp/errors.hpp"
#include "agentinterp/sondik.hpp"

namespace agentinterp {

MachineState scalar_state(double m) { return Point{m}; }

std::string to_string(const MachineState& m) {
    if (const auto* label = std::get_if<Label>(&m)) {
        return *label;
    }
    const auto& p = std::get<Point>(m);
    std::ostringstream out;
    out.precision(17);
    if (p.size() == 1) {
        out << p[0];
        return out.str();
    }
    out << '(';
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << (i ? ", " : "") << p[i];
    }
    out << ')';
    return out.str();
}

bool state_less(const MachineState& a, const MachineState& b) {
    if (a.index() != b.index()) {
        return a.index() < b.index();
    }
    if (const auto* la = std::get_if<Label>(&a)) {
        return *la < std::get<Label>(b);
    }
    const auto& pa = std::get<Point>(a);
    const auto& pb = std::get<Point>(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
}

StochasticMooreMachine::StochasticMooreMachine(LabelSet inputs, LabelSet outputs,
                                               std::variant<Tabular, ParametricDynamics> rep)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), rep_(std::move(rep)) {
    if (inputs_.empty() || outputs_.empty()) {
        throw LabelError("machine needs non-empty input and output sets");
    }
}

StochasticMooreMachine StochasticMooreMachine::tabular(LabelSet states, LabelSet inputs, LabelSet outputs,
                                                       TabularKernel kernel, std::vector<Label> expose) {
    if (states.empty()) {
        throw LabelError("machine needs at least one state");
    }
    if (kernel.domain().size() != 2 || !(kernel.domain()[0] == inputs) || !(kernel.domain()[1] == states) ||
        !(kernel.codomain() == states)) {
        throw DomainError("machine kernel must map (inputs, states) to states");
    }
    if (expose.size() != states.size()) {
        throw DomainError("expose must assign an output to every state");
    }
    std::vector<std::size_t> expose_idx;
    expose_idx.reserve(expose.size());
    for (const auto& o : expose) {
        expose_idx.push_back(outputs.index_of(o));
    }
    return StochasticMooreMachine(std::move(inputs), std::move(outputs),
                                  Tabular{std::move(states), std::move(kernel), std::move(expose_idx)});
}

StochasticMooreMachine StochasticMooreMachine::parametric(LabelSet inputs, LabelSet outputs,
                                                          ParametricDynamics dynamics) {
    if (!dynamics.update || !dynamics.expose || !dynamics.contains || dynamics.dimension == 0) {
        throw ModelError("parametric machine needs update, expose and domain functions");
    }
    return StochasticMooreMachine(std::move(inputs), std::move(outputs), std::move(dynamics));
}

bool StochasticMooreMachine::is_deterministic() const {
    const auto* tab = std::get_if<Tabular>(&rep_);
    if (tab == nullptr) {
        return true;
    }
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        for (std::size_t m = 0; m < tab->states.size(); ++m) {
            const std::size_t idx[] = {i, m};
            if (tab->kernel.row(idx).support().size() != 1) {
                return false;
            }
        }
    }
    return true;
}

const LabelSet& StochasticMooreMachine::states() const {
    const auto* tab = std::get_if<Tabular>(&rep_);
    if (tab == nullptr) {
        throw DomainError("parametric machine has no labeled state set");
    }
    return tab->states;
}

const TabularKernel& StochasticMooreMachine::kernel() const {
    const auto* tab = std::get_if<Tabular>(&rep_);
    if (tab == nullptr) {
        throw DomainError("parametric machine has no tabular kernel");
    }
    return tab->kernel;
}

const ParametricDynamics& StochasticMooreMachine::dynamics() const {
    const auto* dyn = std::get_if<ParametricDynamics>(&rep_);
    if (dyn == nullptr) {
        throw DomainError("tabular machine has no parametric dynamics");
    }
    return *dyn;
}

void StochasticMooreMachine::validate(const MachineState& m) const {
    if (const auto* tab = std::get_if<Tabular>(&rep_)) {
        const auto* label = std::get_if<Label>(&m);
        if (label == nullptr) {
            throw LabelError("tabular machine state must be a label, got " + to_string(m));
        }
        tab->states.index_of(*label);
        return;
    }
    const auto& dyn = std::get<ParametricDynamics>(rep_);
    const auto* p = std::get_if<Point>(&m);
    if (p == nullptr || p->size() != dyn.dimension || !dyn.contains(*p)) {
        throw LabelError("state " + to_string(m) + " is outside the machine's state space");
    }
}

std::vector<Successor> StochasticMooreMachine::successors(const MachineState& m, const Label& input) const {
    validate(m);
    const std::size_t i = inputs_.index_of(input);
    if (const auto* tab = std::get_if<Tabular>(&rep_)) {
        const std::size_t idx[] = {i, tab->states.index_of(std::get<Label>(m))};
        const auto& row = tab->kernel.row(idx);
        std::vector<Successor> out;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row[k] > 0.0) {
                out.push_back({tab->states[k], row[k]});
            }
        }
        return out;
    }
    const auto& dyn = std::get<ParametricDynamics>(rep_);
    return {{dyn.update(i, std::get<Point>(m)), 1.0}};
}

double StochasticMooreMachine::transition_probability(const MachineState& m, const Label& input,
                                                      const MachineState& next) const {
    validate(next);
    double p = 0.0;
    for (const auto& s : successors(m, input)) {
        if (s.state == next) {
            p += s.probability;
        }
    }
    return p;
}

Label StochasticMooreMachine::expose(const MachineState& m) const {
    validate(m);
    if (const auto* tab = std::get_if<Tabular>(&rep_)) {
        return outputs_[tab->expose[tab->states.index_of(std::get<Label>(m))]];
    }
    const auto& dyn = std::get<ParametricDynamics>(rep_);
    const std::size_t o = dyn.expose(std::get<Point>(m));
    if (o >= outputs_.size()) {
        throw LabelError("expose returned an output index out of range");
    }
    return outputs_[o];
}

std::vector<MachineState> StochasticMooreMachine::default_sample(std::size_t grid_points) const {
    std::vector<MachineState> out;
    if (const auto* tab = std::get_if<Tabular>(&rep_)) {
        for (const auto& s : tab->states) {
            out.emplace_back(s);
        }
        return out;
    }
    const auto& dyn = std::get<ParametricDynamics>(rep_);
    if (dyn.dimension == 1) {
        for (double m : unit_interval_grid(grid_points)) {
            if (dyn.contains(Point{m})) {
                out.emplace_back(Point{m});
            }
        }
    } else {
        // Simplex-shaped state spaces (belief machines): grid with the same
        // number of subdivisions per axis.
        for (auto& p : simplex_grid(dyn.dimension, grid_points - 1)) {
            if (dyn.contains(p)) {
                out.emplace_back(std::move(p));
            }
        }
    }
    for (const auto& b : dyn.branch_points) {
        out.emplace_back(b);
    }
    std::sort(out.begin(), out.end(), state_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MachineState step(const StochasticMooreMachine& machine, const MachineState& m, const Label& input, Rng& rng) {
    auto next = machine.successors(m, input);
    if (next.size() == 1) {
        return std::move(next.front().state);
    }
    const double u = rng.uniform();
    double acc = 0.0;
    for (auto& s : next) {
        acc += s.probability;
        if (u < acc) {
            return std::move(s.state);
        }
    }
    // u lands past the accumulated mass only through rounding.
    return std::move(next.back().state);
}

Trajectory run(const StochasticMooreMachine& machine, const MachineState& m0, const std::vector<Label>& inputs,
               std::uint64_t seed) {
    machine.validate(m0);
    for (const auto& i : inputs) {
        machine.inputs().index_of(i);
    }
    Rng rng(seed);
    Trajectory traj;
    traj.seed = seed;
    traj.steps.reserve(inputs.size() + 1);
    MachineState m = m0;
    for (const auto& i : inputs) {
        traj.steps.push_back({m, i, machine.expose(m)});
        m = step(machine, m, i, rng);
    }
    traj.steps.push_back({m, std::nullopt, machine.expose(m)});
    return traj;
}

StochasticMooreMachine builtin_machine(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "sondik") {
        return sondik::machine(params);
    }
    throw RegistryError("unknown builtin machine '" + name + "'");
}

}  // namespace agentinterp

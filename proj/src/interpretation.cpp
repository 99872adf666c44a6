#include "agentinterp/interpretation.hpp"

#include <algorithm>
#include <cmath>

#include "agentinterp/errors.hpp"

namespace agentinterp {

InterpretationMap::InterpretationMap(Kind kind, LabelSet hidden, std::map<Label, FiniteDist> table)
    : kind_(kind), hidden_(std::move(hidden)), table_(std::move(table)) {
    if (hidden_.empty()) {
        throw LabelError("interpretation map needs a non-empty hidden set");
    }
}

InterpretationMap InterpretationMap::tabular(LabelSet hidden, std::map<Label, FiniteDist> table) {
    for (const auto& [m, dist] : table) {
        if (!(dist.labels() == hidden)) {
            throw DomainError("psi(" + m + ") is not over the hidden states");
        }
    }
    return InterpretationMap(Kind::tabular, std::move(hidden), std::move(table));
}

InterpretationMap InterpretationMap::bernoulli(LabelSet hidden) {
    if (hidden.size() != 2) {
        throw DomainError("bernoulli interpretation needs exactly two hidden states");
    }
    return InterpretationMap(Kind::bernoulli, std::move(hidden), {});
}

InterpretationMap InterpretationMap::identity(LabelSet hidden) {
    return InterpretationMap(Kind::identity, std::move(hidden), {});
}

FiniteDist InterpretationMap::operator()(const MachineState& m) const {
    switch (kind_) {
        case Kind::tabular: {
            const auto* label = std::get_if<Label>(&m);
            if (label == nullptr) {
                throw DomainError("tabular psi needs labeled states");
            }
            auto it = table_.find(*label);
            if (it == table_.end()) {
                throw LabelError("psi is undefined at state '" + *label + "'");
            }
            return it->second;
        }
        case Kind::bernoulli: {
            const auto* p = std::get_if<Point>(&m);
            if (p == nullptr || p->size() != 1) {
                throw DomainError("bernoulli psi needs one-dimensional states");
            }
            const double x = (*p)[0];
            if (!(x >= 0.0 && x <= 1.0)) {
                throw DomainError("bernoulli psi needs states in [0, 1]");
            }
            return FiniteDist(hidden_, {x, 1.0 - x});
        }
        case Kind::identity: {
            const auto* p = std::get_if<Point>(&m);
            if (p == nullptr) {
                throw DomainError("identity psi needs belief-valued states");
            }
            return FiniteDist(hidden_, *p);
        }
    }
    throw DomainError("unknown interpretation map kind");
}

ActionFunction ActionFunction::from_expose(const StochasticMooreMachine& machine) {
    return ActionFunction([machine](const MachineState& m) { return machine.expose(m); });
}

ActionFunction ActionFunction::tabular(std::map<Label, Label> table) {
    auto fn = [table](const MachineState& m) {
        const auto* label = std::get_if<Label>(&m);
        if (label == nullptr) {
            throw DomainError("tabular action function needs labeled states");
        }
        auto it = table.find(*label);
        if (it == table.end()) {
            throw LabelError("action function is undefined at state '" + *label + "'");
        }
        return it->second;
    };
    return ActionFunction(std::move(fn), std::move(table));
}

ActionFunction ActionFunction::constant(Label action) {
    return ActionFunction([action](const MachineState&) { return action; });
}

JointDist predictive_joint(const Interpretation& itp, const MachineState& m) {
    if (!(itp.psi.hidden() == itp.model.hidden())) {
        throw DomainError("psi and model kernel use different hidden sets");
    }
    return itp.model.predictive(itp.psi(m), itp.model.actions().index_of(itp.alpha(m)));
}

ConsistencyReport check_influenced_filtering(const StochasticMooreMachine& machine, const Interpretation& itp,
                                             const std::vector<MachineState>& sample, double tol) {
    if (!(machine.inputs() == itp.model.sensors())) {
        throw DomainError("machine inputs differ from the model kernel's inputs");
    }
    if (!(itp.psi.hidden() == itp.model.hidden())) {
        throw DomainError("psi and model kernel use different hidden sets");
    }
    ConsistencyReport report;
    report.tolerance = tol;
    const std::size_t nh = itp.model.hidden().size();
    for (const auto& m : sample) {
        const auto joint = predictive_joint(itp, m);
        for (std::size_t i = 0; i < machine.inputs().size(); ++i) {
            const Label& input = machine.inputs()[i];
            const double marginal = joint.column_mass(i);
            if (!(marginal > 0.0)) {
                report.skipped.push_back({m, input});
                continue;
            }
            for (auto& next : machine.successors(m, input)) {
                const auto belief = itp.psi(next.state);
                double residual = 0.0;
                for (std::size_t h = 0; h < nh; ++h) {
                    residual = std::max(residual, std::abs(joint.at(h, i) - belief[h] * marginal));
                }
                CheckedPoint point{m, input, std::move(next.state), residual};
                report.max_residual = std::max(report.max_residual, residual);
                if (!(residual <= tol)) {
                    report.violations.push_back(point);
                }
                report.checked.push_back(std::move(point));
            }
        }
    }
    return report;
}

namespace {

void check_solution_domains(const StochasticMooreMachine& machine, const Pomdp& p, const InterpretationMap& psi,
                            const AlphaVectorPolicy& policy) {
    if (!(machine.outputs() == p.actions())) {
        throw DomainError("machine outputs differ from the POMDP's actions");
    }
    if (!(machine.inputs() == p.sensors())) {
        throw DomainError("machine inputs differ from the POMDP's sensor values");
    }
    if (!(psi.hidden() == p.hidden())) {
        throw DomainError("psi is not over the POMDP's hidden states");
    }
    const auto& solved = policy.pomdp();
    if (!(solved.hidden() == p.hidden()) || !(solved.actions() == p.actions()) || !(solved.sensors() == p.sensors()) ||
        solved.discount() != p.discount()) {
        throw DomainError("policy was solved for a different POMDP");
    }
}

}  // namespace

SolutionReport check_pomdp_solution(const StochasticMooreMachine& machine, const Pomdp& p,
                                    const InterpretationMap& psi, const AlphaVectorPolicy& policy,
                                    const std::vector<MachineState>& sample, double tol) {
    check_solution_domains(machine, p, psi, policy);
    SolutionReport report;
    const Interpretation itp{psi, ActionFunction::from_expose(machine), p.model()};
    report.filtering = check_influenced_filtering(machine, itp, sample, tol);
    for (const auto& m : sample) {
        const auto decision = optimal_policy_at(policy, psi(m));
        const Label exposed = machine.expose(m);
        const double gap = decision.value - decision.q_values[p.actions().index_of(exposed)];
        ++report.policy_checked;
        report.max_policy_gap = std::max(report.max_policy_gap, gap);
        if (exposed != decision.action && gap > tol) {
            report.policy_mismatches.push_back({m, exposed, decision.action, gap});
        }
    }
    return report;
}

Prop1Result check_proposition1(const StochasticMooreMachine& machine, const Pomdp& p, const InterpretationMap& psi,
                               const AlphaVectorPolicy& policy, const MachineState& m, const Label& input,
                               double tol) {
    check_solution_domains(machine, p, psi, policy);
    Prop1Result result;
    const auto b = psi(m);
    const std::size_t i = p.sensors().index_of(input);
    const auto exposed = p.actions().index_of(machine.expose(m));
    result.marginal = p.model().predictive(b, exposed).column_mass(i);
    const auto decision = optimal_policy_at(policy, b);
    result.optimal_action = decision.action;
    if (!(result.marginal > 0.0)) {
        result.verdict = Verdict::skipped;
        return result;
    }
    const auto posterior = belief_update(p.model(), b, decision.action_index, i);
    const auto* f = std::get_if<FiniteDist>(&posterior);
    for (const auto& next : machine.successors(m, input)) {
        // Possible under the exposed action but not under the optimal one:
        // no posterior to match.
        const double residual = f == nullptr ? 1.0 : total_variation(psi(next.state), *f);
        result.residual = std::max(result.residual, residual);
    }
    result.verdict = result.residual <= tol ? Verdict::pass : Verdict::fail;
    return result;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass:
            return "pass";
        case Verdict::fail:
            return "fail";
        case Verdict::skipped:
            return "skipped";
    }
    return "unknown";
}

}  // namespace agentinterp

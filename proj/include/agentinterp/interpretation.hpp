#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "agentinterp/machine.hpp"
#include "agentinterp/pomdp.hpp"
#include "agentinterp/solver.hpp"

namespace agentinterp {

/// psi: M -> P(H'), assigning a belief over hidden states to each machine state.
class InterpretationMap {
public:
    enum class Kind { tabular, bernoulli, identity };

    /// One distribution per machine state label.
    static InterpretationMap tabular(LabelSet hidden, std::map<Label, FiniteDist> table);
    /// One-dimensional states m in [0,1]: psi(m) = (m, 1 - m) over a
    /// two-element hidden set.
    static InterpretationMap bernoulli(LabelSet hidden);
    /// States that are themselves points of the simplex over `hidden`.
    static InterpretationMap identity(LabelSet hidden);

    Kind kind() const { return kind_; }
    const LabelSet& hidden() const { return hidden_; }
    const std::map<Label, FiniteDist>& table() const { return table_; }

    FiniteDist operator()(const MachineState& m) const;

private:
    InterpretationMap(Kind kind, LabelSet hidden, std::map<Label, FiniteDist> table);

    Kind kind_;
    LabelSet hidden_;
    std::map<Label, FiniteDist> table_;
};

/// alpha: M -> A', deterministic.
class ActionFunction {
public:
    /// The machine's own expose function (the Moore-machine reading).
    static ActionFunction from_expose(const StochasticMooreMachine& machine);
    static ActionFunction tabular(std::map<Label, Label> table);
    static ActionFunction constant(Label action);

    Label operator()(const MachineState& m) const { return fn_(m); }
    const std::optional<std::map<Label, Label>>& table() const { return table_; }

private:
    explicit ActionFunction(std::function<Label(const MachineState&)> fn,
                            std::optional<std::map<Label, Label>> table = std::nullopt)
        : fn_(std::move(fn)), table_(std::move(table)) {}

    std::function<Label(const MachineState&)> fn_;
    std::optional<std::map<Label, Label>> table_;
};

/// Interpretation (H', A', psi, alpha, kappa) of a machine: hidden and action
/// sets are those of the model kernel, whose sensor set must equal the
/// machine's inputs.
struct Interpretation {
    InterpretationMap psi;
    ActionFunction alpha;
    WorldModel model;
};

/// psi_{H,I}(h', i | m) = sum_h kappa(h', i | h, alpha(m)) psi(h | m).
JointDist predictive_joint(const Interpretation& itp, const MachineState& m);

struct CheckedPoint {
    MachineState m;
    Label input;
    MachineState next;
    double residual = 0.0;
};

struct SkippedPoint {
    MachineState m;
    Label input;
};

struct ConsistencyReport {
    /// Every (m, i, m') with upsilon(m' | i, m) > 0 and psi_I(i | m) > 0.
    std::vector<CheckedPoint> checked;
    std::vector<CheckedPoint> violations;
    /// (m, i) with psi_I(i | m) = 0; the consistency equation is vacuous there.
    std::vector<SkippedPoint> skipped;
    double max_residual = 0.0;
    double tolerance = 0.0;

    bool passed() const { return violations.empty(); }
};

/// Checks, for every sampled m, every input i and every m' in the support of
/// upsilon(i, m), that psi_{H,I}(h', i | m) = psi(h' | m') psi_I(i | m) for all
/// h'. The residual is the largest absolute difference over h'.
ConsistencyReport check_influenced_filtering(const StochasticMooreMachine& machine, const Interpretation& itp,
                                             const std::vector<MachineState>& sample, double tol);

struct PolicyMismatch {
    MachineState m;
    Label exposed;
    Label optimal;
    /// V*(psi(m)) minus the lookahead value of the exposed action.
    double value_gap = 0.0;
};

struct SolutionReport {
    /// Condition (i): filtering consistency with alpha = expose and the
    /// POMDP's kernel.
    ConsistencyReport filtering;
    /// Condition (ii): states whose exposed action is not optimal for psi(m).
    std::vector<PolicyMismatch> policy_mismatches;
    std::size_t policy_checked = 0;
    double max_policy_gap = 0.0;

    bool filtering_passed() const { return filtering.passed(); }
    bool policy_passed() const { return policy_mismatches.empty(); }
    bool passed() const { return filtering_passed() && policy_passed(); }
};

/// Interpretation as a POMDP solution. An exposed action counts as optimal
/// when its lookahead value is within `tol` of the best one (the argmax is a
/// set).
SolutionReport check_pomdp_solution(const StochasticMooreMachine& machine, const Pomdp& p,
                                    const InterpretationMap& psi, const AlphaVectorPolicy& policy,
                                    const std::vector<MachineState>& sample, double tol);

enum class Verdict { pass, fail, skipped };

struct Prop1Result {
    Verdict verdict = Verdict::skipped;
    /// Largest total variation between psi(m') and f(psi(m), pi*(psi(m)), i).
    double residual = 0.0;
    /// psi_I(i | m) under the exposed action.
    double marginal = 0.0;
    Label optimal_action;
};

/// Belief-update property at a single (m, i): every possible successor m'
/// must carry the Bayes posterior under the optimal action. Skipped when i is
/// subjectively impossible at m.
Prop1Result check_proposition1(const StochasticMooreMachine& machine, const Pomdp& p, const InterpretationMap& psi,
                               const AlphaVectorPolicy& policy, const MachineState& m, const Label& input,
                               double tol);

const char* to_string(Verdict v);

}  // namespace agentinterp

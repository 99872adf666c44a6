#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "agentinterp/machine.hpp"
#include "agentinterp/pomdp.hpp"

namespace agentinterp {

// ---------------------------------------------------------------------------
// Finite MDPs
// ---------------------------------------------------------------------------

class Mdp {
public:
    /// `transition` maps (states, actions) to states; `reward[x * |A| + a]`.
    Mdp(LabelSet states, LabelSet actions, TabularKernel transition, std::vector<double> reward, double discount);

    const LabelSet& states() const { return states_; }
    const LabelSet& actions() const { return actions_; }
    const TabularKernel& transition() const { return transition_; }
    double reward(std::size_t x, std::size_t a) const { return reward_[x * actions_.size() + a]; }
    const std::vector<double>& rewards() const { return reward_; }
    double discount() const { return discount_; }

    /// r(x, a) + gamma * sum_x' tau(x' | x, a) values(x').
    double q_value(std::size_t x, std::size_t a, std::span<const double> values) const;

private:
    LabelSet states_;
    LabelSet actions_;
    TabularKernel transition_;
    std::vector<double> reward_;
    double discount_;
};

struct MdpSolution {
    std::vector<double> values;
    std::vector<Label> policy;
    double bellman_residual = 0.0;
    std::size_t iterations = 0;
};

/// Sup-norm of T(values) - values.
double bellman_residual(const Mdp& m, std::span<const double> values);

/// Value iteration from V = 0. Stops once the last change guarantees the
/// returned values are within `epsilon` of V*; the Bellman residual is then at
/// most epsilon as well. The policy is greedy with ties going to the lowest
/// action index.
MdpSolution mdp_value_iteration(const Mdp& m, double epsilon = 1e-7);

// ---------------------------------------------------------------------------
// POMDP value iteration over alpha vectors
// ---------------------------------------------------------------------------

struct AlphaVector {
    std::vector<double> values;  // indexed by hidden state
    std::size_t action = 0;

    double dot(std::span<const double> b) const;
    friend bool operator==(const AlphaVector&, const AlphaVector&) = default;
};

struct SolveOptions {
    /// Number of exact backups from the zero function. Empty: iterate until
    /// the value changes on the witness grid by at most
    /// epsilon * (1 - gamma) / gamma, so the result is within epsilon of the
    /// fixed point on the grid.
    std::optional<std::size_t> horizon;
    double epsilon = 1e-7;
    /// Witness grid: all simplex points with this denominator. Empty picks
    /// the largest denominator up to 200 whose grid has at most 400 points.
    std::optional<std::size_t> witness_resolution;
    /// Maximum number of vectors per stage (and per enumeration).
    std::size_t vector_budget = 200000;
    std::size_t max_iterations = 100000;
    /// A grid-restricted backup can settle into a short cycle whose change
    /// never reaches the stopping threshold. Give up, leaving converged
    /// false, once the smallest change seen has not halved in this many
    /// backups. Zero disables the check.
    std::size_t stall_window = 50;
    /// Materialize the whole |A| * |Gamma|^|S| cross-sum before pruning
    /// instead of selecting witness maximizers directly. Same result, far
    /// more work; used to validate the fast path.
    bool exhaustive_enumeration = false;
};

/// Denominator used when SolveOptions::witness_resolution is empty.
std::size_t default_witness_resolution(std::size_t num_hidden);

/// Piecewise-linear convex value function with the model it was solved for.
class AlphaVectorPolicy {
public:
    AlphaVectorPolicy(Pomdp model, std::vector<AlphaVector> vectors);

    const Pomdp& pomdp() const { return model_; }
    const std::vector<AlphaVector>& vectors() const { return vectors_; }
    double discount() const { return model_.discount(); }

    /// max over vectors of <alpha, b>.
    double value(const Belief& b) const;
    double value(std::span<const double> b) const;
    /// Index of the first maximizing vector.
    std::size_t best_vector(std::span<const double> b) const;

    std::size_t backups = 0;
    bool converged = false;
    /// Sup-norm change on the witness grid in the last backup.
    double last_change = 0.0;
    std::size_t witness_resolution = 0;

private:
    Pomdp model_;
    std::vector<AlphaVector> vectors_;
};

/// One exact backup by full enumeration over (action, per-sensor choice of a
/// previous vector). Output order: action, then choice tuple lexicographic.
/// Throws BudgetError if more than `budget` vectors would be produced.
std::vector<AlphaVector> enumerate_backup(const Pomdp& p, const std::vector<AlphaVector>& previous,
                                          std::size_t budget);

/// Keeps the vectors that are the first maximizer at some grid point, then
/// drops pointwise-dominated ones. Value on the grid is unchanged.
std::vector<AlphaVector> prune_to_witnesses(const std::vector<AlphaVector>& vectors,
                                            const std::vector<std::vector<double>>& grid);

/// Backup restricted to witnesses: for every grid point the maximizing
/// enumerated vector is assembled directly (the inner product decomposes per
/// sensor value), so the result equals enumerate_backup followed by
/// prune_to_witnesses without building the cross-sum.
std::vector<AlphaVector> witness_backup(const Pomdp& p, const std::vector<AlphaVector>& previous,
                                        const std::vector<std::vector<double>>& grid, std::size_t budget);

AlphaVectorPolicy pomdp_value_iteration(const Pomdp& p, const SolveOptions& options = {});

struct PolicyDecision {
    Label action;
    std::size_t action_index = 0;
    double value = 0.0;
    /// One-step lookahead value of every action.
    std::vector<double> q_values;
};

/// pi*(b) by one-step lookahead on the policy's value function; ties go to
/// the lowest action index.
PolicyDecision optimal_policy_at(const AlphaVectorPolicy& policy, const Belief& b);

/// Expected discounted reward per hidden state of always playing action `a`
/// (infinite horizon, or `horizon` steps).
std::vector<double> fixed_action_values(const Pomdp& p, std::size_t a, std::optional<std::size_t> horizon = {});

/// Optimal expected discounted reward over `horizon` steps from belief `b`,
/// by exhaustive expansion of every action/observation history. This is the
/// maximum over all depth-`horizon` policy trees, since the tree maximum
/// splits into independent choices per history. Shares no code with the
/// alpha-vector path. Throws BudgetError when more than `node_budget`
/// history nodes would be expanded.
double brute_force_value(const Pomdp& p, const Belief& b, std::size_t horizon, std::size_t node_budget = 2000000);

// ---------------------------------------------------------------------------
// Canonical belief machine
// ---------------------------------------------------------------------------

struct CanonicalOptions {
    /// Forward reachability depth from the seeds.
    std::size_t depth = 4;
    /// Maximum number of distinct reachable beliefs.
    std::size_t cap = 20000;
};

struct CanonicalMachine {
    /// States are beliefs (points of the simplex), inputs the sensors, outputs
    /// the actions, kernel delta of f(b, pi*(b), s), expose pi*.
    StochasticMooreMachine machine;
    /// Beliefs reachable from the seeds within `depth` steps, breadth-first
    /// order, seeds first.
    std::vector<MachineState> reachable;
};

/// Belief machine of `policy`. A sensor value with zero probability leaves
/// the belief unchanged. Throws BudgetError if the reachable set exceeds the
/// cap.
CanonicalMachine canonical_machine(const Pomdp& p, const AlphaVectorPolicy& policy, const std::vector<Belief>& seeds,
                                   const CanonicalOptions& options = {});

}  // namespace agentinterp

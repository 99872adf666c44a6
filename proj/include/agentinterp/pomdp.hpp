#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "agentinterp/prob.hpp"

namespace agentinterp {

using Belief = FiniteDist;

/// Transition kernel kappa: H x A -> P(H x S), stored densely. When built from
/// factors, kappa(h', s | h, a) = nu(h' | h, a) * phi(s | h', a) and the
/// factors are retained.
class WorldModel {
public:
    /// `nu` has domain (hidden, actions) and codomain hidden; `phi` has domain
    /// (hidden, actions) (the first factor read as the successor state) and
    /// codomain sensors.
    static WorldModel factored(LabelSet hidden, LabelSet actions, LabelSet sensors, TabularKernel nu,
                               TabularKernel phi);
    /// `rows[h * |A| + a]` is kappa(h, a) over (hidden, sensors).
    static WorldModel joint(LabelSet hidden, LabelSet actions, LabelSet sensors, std::vector<JointDist> rows);
    /// Both forms; the product of the factors must match the joint within
    /// kNormalizationTolerance elementwise, else ModelError.
    static WorldModel factored_and_joint(LabelSet hidden, LabelSet actions, LabelSet sensors, TabularKernel nu,
                                         TabularKernel phi, std::vector<JointDist> rows);

    const LabelSet& hidden() const { return hidden_; }
    const LabelSet& actions() const { return actions_; }
    const LabelSet& sensors() const { return sensors_; }
    const std::optional<TabularKernel>& nu() const { return nu_; }
    const std::optional<TabularKernel>& phi() const { return phi_; }

    double kappa(std::size_t h, std::size_t a, std::size_t h_next, std::size_t s) const {
        return kappa_[((h * actions_.size() + a) * hidden_.size() + h_next) * sensors_.size() + s];
    }
    JointDist row(std::size_t h, std::size_t a) const;

    /// sum_h kappa(h', s | h, a) b(h), a distribution over (H', S).
    JointDist predictive(const Belief& b, std::size_t a) const;

    /// Throws DomainError unless `b` is over the hidden states.
    void check_belief(const Belief& b) const;

private:
    WorldModel(LabelSet hidden, LabelSet actions, LabelSet sensors, std::vector<double> kappa);

    LabelSet hidden_;
    LabelSet actions_;
    LabelSet sensors_;
    std::vector<double> kappa_;
    std::optional<TabularKernel> nu_;
    std::optional<TabularKernel> phi_;
};

/// POMDP (H, A, S, kappa, r) with discount 0 < gamma < 1. Rewards depend on
/// (h, a) only.
class Pomdp {
public:
    /// `reward[h * |A| + a]` is r(h, a).
    Pomdp(WorldModel model, std::vector<double> reward, double discount);

    const WorldModel& model() const { return model_; }
    const LabelSet& hidden() const { return model_.hidden(); }
    const LabelSet& actions() const { return model_.actions(); }
    const LabelSet& sensors() const { return model_.sensors(); }
    double reward(std::size_t h, std::size_t a) const { return reward_[h * actions().size() + a]; }
    const std::vector<double>& rewards() const { return reward_; }
    double discount() const { return discount_; }

    Pomdp with_discount(double discount) const { return Pomdp(model_, reward_, discount); }

private:
    WorldModel model_;
    std::vector<double> reward_;
    double discount_;
};

/// kappa(h, a) as a distribution over (next hidden state, sensor value).
JointDist joint_kernel(const Pomdp& p, const Label& h, const Label& a);

/// Bayes posterior f(b, a, s); ZeroMarginal when P(s | b, a) = 0.
Conditioned belief_update(const WorldModel& model, const Belief& b, std::size_t a, std::size_t s);
Conditioned belief_update(const Pomdp& p, const Belief& b, const Label& a, const Label& s);

/// Expected immediate reward sum_h b(h) r(h, a).
double belief_reward(const Pomdp& p, const Belief& b, const Label& a);

struct BeliefSuccessor {
    Belief belief;
    double probability;
    /// Sensor values leading to this belief (several when posteriors coincide).
    std::vector<Label> sensors;
};

/// Transition kernel of the belief MDP: one entry per distinct successor
/// belief with positive probability. Successors within total variation 1e-12
/// are merged.
std::vector<BeliefSuccessor> belief_transition(const Pomdp& p, const Belief& b, const Label& a);

inline constexpr double kBeliefMergeTolerance = 1e-12;

}  // namespace agentinterp

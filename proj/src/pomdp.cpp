#include "agentinterp/pomdp.hpp"

#include <cmath>

#include "agentinterp/errors.hpp"

namespace agentinterp {

WorldModel::WorldModel(LabelSet hidden, LabelSet actions, LabelSet sensors, std::vector<double> kappa)
    : hidden_(std::move(hidden)), actions_(std::move(actions)), sensors_(std::move(sensors)), kappa_(std::move(kappa)) {
    if (hidden_.empty() || actions_.empty() || sensors_.empty()) {
        throw LabelError("world model needs non-empty hidden, action and sensor sets");
    }
    const std::size_t block = hidden_.size() * sensors_.size();
    for (std::size_t r = 0; r < hidden_.size() * actions_.size(); ++r) {
        // Validates normalization of each row.
        JointDist(hidden_, sensors_, std::vector<double>(kappa_.begin() + r * block, kappa_.begin() + (r + 1) * block));
    }
}

WorldModel WorldModel::factored(LabelSet hidden, LabelSet actions, LabelSet sensors, TabularKernel nu,
                                TabularKernel phi) {
    if (nu.domain().size() != 2 || !(nu.domain()[0] == hidden) || !(nu.domain()[1] == actions) ||
        !(nu.codomain() == hidden)) {
        throw DomainError("nu must map (hidden, actions) to hidden");
    }
    if (phi.domain().size() != 2 || !(phi.domain()[0] == hidden) || !(phi.domain()[1] == actions) ||
        !(phi.codomain() == sensors)) {
        throw DomainError("phi must map (hidden, actions) to sensors");
    }
    const std::size_t nh = hidden.size(), na = actions.size(), ns = sensors.size();
    std::vector<double> kappa(nh * na * nh * ns);
    for (std::size_t h = 0; h < nh; ++h) {
        for (std::size_t a = 0; a < na; ++a) {
            const std::size_t ha[] = {h, a};
            const auto& nu_row = nu.row(ha);
            for (std::size_t h2 = 0; h2 < nh; ++h2) {
                const std::size_t h2a[] = {h2, a};
                const auto& phi_row = phi.row(h2a);
                for (std::size_t s = 0; s < ns; ++s) {
                    kappa[((h * na + a) * nh + h2) * ns + s] = nu_row[h2] * phi_row[s];
                }
            }
        }
    }
    WorldModel model(std::move(hidden), std::move(actions), std::move(sensors), std::move(kappa));
    model.nu_ = std::move(nu);
    model.phi_ = std::move(phi);
    return model;
}

WorldModel WorldModel::joint(LabelSet hidden, LabelSet actions, LabelSet sensors, std::vector<JointDist> rows) {
    const std::size_t nh = hidden.size(), na = actions.size(), ns = sensors.size();
    if (rows.size() != nh * na) {
        throw DomainError("joint kernel needs one row per (hidden, action) pair");
    }
    std::vector<double> kappa;
    kappa.reserve(nh * na * nh * ns);
    for (const auto& r : rows) {
        if (!(r.first() == hidden) || !(r.second() == sensors)) {
            throw DomainError("joint kernel row is not over (hidden, sensors)");
        }
        kappa.insert(kappa.end(), r.weights().begin(), r.weights().end());
    }
    return WorldModel(std::move(hidden), std::move(actions), std::move(sensors), std::move(kappa));
}

WorldModel WorldModel::factored_and_joint(LabelSet hidden, LabelSet actions, LabelSet sensors, TabularKernel nu,
                                          TabularKernel phi, std::vector<JointDist> rows) {
    auto model = factored(hidden, actions, sensors, std::move(nu), std::move(phi));
    const auto direct = joint(std::move(hidden), std::move(actions), std::move(sensors), std::move(rows));
    for (std::size_t k = 0; k < model.kappa_.size(); ++k) {
        if (std::abs(model.kappa_[k] - direct.kappa_[k]) > kNormalizationTolerance) {
            throw ModelError("factored kernel nu*phi does not match the given joint kernel");
        }
    }
    model.kappa_ = direct.kappa_;
    return model;
}

JointDist WorldModel::row(std::size_t h, std::size_t a) const {
    if (h >= hidden_.size() || a >= actions_.size()) {
        throw LabelError("kernel row index out of range");
    }
    const std::size_t block = hidden_.size() * sensors_.size();
    const auto first = kappa_.begin() + (h * actions_.size() + a) * block;
    return JointDist(hidden_, sensors_, std::vector<double>(first, first + block));
}

void WorldModel::check_belief(const Belief& b) const {
    if (!(b.labels() == hidden_)) {
        throw DomainError("belief is not over the model's hidden states");
    }
}

JointDist WorldModel::predictive(const Belief& b, std::size_t a) const {
    check_belief(b);
    if (a >= actions_.size()) {
        throw LabelError("action index out of range");
    }
    const std::size_t nh = hidden_.size(), ns = sensors_.size();
    std::vector<double> w(nh * ns, 0.0);
    for (std::size_t h = 0; h < nh; ++h) {
        if (b[h] == 0.0) {
            continue;
        }
        for (std::size_t h2 = 0; h2 < nh; ++h2) {
            for (std::size_t s = 0; s < ns; ++s) {
                w[h2 * ns + s] += kappa(h, a, h2, s) * b[h];
            }
        }
    }
    return JointDist(hidden_, sensors_, std::move(w));
}

Pomdp::Pomdp(WorldModel model, std::vector<double> reward, double discount)
    : model_(std::move(model)), reward_(std::move(reward)), discount_(discount) {
    if (!(discount_ > 0.0 && discount_ < 1.0)) {
        throw ModelError("discount must lie in (0, 1)");
    }
    if (reward_.size() != hidden().size() * actions().size()) {
        throw DomainError("reward table needs one entry per (hidden, action) pair");
    }
    for (double r : reward_) {
        if (!std::isfinite(r)) {
            throw ModelError("reward is not finite");
        }
    }
}

JointDist joint_kernel(const Pomdp& p, const Label& h, const Label& a) {
    return p.model().row(p.hidden().index_of(h), p.actions().index_of(a));
}

Conditioned belief_update(const WorldModel& model, const Belief& b, std::size_t a, std::size_t s) {
    return joint_then_condition(model.predictive(b, a), s);
}

Conditioned belief_update(const Pomdp& p, const Belief& b, const Label& a, const Label& s) {
    return belief_update(p.model(), b, p.actions().index_of(a), p.sensors().index_of(s));
}

double belief_reward(const Pomdp& p, const Belief& b, const Label& a) {
    p.model().check_belief(b);
    const std::size_t ai = p.actions().index_of(a);
    double total = 0.0;
    for (std::size_t h = 0; h < b.size(); ++h) {
        total += b[h] * p.reward(h, ai);
    }
    return total;
}

std::vector<BeliefSuccessor> belief_transition(const Pomdp& p, const Belief& b, const Label& a) {
    const auto joint = p.model().predictive(b, p.actions().index_of(a));
    std::vector<BeliefSuccessor> out;
    for (std::size_t s = 0; s < p.sensors().size(); ++s) {
        auto posterior = joint_then_condition(joint, s);
        const auto* next = std::get_if<FiniteDist>(&posterior);
        if (next == nullptr) {
            continue;
        }
        const double prob = joint.column_mass(s);
        bool merged = false;
        for (auto& existing : out) {
            if (total_variation(existing.belief, *next) <= kBeliefMergeTolerance) {
                existing.probability += prob;
                existing.sensors.push_back(p.sensors()[s]);
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back({*next, prob, {p.sensors()[s]}});
        }
    }
    return out;
}

}  // namespace agentinterp

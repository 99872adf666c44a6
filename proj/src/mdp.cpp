#include <algorithm>
#include <cmath>
#include <limits>

#include "agentinterp/errors.hpp"
#include "agentinterp/solver.hpp"

namespace agentinterp {

Mdp::Mdp(LabelSet states, LabelSet actions, TabularKernel transition, std::vector<double> reward, double discount)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      discount_(discount) {
    if (states_.empty() || actions_.empty()) {
        throw LabelError("MDP needs non-empty state and action sets");
    }
    if (transition_.domain().size() != 2 || !(transition_.domain()[0] == states_) ||
        !(transition_.domain()[1] == actions_) || !(transition_.codomain() == states_)) {
        throw DomainError("MDP transition must map (states, actions) to states");
    }
    if (reward_.size() != states_.size() * actions_.size()) {
        throw DomainError("MDP reward table needs one entry per (state, action) pair");
    }
    for (double r : reward_) {
        if (!std::isfinite(r)) {
            throw ModelError("MDP reward is not finite");
        }
    }
    if (!(discount_ > 0.0 && discount_ < 1.0)) {
        throw ModelError("discount must lie in (0, 1)");
    }
}

double Mdp::q_value(std::size_t x, std::size_t a, std::span<const double> values) const {
    const std::size_t idx[] = {x, a};
    const auto& row = transition_.row(idx);
    double future = 0.0;
    for (std::size_t y = 0; y < row.size(); ++y) {
        future += row[y] * values[y];
    }
    return reward(x, a) + discount_ * future;
}

double bellman_residual(const Mdp& m, std::span<const double> values) {
    if (values.size() != m.states().size()) {
        throw DomainError("value vector does not match the MDP's states");
    }
    double residual = 0.0;
    for (std::size_t x = 0; x < values.size(); ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < m.actions().size(); ++a) {
            best = std::max(best, m.q_value(x, a, values));
        }
        residual = std::max(residual, std::abs(best - values[x]));
    }
    return residual;
}

MdpSolution mdp_value_iteration(const Mdp& m, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DomainError("epsilon must be positive");
    }
    const std::size_t nx = m.states().size();
    const std::size_t na = m.actions().size();
    const double gamma = m.discount();
    const double stop = epsilon * (1.0 - gamma) / gamma;

    MdpSolution sol;
    std::vector<double> values(nx, 0.0), next(nx);
    for (;;) {
        double change = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < na; ++a) {
                best = std::max(best, m.q_value(x, a, values));
            }
            next[x] = best;
            change = std::max(change, std::abs(best - values[x]));
        }
        values.swap(next);
        ++sol.iterations;
        if (change <= stop) {
            break;
        }
    }

    sol.policy.reserve(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        std::size_t best_a = 0;
        double best = m.q_value(x, 0, values);
        for (std::size_t a = 1; a < na; ++a) {
            const double q = m.q_value(x, a, values);
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        sol.policy.push_back(m.actions()[best_a]);
    }
    sol.bellman_residual = bellman_residual(m, values);
    sol.values = std::move(values);
    return sol;
}

}  // namespace agentinterp

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "agentinterp/errors.hpp"
#include "agentinterp/solver.hpp"

namespace agentinterp {

namespace {

// Projected previous vectors, one contiguous |Gamma| x |H| block per (a, s):
// g[a][s][k](h) = sum_h' kappa(h', s | h, a) alpha_k(h').
class Projections {
public:
    Projections(const Pomdp& p, const std::vector<AlphaVector>& previous)
        : nh_(p.hidden().size()), ns_(p.sensors().size()), nk_(previous.size()) {
        const auto& model = p.model();
        const std::size_t na = p.actions().size();
        data_.assign(na * ns_ * nk_ * nh_, 0.0);
        for (std::size_t a = 0; a < na; ++a) {
            for (std::size_t s = 0; s < ns_; ++s) {
                for (std::size_t k = 0; k < nk_; ++k) {
                    double* g = &data_[((a * ns_ + s) * nk_ + k) * nh_];
                    for (std::size_t h = 0; h < nh_; ++h) {
                        for (std::size_t h2 = 0; h2 < nh_; ++h2) {
                            g[h] += model.kappa(h, a, h2, s) * previous[k].values[h2];
                        }
                    }
                }
            }
        }
    }

    const double* block(std::size_t a, std::size_t s) const { return &data_[(a * ns_ + s) * nk_ * nh_]; }
    double at(std::size_t a, std::size_t s, std::size_t k, std::size_t h) const {
        return block(a, s)[k * nh_ + h];
    }

private:
    std::size_t nh_, ns_, nk_;
    std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += x[i] * y[i];
    }
    return total;
}

AlphaVector assemble(const Pomdp& p, const Projections& proj, std::size_t a, std::span<const std::size_t> choice) {
    const std::size_t nh = p.hidden().size();
    AlphaVector out{std::vector<double>(nh), a};
    for (std::size_t h = 0; h < nh; ++h) {
        double future = 0.0;
        for (std::size_t s = 0; s < choice.size(); ++s) {
            future += proj.at(a, s, choice[s], h);
        }
        out.values[h] = p.reward(h, a) + p.discount() * future;
    }
    return out;
}

// Drops vectors weakly dominated by another kept vector; among identical
// vectors the first survives.
std::vector<AlphaVector> remove_dominated(const std::vector<AlphaVector>& vectors) {
    std::vector<bool> dropped(vectors.size(), false);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = 0; j < vectors.size() && !dropped[i]; ++j) {
            if (i == j || dropped[j]) {
                continue;
            }
            const auto& v = vectors[i].values;
            const auto& w = vectors[j].values;
            bool geq = true, strict = false;
            for (std::size_t h = 0; h < v.size(); ++h) {
                if (w[h] < v[h]) {
                    geq = false;
                    break;
                }
                strict = strict || w[h] > v[h];
            }
            if (geq && (strict || j < i)) {
                dropped[i] = true;
            }
        }
    }
    std::vector<AlphaVector> out;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (!dropped[i]) {
            out.push_back(vectors[i]);
        }
    }
    return out;
}

std::size_t saturating_power(std::size_t base, std::size_t exponent, std::size_t limit) {
    std::size_t result = 1;
    for (std::size_t e = 0; e < exponent; ++e) {
        if (base != 0 && result > limit / base) {
            return limit + 1;
        }
        result *= base;
    }
    return result;
}

double grid_sup_change(const std::vector<AlphaVector>& before, const std::vector<AlphaVector>& after,
                       const std::vector<std::vector<double>>& grid) {
    double change = 0.0;
    for (const auto& b : grid) {
        double vb = -std::numeric_limits<double>::infinity();
        for (const auto& alpha : before) {
            vb = std::max(vb, alpha.dot(b));
        }
        double va = -std::numeric_limits<double>::infinity();
        for (const auto& alpha : after) {
            va = std::max(va, alpha.dot(b));
        }
        change = std::max(change, std::abs(va - vb));
    }
    return change;
}

}  // namespace

double AlphaVector::dot(std::span<const double> b) const { return agentinterp::dot(values, b); }

AlphaVectorPolicy::AlphaVectorPolicy(Pomdp model, std::vector<AlphaVector> vectors)
    : model_(std::move(model)), vectors_(std::move(vectors)) {
    if (vectors_.empty()) {
        throw ModelError("alpha-vector policy needs at least one vector");
    }
    for (const auto& alpha : vectors_) {
        if (alpha.values.size() != model_.hidden().size() || alpha.action >= model_.actions().size()) {
            throw DomainError("alpha vector does not match the model");
        }
    }
}

double AlphaVectorPolicy::value(const Belief& b) const {
    model_.model().check_belief(b);
    return value(b.weights());
}

double AlphaVectorPolicy::value(std::span<const double> b) const {
    return vectors_[best_vector(b)].dot(b);
}

std::size_t AlphaVectorPolicy::best_vector(std::span<const double> b) const {
    if (b.size() != model_.hidden().size()) {
        throw DomainError("belief dimension does not match the policy");
    }
    std::size_t best = 0;
    double best_value = vectors_[0].dot(b);
    for (std::size_t k = 1; k < vectors_.size(); ++k) {
        const double v = vectors_[k].dot(b);
        if (v > best_value) {
            best_value = v;
            best = k;
        }
    }
    return best;
}

std::vector<AlphaVector> enumerate_backup(const Pomdp& p, const std::vector<AlphaVector>& previous,
                                          std::size_t budget) {
    const std::size_t na = p.actions().size(), ns = p.sensors().size(), nk = previous.size();
    const std::size_t per_action = saturating_power(nk, ns, budget);
    if (per_action > budget || na * per_action > budget) {
        throw BudgetError("exact backup would enumerate more than " + std::to_string(budget) + " vectors");
    }
    const Projections proj(p, previous);
    std::vector<AlphaVector> out;
    out.reserve(na * per_action);
    std::vector<std::size_t> choice(ns, 0);
    for (std::size_t a = 0; a < na; ++a) {
        std::fill(choice.begin(), choice.end(), 0);
        for (;;) {
            out.push_back(assemble(p, proj, a, choice));
            // Odometer over choices, last sensor fastest.
            std::size_t pos = ns;
            while (pos > 0 && ++choice[pos - 1] == nk) {
                choice[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) {
                break;
            }
        }
    }
    return out;
}

std::vector<AlphaVector> prune_to_witnesses(const std::vector<AlphaVector>& vectors,
                                            const std::vector<std::vector<double>>& grid) {
    if (vectors.empty()) {
        return {};
    }
    std::vector<bool> keep(vectors.size(), false);
    for (const auto& b : grid) {
        std::size_t best = 0;
        double best_value = vectors[0].dot(b);
        for (std::size_t k = 1; k < vectors.size(); ++k) {
            const double v = vectors[k].dot(b);
            if (v > best_value) {
                best_value = v;
                best = k;
            }
        }
        keep[best] = true;
    }
    std::vector<AlphaVector> kept;
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        if (keep[k]) {
            kept.push_back(vectors[k]);
        }
    }
    return remove_dominated(kept);
}

std::vector<AlphaVector> witness_backup(const Pomdp& p, const std::vector<AlphaVector>& previous,
                                        const std::vector<std::vector<double>>& grid, std::size_t budget) {
    const std::size_t nh = p.hidden().size(), na = p.actions().size(), ns = p.sensors().size(),
                      nk = previous.size();
    const Projections proj(p, previous);
    const double gamma = p.discount();

    // Key: action followed by the chosen previous vector per sensor value.
    std::set<std::vector<std::size_t>> winners;
    std::vector<std::size_t> key(ns + 1), best_key(ns + 1);
    for (const auto& b : grid) {
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < na; ++a) {
            key[0] = a;
            double value = 0.0;
            for (std::size_t h = 0; h < b.size(); ++h) {
                value += b[h] * p.reward(h, a);
            }
            for (std::size_t s = 0; s < ns; ++s) {
                const double* g_k = proj.block(a, s);
                std::size_t best_k = 0;
                double best_g = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < nk; ++k, g_k += nh) {
                    double g = 0.0;
                    for (std::size_t h = 0; h < nh; ++h) {
                        g += g_k[h] * b[h];
                    }
                    if (g > best_g) {
                        best_g = g;
                        best_k = k;
                    }
                }
                key[s + 1] = best_k;
                value += gamma * best_g;
            }
            if (value > best_value) {
                best_value = value;
                best_key = key;
            }
        }
        winners.insert(best_key);
        if (winners.size() > budget) {
            throw BudgetError("backup keeps more than " + std::to_string(budget) + " vectors");
        }
    }
    std::vector<AlphaVector> out;
    out.reserve(winners.size());
    for (const auto& w : winners) {
        out.push_back(assemble(p, proj, w[0], std::span<const std::size_t>(w).subspan(1)));
    }
    return remove_dominated(out);
}

std::size_t default_witness_resolution(std::size_t num_hidden) {
    constexpr std::size_t max_resolution = 200, max_points = 400;
    if (num_hidden <= 1) {
        return max_resolution;
    }
    // Grid size C(r + n - 1, n - 1), grown one denominator at a time.
    const auto points = [num_hidden](std::size_t r) {
        double c = 1.0;
        for (std::size_t k = 1; k < num_hidden; ++k) {
            c = c * static_cast<double>(r + k) / static_cast<double>(k);
        }
        return c;
    };
    std::size_t r = 1;
    while (r < max_resolution && points(r + 1) <= max_points) {
        ++r;
    }
    return r;
}

AlphaVectorPolicy pomdp_value_iteration(const Pomdp& p, const SolveOptions& options) {
    if (options.horizon && *options.horizon == 0) {
        throw DomainError("horizon must be at least 1");
    }
    if (!options.horizon && !(options.epsilon > 0.0)) {
        throw DomainError("epsilon must be positive");
    }
    const std::size_t resolution =
        options.witness_resolution.value_or(default_witness_resolution(p.hidden().size()));
    if (resolution == 0) {
        throw DomainError("witness grid resolution must be positive");
    }
    const auto grid = simplex_grid(p.hidden().size(), resolution);
    const double gamma = p.discount();
    const double stop = options.epsilon * (1.0 - gamma) / gamma;

    std::vector<AlphaVector> current{AlphaVector{std::vector<double>(p.hidden().size(), 0.0), 0}};
    std::size_t backups = 0;
    bool converged = false;
    double change = 0.0;
    double best_change = std::numeric_limits<double>::infinity();
    std::size_t best_at = 0;
    while (backups < options.max_iterations) {
        auto next = options.exhaustive_enumeration
                        ? prune_to_witnesses(enumerate_backup(p, current, options.vector_budget), grid)
                        : witness_backup(p, current, grid, options.vector_budget);
        change = grid_sup_change(current, next, grid);
        current = std::move(next);
        ++backups;
        if (options.horizon) {
            if (backups == *options.horizon) {
                break;
            }
        } else if (change <= stop) {
            converged = true;
            break;
        } else if (change <= 0.5 * best_change) {
            best_change = change;
            best_at = backups;
        } else if (options.stall_window > 0 && backups - best_at >= options.stall_window) {
            break;
        }
    }
    AlphaVectorPolicy policy(p, std::move(current));
    policy.backups = backups;
    policy.converged = converged || options.horizon.has_value();
    policy.last_change = change;
    policy.witness_resolution = resolution;
    return policy;
}

PolicyDecision optimal_policy_at(const AlphaVectorPolicy& policy, const Belief& b) {
    const auto& p = policy.pomdp();
    p.model().check_belief(b);
    const std::size_t nh = p.hidden().size(), na = p.actions().size(), ns = p.sensors().size();
    PolicyDecision decision;
    decision.q_values.resize(na);
    std::vector<double> joint(nh);
    for (std::size_t a = 0; a < na; ++a) {
        double q = 0.0;
        for (std::size_t h = 0; h < nh; ++h) {
            q += b[h] * p.reward(h, a);
        }
        // sum_s max_k sum_h' P(h', s | b, a) alpha_k(h'): the posterior
        // weighted by P(s | b, a), which needs no division.
        for (std::size_t s = 0; s < ns; ++s) {
            std::fill(joint.begin(), joint.end(), 0.0);
            for (std::size_t h = 0; h < nh; ++h) {
                if (b[h] == 0.0) {
                    continue;
                }
                for (std::size_t h2 = 0; h2 < nh; ++h2) {
                    joint[h2] += p.model().kappa(h, a, h2, s) * b[h];
                }
            }
            q += p.discount() * policy.vectors()[policy.best_vector(joint)].dot(joint);
        }
        decision.q_values[a] = q;
        if (a == 0 || q > decision.value) {
            decision.value = q;
            decision.action_index = a;
        }
    }
    decision.action = p.actions()[decision.action_index];
    return decision;
}

std::vector<double> fixed_action_values(const Pomdp& p, std::size_t a, std::optional<std::size_t> horizon) {
    if (a >= p.actions().size()) {
        throw LabelError("action index out of range");
    }
    const std::size_t nh = p.hidden().size(), ns = p.sensors().size();
    std::vector<double> next_state(nh * nh, 0.0);
    for (std::size_t h = 0; h < nh; ++h) {
        for (std::size_t h2 = 0; h2 < nh; ++h2) {
            for (std::size_t s = 0; s < ns; ++s) {
                next_state[h * nh + h2] += p.model().kappa(h, a, h2, s);
            }
        }
    }
    std::vector<double> v(nh, 0.0), w(nh);
    const std::size_t steps = horizon ? *horizon : std::numeric_limits<std::size_t>::max();
    for (std::size_t t = 0; t < steps; ++t) {
        double change = 0.0, scale = 0.0;
        for (std::size_t h = 0; h < nh; ++h) {
            double future = 0.0;
            for (std::size_t h2 = 0; h2 < nh; ++h2) {
                future += next_state[h * nh + h2] * v[h2];
            }
            w[h] = p.reward(h, a) + p.discount() * future;
            change = std::max(change, std::abs(w[h] - v[h]));
            scale = std::max(scale, std::abs(w[h]));
        }
        v.swap(w);
        if (!horizon && change <= 1e-14 * (1.0 + scale)) {
            break;
        }
    }
    return v;
}

}  // namespace agentinterp

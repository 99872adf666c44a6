#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace agentinterp {

using Label = std::string;

// Tolerance on the total mass of every constructed distribution.
inline constexpr double kNormalizationTolerance = 1e-9;
// Two distributions closer than this in total variation are considered equal.
inline constexpr double kDistributionEqualityTolerance = 1e-7;

/// Ordered set of distinct, non-empty labels. Order is significant: it fixes
/// the index of each element and the tie-breaking order used by the solvers.
class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::vector<Label> labels);
    LabelSet(std::initializer_list<Label> labels);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    const Label& operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<Label>& labels() const { return labels_; }
    auto begin() const { return labels_.begin(); }
    auto end() const { return labels_.end(); }

    bool contains(const Label& label) const { return index_.contains(label); }
    /// Throws LabelError when the label is not a member.
    std::size_t index_of(const Label& label) const;

    friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.labels_ == b.labels_; }

private:
    std::vector<Label> labels_;
    std::unordered_map<Label, std::size_t> index_;
};

/// Finitely supported distribution over a LabelSet, stored densely: every
/// label carries a weight, zero weights included.
class FiniteDist {
public:
    FiniteDist(LabelSet labels, std::vector<double> weights);

    static FiniteDist uniform(LabelSet labels);

    const LabelSet& labels() const { return labels_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    double weight(const Label& label) const { return weights_[labels_.index_of(label)]; }

    /// Labels with strictly positive weight, in set order.
    std::vector<Label> support() const;

private:
    LabelSet labels_;
    std::vector<double> weights_;
};

/// Half the L1 distance. Throws DomainError if the label sets differ.
double total_variation(const FiniteDist& a, const FiniteDist& b);

/// Point mass on `x`.
FiniteDist dirac(const Label& x, const LabelSet& over);

/// Distribution over a product `first x second`, row-major in the first factor.
class JointDist {
public:
    JointDist(LabelSet first, LabelSet second, std::vector<double> weights);

    const LabelSet& first() const { return first_; }
    const LabelSet& second() const { return second_; }
    std::span<const double> weights() const { return weights_; }

    double at(std::size_t i, std::size_t j) const { return weights_[i * second_.size() + j]; }
    double at(const Label& y, const Label& z) const;

    FiniteDist marginal_first() const;
    FiniteDist marginal_second() const;
    /// Total mass of the column `second == j`.
    double column_mass(std::size_t j) const;

private:
    LabelSet first_;
    LabelSet second_;
    std::vector<double> weights_;
};

/// Conditioning on an outcome whose marginal probability is zero. Not an
/// error: such observations leave the conditional undefined and unconstrained.
struct ZeroMarginal {
    Label observation;
};

using Conditioned = std::variant<FiniteDist, ZeroMarginal>;

/// Conditional of the first factor given `second == z_obs`.
Conditioned joint_then_condition(const JointDist& joint, const Label& z_obs);
Conditioned joint_then_condition(const JointDist& joint, std::size_t z_index);

/// Markov kernel between labeled sets in tabular form. The domain may be a
/// cartesian product; rows are stored row-major with the last factor varying
/// fastest.
class TabularKernel {
public:
    TabularKernel(std::vector<LabelSet> domain, LabelSet codomain, std::vector<FiniteDist> rows);

    static TabularKernel identity(const LabelSet& set);
    static TabularKernel constant(std::vector<LabelSet> domain, const FiniteDist& row);

    const std::vector<LabelSet>& domain() const { return domain_; }
    const LabelSet& codomain() const { return codomain_; }
    std::size_t row_count() const { return rows_.size(); }

    const FiniteDist& row(std::span<const std::size_t> index) const;
    const FiniteDist& row(const std::vector<Label>& x) const;
    double prob(const Label& y, const std::vector<Label>& x) const { return row(x).weight(y); }

private:
    std::size_t flat_index(std::span<const std::size_t> index) const;

    std::vector<LabelSet> domain_;
    LabelSet codomain_;
    std::vector<FiniteDist> rows_;
};

/// Marginal of `k` under input distribution `d`; `k` must have a single-factor
/// domain equal to the label set of `d`.
FiniteDist pushforward(const TabularKernel& k, const FiniteDist& d);

/// All points of the probability simplex in R^dimension whose coordinates are
/// multiples of 1/denominator, in lexicographically decreasing order of the
/// first coordinates (so the first point is the first vertex).
std::vector<std::vector<double>> simplex_grid(std::size_t dimension, std::size_t denominator);

/// `points` uniformly spaced values k/(points-1) on [0, 1]; points >= 2.
std::vector<double> unit_interval_grid(std::size_t points);

}  // namespace agentinterp

#include "agentinterp/prob.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "agentinterp/errors.hpp"

namespace agentinterp {

namespace {

void check_weights(std::span<const double> weights, const char* what) {
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            std::ostringstream msg;
            msg << what << ": weight " << w << " is negative or non-finite";
            throw ProbabilityError(msg.str());
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": weights sum to " << total;
        throw ProbabilityError(msg.str());
    }
}

}  // namespace

LabelSet::LabelSet(std::vector<Label> labels) : labels_(std::move(labels)) {
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].empty()) {
            throw LabelError("empty label");
        }
        if (!index_.emplace(labels_[i], i).second) {
            throw LabelError("duplicate label '" + labels_[i] + "'");
        }
    }
}

LabelSet::LabelSet(std::initializer_list<Label> labels) : LabelSet(std::vector<Label>(labels)) {}

std::size_t LabelSet::index_of(const Label& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) {
        throw LabelError("unknown label '" + label + "'");
    }
    return it->second;
}

FiniteDist::FiniteDist(LabelSet labels, std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
    if (labels_.empty()) {
        throw LabelError("distribution over an empty set");
    }
    if (weights_.size() != labels_.size()) {
        throw DomainError("distribution has " + std::to_string(weights_.size()) + " weights for " +
                          std::to_string(labels_.size()) + " labels");
    }
    check_weights(weights_, "distribution");
}

FiniteDist FiniteDist::uniform(LabelSet labels) {
    const std::size_t n = labels.size();
    if (n == 0) {
        throw LabelError("distribution over an empty set");
    }
    return FiniteDist(std::move(labels), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::vector<Label> FiniteDist::support() const {
    std::vector<Label> out;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] > 0.0) {
            out.push_back(labels_[i]);
        }
    }
    return out;
}

double total_variation(const FiniteDist& a, const FiniteDist& b) {
    if (!(a.labels() == b.labels())) {
        throw DomainError("total variation between distributions over different sets");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::abs(a[i] - b[i]);
    }
    return 0.5 * sum;
}

FiniteDist dirac(const Label& x, const LabelSet& over) {
    std::vector<double> w(over.size(), 0.0);
    w[over.index_of(x)] = 1.0;
    return FiniteDist(over, std::move(w));
}

JointDist::JointDist(LabelSet first, LabelSet second, std::vector<double> weights)
    : first_(std::move(first)), second_(std::move(second)), weights_(std::move(weights)) {
    if (first_.empty() || second_.empty()) {
        throw LabelError("joint distribution over an empty set");
    }
    if (weights_.size() != first_.size() * second_.size()) {
        throw DomainError("joint distribution weight count does not match the product set");
    }
    check_weights(weights_, "joint distribution");
}

double JointDist::at(const Label& y, const Label& z) const {
    return at(first_.index_of(y), second_.index_of(z));
}

FiniteDist JointDist::marginal_first() const {
    std::vector<double> w(first_.size(), 0.0);
    for (std::size_t i = 0; i < first_.size(); ++i) {
        for (std::size_t j = 0; j < second_.size(); ++j) {
            w[i] += at(i, j);
        }
    }
    return FiniteDist(first_, std::move(w));
}

FiniteDist JointDist::marginal_second() const {
    std::vector<double> w(second_.size(), 0.0);
    for (std::size_t j = 0; j < second_.size(); ++j) {
        w[j] = column_mass(j);
    }
    return FiniteDist(second_, std::move(w));
}

double JointDist::column_mass(std::size_t j) const {
    double mass = 0.0;
    for (std::size_t i = 0; i < first_.size(); ++i) {
        mass += at(i, j);
    }
    return mass;
}

Conditioned joint_then_condition(const JointDist& joint, const Label& z_obs) {
    return joint_then_condition(joint, joint.second().index_of(z_obs));
}

Conditioned joint_then_condition(const JointDist& joint, std::size_t z_index) {
    if (z_index >= joint.second().size()) {
        throw LabelError("observation index out of range");
    }
    const double mass = joint.column_mass(z_index);
    if (!(mass > 0.0)) {
        return ZeroMarginal{joint.second()[z_index]};
    }
    std::vector<double> w(joint.first().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = joint.at(i, z_index) / mass;
    }
    return FiniteDist(joint.first(), std::move(w));
}

TabularKernel::TabularKernel(std::vector<LabelSet> domain, LabelSet codomain, std::vector<FiniteDist> rows)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), rows_(std::move(rows)) {
    if (domain_.empty()) {
        throw DomainError("kernel needs at least one domain factor");
    }
    std::size_t expected = 1;
    for (const auto& factor : domain_) {
        if (factor.empty()) {
            throw LabelError("kernel domain factor is empty");
        }
        expected *= factor.size();
    }
    if (rows_.size() != expected) {
        throw DomainError("kernel has " + std::to_string(rows_.size()) + " rows, domain has " +
                          std::to_string(expected) + " tuples");
    }
    for (const auto& r : rows_) {
        if (!(r.labels() == codomain_)) {
            throw DomainError("kernel row is not over the codomain");
        }
    }
}

TabularKernel TabularKernel::identity(const LabelSet& set) {
    std::vector<FiniteDist> rows;
    rows.reserve(set.size());
    for (const auto& x : set) {
        rows.push_back(dirac(x, set));
    }
    return TabularKernel({set}, set, std::move(rows));
}

TabularKernel TabularKernel::constant(std::vector<LabelSet> domain, const FiniteDist& row) {
    std::size_t n = 1;
    for (const auto& factor : domain) {
        n *= factor.size();
    }
    return TabularKernel(std::move(domain), row.labels(), std::vector<FiniteDist>(n, row));
}

std::size_t TabularKernel::flat_index(std::span<const std::size_t> index) const {
    if (index.size() != domain_.size()) {
        throw DomainError("kernel row index has the wrong arity");
    }
    std::size_t flat = 0;
    for (std::size_t f = 0; f < domain_.size(); ++f) {
        if (index[f] >= domain_[f].size()) {
            throw LabelError("kernel row index out of range");
        }
        flat = flat * domain_[f].size() + index[f];
    }
    return flat;
}

const FiniteDist& TabularKernel::row(std::span<const std::size_t> index) const {
    return rows_[flat_index(index)];
}

const FiniteDist& TabularKernel::row(const std::vector<Label>& x) const {
    if (x.size() != domain_.size()) {
        throw DomainError("kernel row index has the wrong arity");
    }
    std::vector<std::size_t> idx(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
        idx[f] = domain_[f].index_of(x[f]);
    }
    return row(idx);
}

FiniteDist pushforward(const TabularKernel& k, const FiniteDist& d) {
    if (k.domain().size() != 1 || !(k.domain().front() == d.labels())) {
        throw DomainError("pushforward: distribution is not over the kernel's domain");
    }
    std::vector<double> w(k.codomain().size(), 0.0);
    for (std::size_t x = 0; x < d.size(); ++x) {
        if (d[x] == 0.0) {
            continue;
        }
        const std::size_t idx[] = {x};
        const auto& r = k.row(idx);
        for (std::size_t y = 0; y < w.size(); ++y) {
            w[y] += r[y] * d[x];
        }
    }
    return FiniteDist(k.codomain(), std::move(w));
}

namespace {

void fill_simplex(std::size_t dimension, std::size_t remaining, std::size_t denominator,
                  std::vector<std::size_t>& counts, std::vector<std::vector<double>>& out) {
    const std::size_t pos = counts.size();
    if (pos + 1 == dimension) {
        counts.push_back(remaining);
        std::vector<double> point(dimension);
        for (std::size_t i = 0; i < dimension; ++i) {
            point[i] = static_cast<double>(counts[i]) / static_cast<double>(denominator);
        }
        out.push_back(std::move(point));
        counts.pop_back();
        return;
    }
    for (std::size_t c = remaining + 1; c-- > 0;) {
        counts.push_back(c);
        fill_simplex(dimension, remaining - c, denominator, counts, out);
        counts.pop_back();
    }
}

}  // namespace

std::vector<std::vector<double>> simplex_grid(std::size_t dimension, std::size_t denominator) {
    if (dimension == 0 || denominator == 0) {
        throw DomainError("simplex grid needs a positive dimension and denominator");
    }
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> counts;
    counts.reserve(dimension);
    fill_simplex(dimension, denominator, denominator, counts, out);
    return out;
}

std::vector<double> unit_interval_grid(std::size_t points) {
    if (points < 2) {
        throw DomainError("unit interval grid needs at least two points");
    }
    std::vector<double> out(points);
    for (std::size_t k = 0; k < points; ++k) {
        out[k] = static_cast<double>(k) / static_cast<double>(points - 1);
    }
    return out;
}

}  // namespace agentinterp

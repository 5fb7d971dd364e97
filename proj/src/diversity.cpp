#include "divmbest/diversity.hpp"

#include <algorithm>
#include <cmath>

#include "divmbest/errors.hpp"

namespace divmbest {

namespace {

void validate_weights(const std::vector<std::vector<double>>& w)
{
    const std::size_t L = w.size();
    if (L == 0) throw InvalidArgument("diversity weight matrix is empty");
    for (std::size_t a = 0; a < L; ++a) {
        if (w[a].size() != L) throw InvalidArgument("diversity weight matrix is not square");
    }
    for (std::size_t a = 0; a < L; ++a) {
        if (w[a][a] != 0.0) throw InvalidArgument("diversity weight matrix must have a zero diagonal");
        for (std::size_t b = 0; b < L; ++b) {
            if (!std::isfinite(w[a][b]) || w[a][b] < 0.0) {
                throw InvalidArgument("diversity weights must be finite and nonnegative");
            }
            if (w[a][b] != w[b][a]) throw InvalidArgument("diversity weight matrix is not symmetric");
        }
    }
}

}  // namespace

DiversityFn::DiversityFn(DiversityKind kind, std::optional<std::vector<std::vector<double>>> w)
    : kind_(kind), w_(std::move(w))
{
    if (w_) validate_weights(*w_);
}

DiversityFn DiversityFn::zero_one() { return {DiversityKind::ZeroOne, std::nullopt}; }
DiversityFn DiversityFn::hamming() { return {DiversityKind::WeightedHamming, std::nullopt}; }
DiversityFn DiversityFn::weighted_hamming(std::vector<std::vector<double>> w)
{
    return {DiversityKind::WeightedHamming, std::move(w)};
}
DiversityFn DiversityFn::node_max(std::optional<std::vector<std::vector<double>>> w)
{
    return {DiversityKind::NodeMax, std::move(w)};
}
DiversityFn DiversityFn::cardinality() { return {DiversityKind::Cardinality, std::nullopt}; }

DiversityFn DiversityFn::from_name(const std::string& name)
{
    if (name == "hamming") return hamming();
    if (name == "zeroone") return zero_one();
    if (name == "nodemax") return node_max();
    if (name == "hop") return cardinality();
    throw InvalidArgument("unknown diversity '" + name + "' (expected hamming|zeroone|nodemax|hop)");
}

std::string DiversityFn::name() const
{
    switch (kind_) {
    case DiversityKind::ZeroOne: return "zeroone";
    case DiversityKind::WeightedHamming: return "hamming";
    case DiversityKind::NodeMax: return "nodemax";
    case DiversityKind::Cardinality: return "hop";
    }
    return "unknown";
}

double DiversityFn::node_term(Label a, Label b) const
{
    if (!w_) return a == b ? 0.0 : 1.0;
    const auto L = static_cast<Label>(w_->size());
    if (a < 0 || b < 0 || a >= L || b >= L) {
        throw DimensionMismatch("label outside the diversity weight matrix");
    }
    return (*w_)[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

double DiversityFn::max_node_term() const
{
    if (!w_) return 1.0;
    double m = 0.0;
    for (const auto& row : *w_) m = std::max(m, *std::max_element(row.begin(), row.end()));
    return m;
}

double DiversityFn::similarity_offset(std::size_t num_nodes) const
{
    switch (kind_) {
    case DiversityKind::ZeroOne: return 1.0;
    case DiversityKind::WeightedHamming: return static_cast<double>(num_nodes) * max_node_term();
    case DiversityKind::NodeMax: return max_node_term();
    case DiversityKind::Cardinality: return 0.0;
    }
    return 0.0;
}

std::size_t foreground_count(const Labeling& x)
{
    return static_cast<std::size_t>(std::count(x.begin(), x.end(), 1));
}

double diversity(const DiversityFn& delta, const Labeling& x, const Labeling& y)
{
    if (x.size() != y.size()) {
        throw DimensionMismatch("labelings of different length (" + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
    }
    switch (delta.kind()) {
    case DiversityKind::ZeroOne: return x == y ? 0.0 : 1.0;
    case DiversityKind::WeightedHamming: {
        double total = 0.0;
        for (std::size_t s = 0; s < x.size(); ++s) total += delta.node_term(x[s], y[s]);
        return total;
    }
    case DiversityKind::NodeMax: {
        double best = 0.0;
        for (std::size_t s = 0; s < x.size(); ++s) best = std::max(best, delta.node_term(x[s], y[s]));
        return best;
    }
    case DiversityKind::Cardinality: {
        const auto cx = static_cast<double>(foreground_count(x));
        const auto cy = static_cast<double>(foreground_count(y));
        return cx >= cy ? (cx - cy) * (cx - cy) : 0.0;
    }
    }
    return 0.0;
}

double similarity(const DiversityFn& delta, const Labeling& x, const Labeling& y)
{
    return delta.similarity_offset(x.size()) - diversity(delta, x, y);
}

}  // namespace divmbest

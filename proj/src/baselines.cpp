#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "divmbest/divmbest.hpp"
#include "divmbest/errors.hpp"
#include "divmbest/random.hpp"

namespace divmbest {

namespace {

// Nodes that have a next-best label, with that label.
std::vector<std::pair<NodeId, Label>> changeable(const DiscreteMRF& mrf, const Labeling& map,
                                                 const MinMarginalTable& mm, std::size_t d)
{
    validate_labeling(mrf, map);
    if (mm.values.size() != mrf.num_nodes()) throw DimensionMismatch("min-marginal table has the wrong node count");
    if (d > mrf.num_nodes()) {
        throw InvalidArgument("perturbation budget " + std::to_string(d) + " exceeds the " +
                              std::to_string(mrf.num_nodes()) + " nodes");
    }
    std::vector<std::pair<NodeId, Label>> out;
    for (NodeId s = 0; s < mrf.num_nodes(); ++s) {
        if (auto j = next_best_label(mm, s, map[s])) out.emplace_back(s, *j);
    }
    if (d > out.size()) {
        throw InvalidArgument("perturbation budget " + std::to_string(d) + " exceeds the " +
                              std::to_string(out.size()) + " nodes that have an alternative label");
    }
    return out;
}

}  // namespace

std::optional<Label> next_best_label(const MinMarginalTable& mm, NodeId s, Label current)
{
    std::optional<Label> best;
    double value = 0.0;
    const auto& row = mm.values.at(s);
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (static_cast<Label>(j) == current || !std::isfinite(row[j])) continue;
        if (!best || row[j] < value) {
            best = static_cast<Label>(j);
            value = row[j];
        }
    }
    return best;
}

double min_marginal_entropy(const std::vector<double>& row)
{
    double lo = std::numeric_limits<double>::infinity();
    for (double v : row) lo = std::min(lo, v);
    if (!std::isfinite(lo)) return 0.0;
    double z = 0.0;
    for (double v : row) {
        if (std::isfinite(v)) z += std::exp(-(v - lo));
    }
    double h = 0.0;
    for (double v : row) {
        if (!std::isfinite(v)) continue;
        const double p = std::exp(-(v - lo)) / z;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

Labeling baseline_random_perturb(const DiscreteMRF& mrf, const Labeling& map, std::size_t d, std::uint64_t seed,
                                 const MinMarginalTable& mm)
{
    auto nodes = changeable(mrf, map, mm, d);
    Rng rng(seed);
    Labeling out = map;
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.index(nodes.size() - i));
        std::swap(nodes[i], nodes[j]);
        out[nodes[i].first] = nodes[i].second;
    }
    return out;
}

Labeling baseline_confidence_perturb(const DiscreteMRF& mrf, const Labeling& map, std::size_t d,
                                     const MinMarginalTable& mm)
{
    auto nodes = changeable(mrf, map, mm, d);
    std::vector<double> entropy(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) entropy[i] = min_marginal_entropy(mm.values[nodes[i].first]);
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return entropy[a] > entropy[b]; });
    Labeling out = map;
    for (std::size_t i = 0; i < d; ++i) out[nodes[order[i]].first] = nodes[order[i]].second;
    return out;
}

}  // namespace divmbest

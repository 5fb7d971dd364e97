#include "divmbest/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "divmbest/errors.hpp"

namespace divmbest {

namespace {

std::string edge_name(NodeId u, NodeId v)
{
    return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

}  // namespace

DiscreteMRF::DiscreteMRF(std::vector<std::vector<double>> unaries, std::vector<EdgeSpec> edges)
{
    const std::size_t n = unaries.size();
    label_counts_.reserve(n);
    offsets_.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (unaries[s].empty()) {
            throw InvalidModel("node " + std::to_string(s) + " has an empty label space");
        }
        offsets_.push_back(unaries_.size());
        label_counts_.push_back(static_cast<int>(unaries[s].size()));
        for (double value : unaries[s]) {
            if (!std::isfinite(value)) {
                throw InvalidModel("non-finite unary energy at node " + std::to_string(s));
            }
            unaries_.push_back(value);
        }
    }

    std::vector<Edge> stored;
    stored.reserve(edges.size());
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto& spec : edges) {
        if (spec.u >= n || spec.v >= n) {
            throw InvalidModel("edge " + edge_name(spec.u, spec.v) + " references a missing node");
        }
        if (spec.u == spec.v) {
            throw InvalidModel("self-loop on node " + std::to_string(spec.u));
        }
        const int ku = label_counts_[spec.u];
        const int kv = label_counts_[spec.v];
        if (spec.table.size() != static_cast<std::size_t>(ku) * static_cast<std::size_t>(kv)) {
            throw InvalidModel("pairwise table of edge " + edge_name(spec.u, spec.v) +
                               " does not match the endpoint label counts");
        }
        for (double value : spec.table) {
            if (!std::isfinite(value)) {
                throw InvalidModel("non-finite pairwise energy on edge " + edge_name(spec.u, spec.v));
            }
        }
        Edge e;
        if (spec.u < spec.v) {
            e = Edge{spec.u, spec.v, ku, kv, std::move(spec.table)};
        } else {
            // store transposed so the lower id is always the row index
            std::vector<double> t(spec.table.size());
            for (int a = 0; a < ku; ++a) {
                for (int b = 0; b < kv; ++b) {
                    t[static_cast<std::size_t>(b) * ku + a] = spec.table[static_cast<std::size_t>(a) * kv + b];
                }
            }
            e = Edge{spec.v, spec.u, kv, ku, std::move(t)};
        }
        if (!seen.emplace(e.u, e.v).second) {
            throw InvalidModel("duplicate edge " + edge_name(e.u, e.v));
        }
        stored.push_back(std::move(e));
    }

    std::vector<std::vector<std::size_t>> adjacency(n);
    for (std::size_t i = 0; i < stored.size(); ++i) {
        adjacency[stored[i].u].push_back(i);
        adjacency[stored[i].v].push_back(i);
    }
    edges_ = std::make_shared<const std::vector<Edge>>(std::move(stored));
    adjacency_ = std::make_shared<const std::vector<std::vector<std::size_t>>>(std::move(adjacency));
}

int DiscreteMRF::max_labels() const
{
    int k = 0;
    for (int c : label_counts_) k = std::max(k, c);
    return k;
}

bool DiscreteMRF::is_binary() const
{
    return std::all_of(label_counts_.begin(), label_counts_.end(), [](int k) { return k == 2; });
}

std::uint64_t DiscreteMRF::state_space_size(std::uint64_t cap) const
{
    std::uint64_t size = 1;
    for (int k : label_counts_) {
        if (size > cap / static_cast<std::uint64_t>(k)) return cap + 1;
        size *= static_cast<std::uint64_t>(k);
    }
    return size;
}

void validate_labeling(const DiscreteMRF& mrf, const Labeling& x)
{
    if (x.size() != mrf.num_nodes()) {
        throw InvalidLabeling("labeling has " + std::to_string(x.size()) + " entries, model has " +
                              std::to_string(mrf.num_nodes()) + " nodes");
    }
    for (std::size_t s = 0; s < x.size(); ++s) {
        if (x[s] < 0 || x[s] >= mrf.num_labels(s)) {
            throw InvalidLabeling("label " + std::to_string(x[s]) + " out of range at node " + std::to_string(s));
        }
    }
}

double energy(const DiscreteMRF& mrf, const Labeling& x)
{
    validate_labeling(mrf, x);
    double total = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) total += mrf.unary(s, x[s]);
    for (const auto& e : mrf.edges()) total += e.at(x[e.u], x[e.v]);
    return total;
}

IndicatorVector to_indicator(const DiscreteMRF& mrf, const Labeling& x)
{
    validate_labeling(mrf, x);
    IndicatorVector mu;
    mu.nodes.resize(mrf.num_nodes());
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
        mu.nodes[s].assign(static_cast<std::size_t>(mrf.num_labels(s)), 0.0);
        mu.nodes[s][static_cast<std::size_t>(x[s])] = 1.0;
    }
    mu.edges.reserve(mrf.num_edges());
    for (const auto& e : mrf.edges()) {
        std::vector<double> block(e.table.size(), 0.0);
        block[static_cast<std::size_t>(x[e.u]) * e.kv + x[e.v]] = 1.0;
        mu.edges.push_back(std::move(block));
    }
    return mu;
}

Labeling from_indicator(const DiscreteMRF& mrf, const IndicatorVector& mu)
{
    if (mu.nodes.size() != mrf.num_nodes() || mu.edges.size() != mrf.num_edges()) {
        throw DimensionMismatch("indicator vector does not match the model");
    }
    auto is_binary_value = [](double v) { return v == 0.0 || v == 1.0; };

    Labeling x(mrf.num_nodes(), 0);
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
        const auto& block = mu.nodes[s];
        if (block.size() != static_cast<std::size_t>(mrf.num_labels(s))) {
            throw DimensionMismatch("indicator block of node " + std::to_string(s) + " has the wrong size");
        }
        int ones = 0;
        for (std::size_t j = 0; j < block.size(); ++j) {
            if (!is_binary_value(block[j])) {
                throw NotIntegral("fractional node entry at node " + std::to_string(s));
            }
            if (block[j] == 1.0) {
                ++ones;
                x[s] = static_cast<Label>(j);
            }
        }
        if (ones != 1) {
            throw NotIntegral("node " + std::to_string(s) + " block sums to " + std::to_string(ones));
        }
    }
    for (std::size_t i = 0; i < mrf.num_edges(); ++i) {
        const auto& e = mrf.edge(i);
        const auto& block = mu.edges[i];
        if (block.size() != e.table.size()) {
            throw DimensionMismatch("indicator block of edge " + edge_name(e.u, e.v) + " has the wrong size");
        }
        for (int a = 0; a < e.ku; ++a) {
            for (int b = 0; b < e.kv; ++b) {
                const double v = block[static_cast<std::size_t>(a) * e.kv + b];
                if (!is_binary_value(v)) {
                    throw NotIntegral("fractional edge entry on edge " + edge_name(e.u, e.v));
                }
                const double expected = (a == x[e.u] && b == x[e.v]) ? 1.0 : 0.0;
                if (v != expected) {
                    throw NotIntegral("edge block " + edge_name(e.u, e.v) +
                                      " is inconsistent with its node marginals");
                }
            }
        }
    }
    return x;
}

double linear_energy(const DiscreteMRF& mrf, const IndicatorVector& mu)
{
    if (mu.nodes.size() != mrf.num_nodes() || mu.edges.size() != mrf.num_edges()) {
        throw DimensionMismatch("indicator vector does not match the model");
    }
    double total = 0.0;
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
        const auto th = mrf.unary(s);
        if (mu.nodes[s].size() != th.size()) throw DimensionMismatch("node block size mismatch");
        for (std::size_t j = 0; j < th.size(); ++j) total += th[j] * mu.nodes[s][j];
    }
    for (std::size_t i = 0; i < mrf.num_edges(); ++i) {
        const auto& table = mrf.edge(i).table;
        if (mu.edges[i].size() != table.size()) throw DimensionMismatch("edge block size mismatch");
        for (std::size_t j = 0; j < table.size(); ++j) total += table[j] * mu.edges[i][j];
    }
    return total;
}

DiscreteMRF augment_unaries(const DiscreteMRF& mrf, const std::vector<std::vector<double>>& penalties)
{
    if (penalties.size() != mrf.num_nodes()) {
        throw DimensionMismatch("penalty table has " + std::to_string(penalties.size()) + " rows, model has " +
                                std::to_string(mrf.num_nodes()) + " nodes");
    }
    DiscreteMRF out = mrf;
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
        if (penalties[s].size() != static_cast<std::size_t>(mrf.num_labels(s))) {
            throw DimensionMismatch("penalty row " + std::to_string(s) + " does not match the label count");
        }
        for (std::size_t j = 0; j < penalties[s].size(); ++j) {
            const double v = out.unaries_[out.offsets_[s] + j] + penalties[s][j];
            if (!std::isfinite(v)) throw InvalidModel("augmented unary is not finite");
            out.unaries_[out.offsets_[s] + j] = v;
        }
    }
    return out;
}

std::vector<std::vector<double>> zero_penalties(const DiscreteMRF& mrf)
{
    std::vector<std::vector<double>> p(mrf.num_nodes());
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) p[s].assign(static_cast<std::size_t>(mrf.num_labels(s)), 0.0);
    return p;
}

}  // namespace divmbest

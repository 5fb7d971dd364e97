#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

namespace divmbest {

using NodeId = std::size_t;
using Label = int;

// Assignment of one label per node.
class Labeling {
public:
    Labeling() = default;
    explicit Labeling(std::vector<Label> labels) : labels_(std::move(labels)) {}
    Labeling(std::initializer_list<Label> labels) : labels_(labels) {}
    Labeling(std::size_t n, Label fill) : labels_(n, fill) {}

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    Label operator[](std::size_t s) const { return labels_[s]; }
    Label& operator[](std::size_t s) { return labels_[s]; }

    auto begin() const { return labels_.begin(); }
    auto end() const { return labels_.end(); }
    auto begin() { return labels_.begin(); }
    auto end() { return labels_.end(); }

    const std::vector<Label>& values() const { return labels_; }

    friend bool operator==(const Labeling&, const Labeling&) = default;
    friend auto operator<=>(const Labeling&, const Labeling&) = default;

private:
    std::vector<Label> labels_;
};

// Input description of a pairwise term. `table` is row-major k_u x k_v and is
// indexed table[a * k_v + b] for x_u = a, x_v = b.
struct EdgeSpec {
    NodeId u = 0;
    NodeId v = 0;
    std::vector<double> table;
};

// Stored pairwise term, normalized so that u < v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    int ku = 0;
    int kv = 0;
    std::vector<double> table;

    double at(Label a, Label b) const { return table[static_cast<std::size_t>(a) * kv + b]; }
};

// Pairwise discrete MRF with energy
//   E(x) = sum_s theta_s(x_s) + sum_{(s,t)} theta_st(x_s, x_t).
// Immutable once constructed. Edge storage is shared between a model and the
// models derived from it by augment_unaries.
class DiscreteMRF {
public:
    DiscreteMRF() = default;
    DiscreteMRF(std::vector<std::vector<double>> unaries, std::vector<EdgeSpec> edges);

    std::size_t num_nodes() const { return label_counts_.size(); }
    std::size_t num_edges() const { return edges_->size(); }
    int num_labels(NodeId s) const { return label_counts_[s]; }
    int max_labels() const;
    const std::vector<int>& label_counts() const { return label_counts_; }

    std::span<const double> unary(NodeId s) const
    {
        return {unaries_.data() + offsets_[s], static_cast<std::size_t>(label_counts_[s])};
    }
    double unary(NodeId s, Label j) const { return unaries_[offsets_[s] + j]; }

    const std::vector<Edge>& edges() const { return *edges_; }
    const Edge& edge(std::size_t e) const { return (*edges_)[e]; }
    // Edge indices incident to node s.
    const std::vector<std::size_t>& incident(NodeId s) const { return (*adjacency_)[s]; }

    bool is_binary() const;
    // Product of label counts, saturating at `cap + 1`.
    std::uint64_t state_space_size(std::uint64_t cap) const;

    bool shares_edges_with(const DiscreteMRF& other) const { return edges_ == other.edges_; }

private:
    friend DiscreteMRF augment_unaries(const DiscreteMRF&, const std::vector<std::vector<double>>&);

    std::vector<int> label_counts_;
    std::vector<std::size_t> offsets_;
    std::vector<double> unaries_;
    std::shared_ptr<const std::vector<Edge>> edges_ = std::make_shared<const std::vector<Edge>>();
    std::shared_ptr<const std::vector<std::vector<std::size_t>>> adjacency_ =
        std::make_shared<const std::vector<std::vector<std::size_t>>>();
};

// Overcomplete 0/1 encoding of a labeling: one block per node and one
// k_u x k_v block per edge (edge order as in DiscreteMRF::edges()).
struct IndicatorVector {
    std::vector<std::vector<double>> nodes;
    std::vector<std::vector<double>> edges;
};

// Throws InvalidLabeling unless x has one in-range label per node.
void validate_labeling(const DiscreteMRF& mrf, const Labeling& x);

double energy(const DiscreteMRF& mrf, const Labeling& x);

IndicatorVector to_indicator(const DiscreteMRF& mrf, const Labeling& x);
Labeling from_indicator(const DiscreteMRF& mrf, const IndicatorVector& mu);

// <theta, mu>, summed in the same order as energy().
double linear_energy(const DiscreteMRF& mrf, const IndicatorVector& mu);

// theta'_s(j) = theta_s(j) + penalties[s][j]; the pairwise terms are shared.
DiscreteMRF augment_unaries(const DiscreteMRF& mrf, const std::vector<std::vector<double>>& penalties);

// Zero-filled table shaped like the unaries of `mrf`.
std::vector<std::vector<double>> zero_penalties(const DiscreteMRF& mrf);

}  // namespace divmbest

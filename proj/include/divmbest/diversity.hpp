#pragma once

#include <optional>
#include <string>
#include <vector>

#include "divmbest/mrf.hpp"

namespace divmbest {

enum class DiversityKind { ZeroOne, WeightedHamming, NodeMax, Cardinality };

// Dissimilarity between two labelings, reported as a nonnegative distance.
//
//   ZeroOne          [x != y]
//   WeightedHamming  sum_s W[x_s][y_s]; without an explicit W this is the
//                    plain Hamming distance (W = 1 - I)
//   NodeMax          max_s W[x_s][y_s] (W defaults to 1 - I)
//   Cardinality      (#x - #y)^2 if #x >= #y else 0, # = number of label-1 nodes
//
// W must be square, symmetric, nonnegative, with a zero diagonal.
class DiversityFn {
public:
    static DiversityFn zero_one();
    static DiversityFn hamming();
    static DiversityFn weighted_hamming(std::vector<std::vector<double>> w);
    static DiversityFn node_max(std::optional<std::vector<std::vector<double>>> w = std::nullopt);
    static DiversityFn cardinality();

    static DiversityFn from_name(const std::string& name);

    DiversityKind kind() const { return kind_; }
    const std::optional<std::vector<std::vector<double>>>& weights() const { return w_; }

    // Per-node dissimilarity W[a][b] (1 - I when no matrix is set).
    double node_term(Label a, Label b) const;
    // Largest node_term value.
    double max_node_term() const;

    // Constant c such that similarity = c - diversity is the term the
    // Lagrangian adds per previous solution; for node-decomposable kinds it
    // is nonnegative node by node.
    double similarity_offset(std::size_t num_nodes) const;

    std::string name() const;

private:
    DiversityFn(DiversityKind kind, std::optional<std::vector<std::vector<double>>> w);

    DiversityKind kind_;
    std::optional<std::vector<std::vector<double>>> w_;
};

double diversity(const DiversityFn& delta, const Labeling& x, const Labeling& y);

// similarity_offset - diversity
double similarity(const DiversityFn& delta, const Labeling& x, const Labeling& y);

// Number of nodes labeled 1.
std::size_t foreground_count(const Labeling& x);

}  // namespace divmbest

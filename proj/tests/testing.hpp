#pragma once

// Shared fixtures, random model generators and exhaustive oracles for the
// test suites. The oracles here only use DiscreteMRF accessors and energy(),
// never the solvers they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "divmbest/mrf.hpp"

namespace divmbest::testing {

// Two binary nodes, one edge:
//   theta_0 = [0,1], theta_1 = [0,1], theta_01 = [[0,2],[2,0]]
inline DiscreteMRF c2()
{
    return DiscreteMRF({{0.0, 1.0}, {0.0, 1.0}}, {{0, 1, {0.0, 2.0, 2.0, 0.0}}});
}

inline std::vector<double> random_table(std::mt19937_64& rng, std::size_t size, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> t(size);
    for (auto& v : t) v = dist(rng);
    return t;
}

inline std::vector<std::vector<double>> random_unaries(std::mt19937_64& rng, const std::vector<int>& labels, double lo,
                                                       double hi)
{
    std::vector<std::vector<double>> u;
    for (int k : labels) u.push_back(random_table(rng, static_cast<std::size_t>(k), lo, hi));
    return u;
}

// Random spanning tree (random parent among earlier nodes, shuffled ids).
inline DiscreteMRF random_tree(std::mt19937_64& rng, std::size_t n, int max_labels)
{
    std::uniform_int_distribution<int> kdist(2, max_labels);
    std::vector<int> labels(n);
    for (auto& k : labels) k = kdist(rng);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<EdgeSpec> edges;
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pdist(0, i - 1);
        const std::size_t u = perm[pdist(rng)], v = perm[i];
        edges.push_back({u, v, random_table(rng, static_cast<std::size_t>(labels[u] * labels[v]), -2.0, 2.0)});
    }
    return DiscreteMRF(random_unaries(rng, labels, -2.0, 2.0), std::move(edges));
}

inline std::vector<std::pair<std::size_t, std::size_t>> grid_edges(std::size_t w, std::size_t h)
{
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t i = r * w + c;
            if (c + 1 < w) e.emplace_back(i, i + 1);
            if (r + 1 < h) e.emplace_back(i, i + w);
        }
    }
    return e;
}

// Binary grid with random submodular pairwise tables.
inline DiscreteMRF random_submodular_grid(std::mt19937_64& rng, std::size_t w, std::size_t h)
{
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.0, 2.0);
    std::vector<EdgeSpec> edges;
    for (auto [u, v] : grid_edges(w, h)) {
        const double a = dist(rng), b = dist(rng), c = dist(rng);
        // d chosen so that a + d <= b + c
        const double d = b + c - a - pos(rng);
        edges.push_back({u, v, {a, b, c, d}});
    }
    std::vector<int> labels(w * h, 2);
    return DiscreteMRF(random_unaries(rng, labels, -2.0, 2.0), std::move(edges));
}

// k-label Potts grid with unaries in [0, unary_scale] and weights in [0, 1].
inline DiscreteMRF random_potts_grid(std::mt19937_64& rng, std::size_t w, std::size_t h, int k, double unary_scale)
{
    std::uniform_real_distribution<double> wdist(0.0, 1.0);
    std::vector<EdgeSpec> edges;
    for (auto [u, v] : grid_edges(w, h)) {
        const double weight = wdist(rng);
        std::vector<double> t(static_cast<std::size_t>(k * k), weight);
        for (int a = 0; a < k; ++a) t[static_cast<std::size_t>(a * k + a)] = 0.0;
        edges.push_back({u, v, std::move(t)});
    }
    std::vector<int> labels(w * h, k);
    return DiscreteMRF(random_unaries(rng, labels, 0.0, unary_scale), std::move(edges));
}

// Random binary model on an arbitrary (possibly loopy) random graph.
inline DiscreteMRF random_binary_graph(std::mt19937_64& rng, std::size_t n, double edge_prob)
{
    std::bernoulli_distribution coin(edge_prob);
    std::vector<EdgeSpec> edges;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (coin(rng)) edges.push_back({u, v, random_table(rng, 4, -1.0, 1.0)});
        }
    }
    std::vector<int> labels(n, 2);
    return DiscreteMRF(random_unaries(rng, labels, -1.0, 1.0), std::move(edges));
}

// Calls visit(x) for every labeling of the model.
inline void for_each_labeling(const DiscreteMRF& mrf, const std::function<void(const Labeling&)>& visit)
{
    const std::size_t n = mrf.num_nodes();
    Labeling x(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t s) {
        if (s == n) {
            visit(x);
            return;
        }
        for (int j = 0; j < mrf.num_labels(s); ++j) {
            x[s] = j;
            rec(s + 1);
        }
    };
    rec(0);
}

struct Scored {
    Labeling x;
    double energy;
};

// All labelings sorted by energy (ties: lexicographic), satisfying `keep`.
inline std::vector<Scored> all_sorted(const DiscreteMRF& mrf,
                                      const std::function<bool(const Labeling&)>& keep = nullptr)
{
    std::vector<Scored> all;
    for_each_labeling(mrf, [&](const Labeling& x) {
        if (!keep || keep(x)) all.push_back({x, energy(mrf, x)});
    });
    std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.energy < b.energy; });
    return all;
}

inline double min_energy(const DiscreteMRF& mrf, const std::function<bool(const Labeling&)>& keep = nullptr)
{
    double best = std::numeric_limits<double>::infinity();
    for_each_labeling(mrf, [&](const Labeling& x) {
        if (!keep || keep(x)) best = std::min(best, energy(mrf, x));
    });
    return best;
}

inline std::size_t hamming(const Labeling& a, const Labeling& b)
{
    std::size_t d = 0;
    for (std::size_t s = 0; s < a.size(); ++s) d += a[s] != b[s] ? 1 : 0;
    return d;
}

}  // namespace divmbest::testing

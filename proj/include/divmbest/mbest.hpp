#pragma once

#include <optional>
#include <vector>

#include "divmbest/constraints.hpp"
#include "divmbest/inference.hpp"
#include "divmbest/solutions.hpp"

namespace divmbest {

// Lawler-style enumeration of labelings in increasing energy. Each open
// subproblem is a constraint set together with its best labeling; popping
// the best one splits the rest of its feasible set into disjoint children
//
//   child i:  x_0 = y_0, ..., x_{i-1} = y_{i-1}, x_i != y_i
//
// where y is the popped labeling. The solver must be exact under unary
// constraints.
class LawlerEnumerator {
public:
    LawlerEnumerator(const DiscreteMRF& mrf, const MapSolver& solver);

    // Next labeling, or nullopt once the state space is exhausted.
    std::optional<MapResult> next();

    // Constraint sets of the subproblems that are still open. Together they
    // cover every labeling not yet returned, without overlap.
    std::vector<ConstraintSet> open_partitions() const;

    std::size_t returned() const { return returned_; }

private:
    struct Entry {
        ConstraintSet constraints;
        MapResult best;
        std::size_t order = 0;
    };

    void push(ConstraintSet constraints);

    const DiscreteMRF* mrf_;
    const MapSolver* solver_;
    std::vector<Entry> pool_;
    std::size_t inserted_ = 0;
    std::size_t returned_ = 0;
};

SolutionSet lawler_mbest(const DiscreteMRF& mrf, std::size_t m, const MapSolver& solver);

struct BmmfTriple {
    NodeId node = 0;
    Label label = 0;
    std::size_t source = 0;  // index of the partition that was split

    friend bool operator==(const BmmfTriple&, const BmmfTriple&) = default;
};

struct BmmfResult {
    SolutionSet set;
    // Final constraint set of every partition (solution m lies in set m).
    std::vector<ConstraintSet> constraints;
    std::vector<BmmfTriple> used;
    std::size_t min_marginal_calls = 0;
};

// Best min-marginal first, energy domain: partition k keeps its constraint
// set and min-marginal table; each step picks the smallest table entry
// (i, j, k) with j != x_i^(k), ties broken by smallest (k, i, j).
BmmfResult bmmf_run(const DiscreteMRF& mrf, std::size_t m, const MapSolver& solver);
SolutionSet bmmf(const DiscreteMRF& mrf, std::size_t m, const MapSolver& solver);

}  // namespace divmbest

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "divmbest/constraints.hpp"
#include "divmbest/mrf.hpp"

namespace divmbest {

// Energies closer than this are treated as tied; ties are broken by the
// lexicographically smaller labeling.
inline constexpr double kEnergyTolerance = 1e-9;

inline constexpr std::uint64_t kDefaultStateSpaceCap = std::uint64_t{1} << 24;

struct MapResult {
    Labeling labeling;
    double energy = 0.0;
};

// Total order used by every enumeration routine: energy first (with
// kEnergyTolerance), then lexicographic labeling.
bool ranks_before(double energy_a, const Labeling& a, double energy_b, const Labeling& b);
inline bool ranks_before(const MapResult& a, const MapResult& b)
{
    return ranks_before(a.energy, a.labeling, b.energy, b.labeling);
}

// m[s][j] = min energy over labelings with x_s = j. Labels excluded by the
// constraints the table was computed under hold +infinity.
struct MinMarginalTable {
    std::vector<std::vector<double>> values;
};

// --- exhaustive enumeration --------------------------------------------------

MapResult brute_force_map(const DiscreteMRF& mrf, const ConstraintSet& constraints = {},
                          std::uint64_t cap = kDefaultStateSpaceCap);

// The M lowest-energy labelings in ranks_before order.
std::vector<MapResult> brute_force_top_m(const DiscreteMRF& mrf, std::size_t m,
                                         std::uint64_t cap = kDefaultStateSpaceCap);

// --- forests -----------------------------------------------------------------

// Throws NotATree if the edge set contains a cycle.
void require_forest(const DiscreteMRF& mrf);

// Min-sum dynamic programming with traceback.
MapResult tree_map(const DiscreteMRF& mrf);
// Two-pass min-sum message passing.
MinMarginalTable tree_min_marginals(const DiscreteMRF& mrf);

// --- graph cuts --------------------------------------------------------------

// Throws NotBinary / NotSubmodular (naming the offending edge).
void require_binary_submodular(const DiscreteMRF& mrf);

// Exact MAP of a binary submodular model via s-t min cut. Nodes that are
// free in the minimum cut take label 0.
MapResult graphcut_map(const DiscreteMRF& mrf);

// --- expansion moves ---------------------------------------------------------

// Throws NonMetric unless every expansion move is submodular, i.e. for all
// alpha, beta, gamma: theta(a,a) + theta(b,g) <= theta(b,a) + theta(a,g).
// Metric tables (Potts, truncated linear, ...) always pass.
void require_expansion_metric(const DiscreteMRF& mrf);

struct ExpansionResult {
    Labeling labeling;
    double energy = 0.0;
    int sweeps = 0;
    // Energy after the initial labeling and after every accepted move.
    std::vector<double> energy_trace;
};

ExpansionResult alpha_expansion(const DiscreteMRF& mrf, const Labeling& init, int max_sweeps = 100);

// --- solver abstraction ------------------------------------------------------

// MAP oracle usable under unary label constraints. Reported energies are
// always evaluated on the unconstrained model.
class MapSolver {
public:
    virtual ~MapSolver() = default;

    virtual std::string_view name() const = 0;
    // True when the solver returns a global optimum for models it accepts.
    virtual bool exact() const = 0;

    // Throws Unsatisfiable when no labeling meets the constraints.
    MapResult solve(const DiscreteMRF& mrf, const ConstraintSet& constraints = {}) const;

    // Min-marginals under the constraints. The default performs one
    // constrained solve per (node, label) pair.
    virtual MinMarginalTable min_marginals(const DiscreteMRF& mrf, const ConstraintSet& constraints = {}) const;

protected:
    virtual MapResult solve_constrained(const DiscreteMRF& mrf, const ConstraintSet& constraints) const = 0;
};

// name in {"brute", "tree", "graphcut", "alpha_expansion"}
std::unique_ptr<MapSolver> make_solver(std::string_view name);

// Naive per-(node, label) constrained solves. The label picked by the
// unconstrained MAP is filled from its energy without a second solve.
MinMarginalTable min_marginals(const DiscreteMRF& mrf, const MapSolver& solver, const ConstraintSet& constraints = {});

}  // namespace divmbest

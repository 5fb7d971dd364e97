#include <algorithm>
#include <limits>
#include <string>

#include "divmbest/errors.hpp"
#include "divmbest/inference.hpp"

namespace divmbest {

MapResult MapSolver::solve(const DiscreteMRF& mrf, const ConstraintSet& constraints) const
{
    if (!constraints.satisfiable(mrf)) throw Unsatisfiable("constraints leave no feasible labeling");
    MapResult r = solve_constrained(mrf, constraints);
    if (!constraints.satisfied_by(r.labeling)) {
        throw SolverFailure(std::string(name()) + " returned a labeling that violates its constraints");
    }
    r.energy = energy(mrf, r.labeling);
    return r;
}

MinMarginalTable MapSolver::min_marginals(const DiscreteMRF& mrf, const ConstraintSet& constraints) const
{
    return divmbest::min_marginals(mrf, *this, constraints);
}

MinMarginalTable min_marginals(const DiscreteMRF& mrf, const MapSolver& solver, const ConstraintSet& constraints)
{
    const auto mask = constraints.allowed(mrf);
    const MapResult best = solver.solve(mrf, constraints);
    MinMarginalTable table;
    table.values.resize(mrf.num_nodes());
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
        auto& row = table.values[s];
        row.assign(static_cast<std::size_t>(mrf.num_labels(s)), std::numeric_limits<double>::infinity());
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!mask[s][j]) continue;
            if (static_cast<Label>(j) == best.labeling[s]) {
                row[j] = best.energy;
            } else {
                row[j] = solver.solve(mrf, constraints.with(Constraint::must_equal(s, static_cast<Label>(j)))).energy;
            }
        }
    }
    return table;
}

namespace {

class BruteForceSolver final : public MapSolver {
public:
    std::string_view name() const override { return "brute"; }
    bool exact() const override { return true; }

protected:
    MapResult solve_constrained(const DiscreteMRF& mrf, const ConstraintSet& constraints) const override
    {
        return brute_force_map(mrf, constraints);
    }
};

class TreeSolver final : public MapSolver {
public:
    std::string_view name() const override { return "tree"; }
    bool exact() const override { return true; }

    MinMarginalTable min_marginals(const DiscreteMRF& mrf, const ConstraintSet& constraints) const override
    {
        if (!constraints.satisfiable(mrf)) throw Unsatisfiable("constraints leave no feasible labeling");
        const auto mask = constraints.allowed(mrf);
        auto table = tree_min_marginals(apply_constraints(mrf, constraints));
        for (std::size_t s = 0; s < mask.size(); ++s) {
            for (std::size_t j = 0; j < mask[s].size(); ++j) {
                if (!mask[s][j]) table.values[s][j] = std::numeric_limits<double>::infinity();
            }
        }
        return table;
    }

protected:
    MapResult solve_constrained(const DiscreteMRF& mrf, const ConstraintSet& constraints) const override
    {
        return tree_map(apply_constraints(mrf, constraints));
    }
};

class GraphCutSolver final : public MapSolver {
public:
    std::string_view name() const override { return "graphcut"; }
    bool exact() const override { return true; }

protected:
    MapResult solve_constrained(const DiscreteMRF& mrf, const ConstraintSet& constraints) const override
    {
        return graphcut_map(apply_constraints(mrf, constraints));
    }
};

class AlphaExpansionSolver final : public MapSolver {
public:
    std::string_view name() const override { return "alpha_expansion"; }
    bool exact() const override { return false; }

protected:
    MapResult solve_constrained(const DiscreteMRF& mrf, const ConstraintSet& constraints) const override
    {
        const DiscreteMRF constrained = apply_constraints(mrf, constraints);
        Labeling init(mrf.num_nodes(), 0);
        for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
            const auto th = constrained.unary(s);
            init[s] = static_cast<Label>(std::min_element(th.begin(), th.end()) - th.begin());
        }
        const auto r = alpha_expansion(constrained, init);
        return {r.labeling, r.energy};
    }
};

}  // namespace

std::unique_ptr<MapSolver> make_solver(std::string_view name)
{
    if (name == "brute") return std::make_unique<BruteForceSolver>();
    if (name == "tree") return std::make_unique<TreeSolver>();
    if (name == "graphcut") return std::make_unique<GraphCutSolver>();
    if (name == "alpha_expansion") return std::make_unique<AlphaExpansionSolver>();
    throw InvalidArgument("unknown solver '" + std::string(name) + "' (expected brute|tree|graphcut|alpha_expansion)");
}

}  // namespace divmbest

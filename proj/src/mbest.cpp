#include "divmbest/mbest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "divmbest/errors.hpp"

namespace divmbest {

namespace {

void require_enough_states(const DiscreteMRF& mrf, std::size_t m)
{
    if (m == 0) throw InvalidArgument("M must be at least 1");
    const auto size = mrf.state_space_size(m);
    if (size < m) {
        throw InvalidArgument("M = " + std::to_string(m) + " exceeds the " + std::to_string(size) +
                              " labelings of the model");
    }
}

}  // namespace

LawlerEnumerator::LawlerEnumerator(const DiscreteMRF& mrf, const MapSolver& solver) : mrf_(&mrf), solver_(&solver)
{
    push({});
}

void LawlerEnumerator::push(ConstraintSet constraints)
{
    if (!constraints.satisfiable(*mrf_)) return;
    MapResult best = solver_->solve(*mrf_, constraints);
    pool_.push_back({std::move(constraints), std::move(best), inserted_++});
}

std::optional<MapResult> LawlerEnumerator::next()
{
    if (pool_.empty()) return std::nullopt;
    std::size_t pick = 0;
    for (std::size_t i = 1; i < pool_.size(); ++i) {
        const auto& a = pool_[i];
        const auto& b = pool_[pick];
        if (ranks_before(a.best, b.best) || (!ranks_before(b.best, a.best) && a.order < b.order)) pick = i;
    }
    Entry top = std::move(pool_[pick]);
    pool_.erase(pool_.begin() + static_cast<std::ptrdiff_t>(pick));

    const Labeling& y = top.best.labeling;
    ConstraintSet prefix = top.constraints;
    for (std::size_t i = 0; i < y.size(); ++i) {
        push(prefix.with(Constraint::must_differ(i, {y[i]})));
        prefix.add(Constraint::must_equal(i, y[i]));
    }
    ++returned_;
    return std::move(top.best);
}

std::vector<ConstraintSet> LawlerEnumerator::open_partitions() const
{
    std::vector<ConstraintSet> out;
    out.reserve(pool_.size());
    for (const auto& e : pool_) out.push_back(e.constraints);
    return out;
}

SolutionSet lawler_mbest(const DiscreteMRF& mrf, std::size_t m, const MapSolver& solver)
{
    require_enough_states(mrf, m);
    LawlerEnumerator it(mrf, solver);
    SolutionSet out;
    while (out.size() < m) {
        auto r = it.next();
        if (!r) throw SolverFailure("partitioning ran out of subproblems before M solutions");
        out.solutions.push_back({std::move(r->labeling), r->energy});
    }
    return out;
}

BmmfResult bmmf_run(const DiscreteMRF& mrf, std::size_t m, const MapSolver& solver)
{
    require_enough_states(mrf, m);

    struct Partition {
        ConstraintSet constraints;
        MinMarginalTable score;
    };

    BmmfResult out;
    const MapResult map = solver.solve(mrf);
    out.set.solutions.push_back({map.labeling, map.energy});
    std::vector<Partition> parts{{{}, {}}};
    if (m == 1) {
        out.constraints.push_back({});
        return out;
    }

    auto rescore = [&](Partition& p) {
        p.score = solver.min_marginals(mrf, p.constraints);
        ++out.min_marginal_calls;
    };
    rescore(parts[0]);

    auto is_used = [&](const BmmfTriple& t) { return std::find(out.used.begin(), out.used.end(), t) != out.used.end(); };

    while (out.set.size() < m) {
        bool found = false;
        BmmfTriple pick;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const Labeling& xk = out.set[k].labeling;
            const auto& table = parts[k].score.values;
            for (NodeId i = 0; i < table.size(); ++i) {
                for (std::size_t j = 0; j < table[i].size(); ++j) {
                    const auto label = static_cast<Label>(j);
                    if (label == xk[i]) continue;
                    const double v = table[i][j];
                    if (!std::isfinite(v)) continue;
                    const BmmfTriple t{i, label, k};
                    if (is_used(t)) continue;
                    if (!found || v < best - kEnergyTolerance) {
                        best = v;
                        pick = t;
                        found = true;
                    }
                }
            }
        }
        if (!found) throw SolverFailure("no unused min-marginal entry left before M solutions");

        Partition child{parts[pick.source].constraints.with(Constraint::must_equal(pick.node, pick.label)), {}};
        const MapResult r = solver.solve(mrf, child.constraints);
        out.set.solutions.push_back({r.labeling, r.energy});
        out.used.push_back(pick);

        parts[pick.source].constraints.add(Constraint::must_differ(pick.node, {pick.label}));
        if (out.set.size() < m) {
            rescore(parts[pick.source]);
            rescore(child);
        }
        parts.push_back(std::move(child));
    }

    for (auto& p : parts) out.constraints.push_back(std::move(p.constraints));
    return out;
}

SolutionSet bmmf(const DiscreteMRF& mrf, std::size_t m, const MapSolver& solver)
{
    return bmmf_run(mrf, m, solver).set;
}

}  // namespace divmbest

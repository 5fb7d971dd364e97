#include "divmbest/constraints.hpp"

#include <algorithm>
#include <string>

#include "divmbest/errors.hpp"

namespace divmbest {

std::vector<std::vector<char>> ConstraintSet::allowed(const DiscreteMRF& mrf) const
{
    std::vector<std::vector<char>> mask(mrf.num_nodes());
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) mask[s].assign(static_cast<std::size_t>(mrf.num_labels(s)), 1);

    for (const auto& c : items_) {
        if (c.node >= mrf.num_nodes()) {
            throw InvalidArgument("constraint on missing node " + std::to_string(c.node));
        }
        auto& row = mask[c.node];
        for (Label j : c.labels) {
            if (j < 0 || j >= static_cast<Label>(row.size())) {
                throw InvalidArgument("constraint label " + std::to_string(j) + " out of range at node " +
                                      std::to_string(c.node));
            }
        }
        if (c.mode == ConstraintMode::MustEqual) {
            if (c.labels.size() != 1) throw InvalidArgument("MustEqual constraint needs exactly one label");
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (static_cast<Label>(j) != c.labels.front()) row[j] = 0;
            }
        } else {
            for (Label j : c.labels) row[static_cast<std::size_t>(j)] = 0;
        }
    }
    return mask;
}

bool ConstraintSet::satisfiable(const DiscreteMRF& mrf) const
{
    const auto mask = allowed(mrf);
    return std::all_of(mask.begin(), mask.end(),
                       [](const auto& row) { return std::find(row.begin(), row.end(), 1) != row.end(); });
}

bool ConstraintSet::satisfied_by(const Labeling& x) const
{
    for (const auto& c : items_) {
        if (c.node >= x.size()) return false;
        const Label v = x[c.node];
        const bool listed = std::find(c.labels.begin(), c.labels.end(), v) != c.labels.end();
        if (c.mode == ConstraintMode::MustEqual ? !listed : listed) return false;
    }
    return true;
}

std::uint64_t ConstraintSet::feasible_count(const DiscreteMRF& mrf, std::uint64_t cap) const
{
    const auto mask = allowed(mrf);
    std::uint64_t count = 1;
    for (const auto& row : mask) {
        const auto k = static_cast<std::uint64_t>(std::count(row.begin(), row.end(), 1));
        if (k == 0) return 0;
        if (count > cap / k) return cap + 1;
        count *= k;
    }
    return count;
}

DiscreteMRF apply_constraints(const DiscreteMRF& mrf, const ConstraintSet& constraints)
{
    if (constraints.empty()) return mrf;
    const auto mask = constraints.allowed(mrf);
    auto penalties = zero_penalties(mrf);
    for (std::size_t s = 0; s < mask.size(); ++s) {
        for (std::size_t j = 0; j < mask[s].size(); ++j) {
            if (!mask[s][j]) penalties[s][j] = kBigPenalty;
        }
    }
    return augment_unaries(mrf, penalties);
}

}  // namespace divmbest

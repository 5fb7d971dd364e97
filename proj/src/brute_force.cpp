#include <algorithm>
#include <string>

#include "divmbest/errors.hpp"
#include "divmbest/inference.hpp"

namespace divmbest {

bool ranks_before(double energy_a, const Labeling& a, double energy_b, const Labeling& b)
{
    if (energy_a < energy_b - kEnergyTolerance) return true;
    if (energy_b < energy_a - kEnergyTolerance) return false;
    return a < b;
}

namespace {

// Visits every labeling allowed by `mask` in lexicographic order.
template <typename Visit>
void enumerate(const std::vector<std::vector<char>>& mask, Visit&& visit)
{
    const std::size_t n = mask.size();
    std::vector<std::vector<Label>> options(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t j = 0; j < mask[s].size(); ++j) {
            if (mask[s][j]) options[s].push_back(static_cast<Label>(j));
        }
        if (options[s].empty()) return;
    }
    std::vector<std::size_t> digit(n, 0);
    Labeling x(n, 0);
    for (std::size_t s = 0; s < n; ++s) x[s] = options[s][0];
    while (true) {
        visit(x);
        std::size_t s = n;
        while (s > 0) {
            --s;
            if (++digit[s] < options[s].size()) {
                x[s] = options[s][digit[s]];
                break;
            }
            digit[s] = 0;
            x[s] = options[s][0];
            if (s == 0) return;
        }
        if (n == 0) return;
    }
}

}  // namespace

MapResult brute_force_map(const DiscreteMRF& mrf, const ConstraintSet& constraints, std::uint64_t cap)
{
    const std::uint64_t count = constraints.feasible_count(mrf, cap);
    if (count == 0) throw Unsatisfiable("constraints leave no feasible labeling");
    if (count > cap) {
        throw StateSpaceTooLarge("state space exceeds the brute-force cap of " + std::to_string(cap));
    }
    MapResult best;
    bool have = false;
    enumerate(constraints.allowed(mrf), [&](const Labeling& x) {
        const double e = energy(mrf, x);
        // lexicographic enumeration: a later labeling only wins on a strict improvement
        if (!have || e < best.energy - kEnergyTolerance) {
            best = {x, e};
            have = true;
        }
    });
    return best;
}

std::vector<MapResult> brute_force_top_m(const DiscreteMRF& mrf, std::size_t m, std::uint64_t cap)
{
    if (m == 0) throw InvalidArgument("M must be at least 1");
    const std::uint64_t size = mrf.state_space_size(cap);
    if (size > cap) throw StateSpaceTooLarge("state space exceeds the brute-force cap of " + std::to_string(cap));
    if (m > size) {
        throw InvalidArgument("M = " + std::to_string(m) + " exceeds the state-space size " + std::to_string(size));
    }
    std::vector<MapResult> all;
    all.reserve(static_cast<std::size_t>(size));
    enumerate(ConstraintSet{}.allowed(mrf), [&](const Labeling& x) { all.push_back({x, energy(mrf, x)}); });
    // enumeration order is lexicographic, so a stable sort on energy keeps ties lexicographic
    std::stable_sort(all.begin(), all.end(), [](const MapResult& a, const MapResult& b) { return a.energy < b.energy; });
    // re-apply the tolerance-aware order among near ties
    for (std::size_t i = 1; i < all.size(); ++i) {
        for (std::size_t j = i; j > 0 && ranks_before(all[j], all[j - 1]); --j) std::swap(all[j], all[j - 1]);
    }
    all.resize(m);
    return all;
}

}  // namespace divmbest

#pragma once

#include <vector>

#include "divmbest/mrf.hpp"

namespace divmbest {

// Penalty used to realize constraints through the unaries. Kept finite so
// every solver sees ordinary arithmetic.
inline constexpr double kBigPenalty = 1e9;

enum class ConstraintMode { MustEqual, MustDiffer };

struct Constraint {
    NodeId node = 0;
    ConstraintMode mode = ConstraintMode::MustEqual;
    // One label for MustEqual, the forbidden labels for MustDiffer.
    std::vector<Label> labels;

    static Constraint must_equal(NodeId s, Label j) { return {s, ConstraintMode::MustEqual, {j}}; }
    static Constraint must_differ(NodeId s, std::vector<Label> forbidden)
    {
        return {s, ConstraintMode::MustDiffer, std::move(forbidden)};
    }

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

// Conjunction of unary label constraints.
class ConstraintSet {
public:
    ConstraintSet() = default;
    ConstraintSet(std::initializer_list<Constraint> cs) : items_(cs) {}

    ConstraintSet& add(Constraint c)
    {
        items_.push_back(std::move(c));
        return *this;
    }
    ConstraintSet with(Constraint c) const
    {
        ConstraintSet out = *this;
        out.add(std::move(c));
        return out;
    }

    const std::vector<Constraint>& items() const { return items_; }
    bool empty() const { return items_.empty(); }

    // allowed[s][j] is true when label j survives every constraint on s.
    // Throws InvalidArgument for out-of-range nodes or labels.
    std::vector<std::vector<char>> allowed(const DiscreteMRF& mrf) const;
    bool satisfiable(const DiscreteMRF& mrf) const;
    bool satisfied_by(const Labeling& x) const;

    // Number of labelings satisfying the set (saturates at cap + 1).
    std::uint64_t feasible_count(const DiscreteMRF& mrf, std::uint64_t cap) const;

private:
    std::vector<Constraint> items_;
};

// Copy of `mrf` whose forbidden labels carry +kBigPenalty.
DiscreteMRF apply_constraints(const DiscreteMRF& mrf, const ConstraintSet& constraints);

}  // namespace divmbest

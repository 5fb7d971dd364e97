#pragma once

#include <vector>

#include "divmbest/diversity.hpp"
#include "divmbest/mrf.hpp"

namespace divmbest {

struct Solution {
    Labeling labeling;
    double energy = 0.0;
};

// Ordered labelings plus bookkeeping produced by the enumeration routines.
struct SolutionSet {
    std::vector<Solution> solutions;
    // diversity[i][j] = Delta(x_i, x_j); filled by with_diversities().
    std::vector<std::vector<double>> diversity;
    // Multipliers and targets used to produce each solution (empty rows for
    // solutions that were not produced by a Lagrangian step).
    std::vector<std::vector<double>> lambdas;
    std::vector<std::vector<double>> ks;

    std::size_t size() const { return solutions.size(); }
    const Solution& operator[](std::size_t i) const { return solutions[i]; }

    std::vector<double> energies() const;
    std::vector<Labeling> labelings() const;
};

void fill_diversities(SolutionSet& set, const DiversityFn& delta);

}  // namespace divmbest

#include "divmbest/solutions.hpp"

namespace divmbest {

std::vector<double> SolutionSet::energies() const
{
    std::vector<double> out;
    out.reserve(solutions.size());
    for (const auto& s : solutions) out.push_back(s.energy);
    return out;
}

std::vector<Labeling> SolutionSet::labelings() const
{
    std::vector<Labeling> out;
    out.reserve(solutions.size());
    for (const auto& s : solutions) out.push_back(s.labeling);
    return out;
}

void fill_diversities(SolutionSet& set, const DiversityFn& delta)
{
    const std::size_t m = set.size();
    set.diversity.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j) set.diversity[i][j] = diversity(delta, set[i].labeling, set[j].labeling);
        }
    }
}

}  // namespace divmbest

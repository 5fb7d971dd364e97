#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "divmbest/diversity.hpp"
#include "divmbest/inference.hpp"
#include "divmbest/solutions.hpp"

namespace divmbest {

// Projected supergradient schedule: alpha_t = gamma / sqrt(t), at most
// max_iters steps, stop early once the best dual value has improved by less
// than `tolerance` over the last `patience` steps.
struct StepSchedule {
    double gamma = 1.0;
    int max_iters = 200;
    double tolerance = 1e-6;
    int patience = 20;
};

void validate(const StepSchedule& s);

// One multiplier shared by every previous solution.
struct FixedLambda {
    double lambda = 0.0;
};

// Diversity targets Delta(x, x^(i)) >= k_i; a single entry is shared by all
// previous solutions, otherwise entry i applies to solution i (the last entry
// repeats).
struct TargetK {
    std::vector<double> ks{1.0};
    StepSchedule schedule;
};

struct DivMBestConfig {
    std::size_t m = 1;
    DiversityFn diversity = DiversityFn::hamming();
    std::variant<FixedLambda, TargetK> mode = FixedLambda{};
    std::string solver = "brute";
    // Inner schedule of the cardinality dual decomposition.
    StepSchedule hop_schedule;
};

void validate(const DivMBestConfig& config);

struct AugmentedSolve {
    Labeling labeling;
    // E(x) + sum_i lambda_i * similarity(x, x^(i))
    double augmented_energy = 0.0;
    double energy = 0.0;
    // False when the cardinality decomposition ended without agreement.
    bool exact = true;
};

// argmin_x E(x) + sum_i lambda_i * similarity(x, x^(i)).
//
// Hamming kinds only add to the unaries: penalty_s(j) = sum_i lambda_i *
// (maxW - W[j][x_s^(i)]). ZeroOne compares the best labeling outside the
// previous set with every previous labeling. NodeMax enumerates witness
// nodes (bounded number of constrained solves). Cardinality goes through
// cardinality_dual_decomp.
AugmentedSolve delta_augmented_solve(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                                     const std::vector<double>& lambdas, const DiversityFn& delta,
                                     const MapSolver& solver, const StepSchedule& hop_schedule = {});

struct DualEvaluation {
    // f(lambda) = min_x E(x) - sum_i lambda_i (Delta(x, x^(i)) - k_i)
    double value = 0.0;
    AugmentedSolve argmin;
    // g_i = k_i - Delta(argmin, x^(i))
    std::vector<double> supergradient;
};

DualEvaluation evaluate_dual(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                             const std::vector<double>& lambdas, const std::vector<double>& ks,
                             const DiversityFn& delta, const MapSolver& solver, const StepSchedule& hop_schedule = {});

struct DualStep {
    std::vector<double> lambda;
    double dual = 0.0;
    std::vector<double> supergradient;
    // +infinity until a labeling meeting every target has been seen.
    double best_primal = 0.0;
};

struct AscentResult {
    // Multipliers at the best dual value.
    std::vector<double> lambda;
    double best_dual = 0.0;
    std::vector<DualStep> trace;
    std::optional<Solution> best_feasible;
    // Minimizer at the best dual value (used when nothing feasible was seen).
    Solution dual_argmin;
};

AscentResult supergradient_ascent(const DiscreteMRF& mrf, const std::vector<Labeling>& previous,
                                  const DiversityFn& delta, const std::vector<double>& ks, const StepSchedule& schedule,
                                  const MapSolver& solver, std::vector<double> lambda0 = {},
                                  const StepSchedule& hop_schedule = {});

// --- cardinality potentials ---------------------------------------------------

struct CardinalityChoice {
    std::vector<char> z;
    std::size_t count = 0;
    double value = 0.0;
};

// min_z H(#z) - sum_s nu_s z_s, by sorting nu in decreasing order (stable)
// and scanning prefix sums; the smallest count wins ties. h has n+1 entries.
CardinalityChoice solve_cardinality_subproblem(const std::vector<double>& nu, const std::vector<double>& h);

struct CardinalityResult {
    // Best labeling of E(x) + H(#x) seen on either side of the split.
    Labeling labeling;
    double objective = 0.0;
    double best_dual = 0.0;
    std::vector<double> dual_trace;
    std::vector<double> nu;
    bool agreed = false;
};

// Dual decomposition of min_x E(x) + H(#x) for a binary model: the MAP side
// sees unaries theta_s(1) + nu_s, the cardinality side is solved by sorting;
// nu follows the supergradient x - z of the dual.
CardinalityResult cardinality_dual_decomp(const DiscreteMRF& mrf, const std::vector<double>& h,
                                          std::vector<double> nu0, const StepSchedule& schedule,
                                          const MapSolver& solver);

// --- greedy --------------------------------------------------------------------

struct DivMBestRun {
    SolutionSet set;
    // One entry per solution after the first in TargetK mode.
    std::vector<AscentResult> ascents;
    // Per solution: whether its inner problem was solved exactly and, in
    // TargetK mode, whether a labeling meeting all targets was found.
    std::vector<bool> exact;
    std::vector<bool> feasible;
};

DivMBestRun divmbest_run(const DiscreteMRF& mrf, const DivMBestConfig& config);
SolutionSet divmbest_greedy(const DiscreteMRF& mrf, const DivMBestConfig& config);

// One greedy run per lambda (FixedLambda mode); runs are independent.
std::vector<SolutionSet> divmbest_lambda_grid(const DiscreteMRF& mrf, DivMBestConfig config,
                                              const std::vector<double>& grid);

// --- perturbation baselines ------------------------------------------------------

// Label with the smallest finite min-marginal other than `current` (smallest
// index on ties); nullopt if there is none.
std::optional<Label> next_best_label(const MinMarginalTable& mm, NodeId s, Label current);

// Gibbs entropy of softmin(-m_s) at temperature 1.
double min_marginal_entropy(const std::vector<double>& row);

// Moves d nodes of `map` to their next-best label. Random picks nodes
// uniformly without replacement; confidence picks the d highest-entropy
// nodes (smallest index on ties). Only nodes with a next-best label count.
Labeling baseline_random_perturb(const DiscreteMRF& mrf, const Labeling& map, std::size_t d, std::uint64_t seed,
                                 const MinMarginalTable& mm);
Labeling baseline_confidence_perturb(const DiscreteMRF& mrf, const Labeling& map, std::size_t d,
                                     const MinMarginalTable& mm);

}  // namespace divmbest

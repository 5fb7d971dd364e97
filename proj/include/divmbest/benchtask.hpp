#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divmbest/divmbest.hpp"
#include "divmbest/mrf.hpp"
#include "divmbest/reranker.hpp"

namespace divmbest {

inline constexpr std::size_t kMaxSyntheticPixels = 64 * 64;

// Figure-ground instance: a random elliptical mask observed through
// Gaussian noise. Unaries are the negative log-odds of the noisy intensity,
// theta_s(1) = -(I_s - 1/2) / sigma^2 (scale 1 when sigma = 0), and the
// pairwise term is a contrast-sensitive Potts penalty
// w * exp(-beta (I_s - I_t)^2) with beta = 1 / (2 * mean squared difference).
struct InstanceParams {
    std::size_t width = 32;
    std::size_t height = 32;
    // Defaults put the mean MAP IoU of 32x32 instances near 0.76.
    double sigma = 1.3;
    double smoothness = 1.5;
    // Fraction of the noise variance that is spatially smooth (box-blurred
    // and renormalized); 0 gives independent pixel noise.
    double correlated = 0.0;
    int blur_radius = 3;
};

void validate(const InstanceParams& p);

struct SyntheticInstance {
    std::string id;
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint64_t seed = 0;
    double sigma = 0.0;
    double smoothness = 0.0;
    Labeling mask;
    std::vector<double> intensity;
    DiscreteMRF mrf;
};

SyntheticInstance generate(const InstanceParams& params, std::uint64_t seed);

// --- metrics ------------------------------------------------------------------

// Mean over labels {0, 1} of |pred == l and gt == l| / |pred == l or gt == l|;
// a label absent from both contributes 1.
double iou(const Labeling& gt, const Labeling& pred);

// IoU(best) - IoU(pred)
double relative_task_loss(const Labeling& gt, const Labeling& best, const Labeling& pred);

struct OracleChoice {
    std::size_t index = 0;
    double iou = 0.0;
};
OracleChoice oracle_index(const Labeling& gt, const std::vector<Labeling>& candidates);

// 4-connected components of equal label.
struct Segments {
    std::vector<std::size_t> component;  // per pixel
    std::vector<std::size_t> sizes;
    std::vector<Label> labels;
};
Segments connected_components(const Labeling& x, std::size_t width, std::size_t height);

// Size-weighted mean over the reference segments of the best overlap
// |r & o| / |r | o| with any segment of `other`.
double covering_d1(const Labeling& reference, const Labeling& other, std::size_t width, std::size_t height);
// As covering_d1 but only segments with the same label may match (no match
// contributes 0).
double covering_d2(const Labeling& reference, const Labeling& other, std::size_t width, std::size_t height);
// min over the first m solutions of covering_d1(reference, solution)
double min_cover(const Labeling& reference, const std::vector<Labeling>& solutions, std::size_t m, std::size_t width,
                 std::size_t height);

// --- re-ranker features ----------------------------------------------------------

// Per candidate: energy gap to the first candidate per node, rank / (M - 1),
// foreground and background fractions, fraction of grid edges cut,
// agreement with the per-pixel majority vote, foreground components / 10.
inline constexpr std::size_t kFeatureCount = 7;
std::vector<std::vector<double>> candidate_features(const SyntheticInstance& inst,
                                                    const std::vector<Solution>& candidates);

// --- pipeline ---------------------------------------------------------------------

// Hamming DivMBest with graph cuts at a lambda that suits the default
// instance parameters.
inline constexpr double kBenchLambda = 0.02;
DivMBestConfig bench_divmbest(std::size_t m, double lambda = kBenchLambda);

// Everything computed for one image before any selection happens.
struct ImageCandidates {
    std::string id;
    std::vector<Solution> modes;
    std::vector<double> ious;
    CandidateSet candidates;
    // Hamming distance of mode m to the MAP.
    std::vector<std::size_t> budgets;
    // MAP plus perturbations with the same budgets.
    std::vector<Labeling> random_perturbed;
    std::vector<Labeling> confidence_perturbed;
    std::vector<double> random_ious;
    std::vector<double> confidence_ious;
    // min-cover of the MAP by the first m modes, m = 1..M
    std::vector<double> min_cover_curve;
    double d1_oracle = 0.0;
    double d2_oracle = 0.0;
};

ImageCandidates build_candidates(const SyntheticInstance& inst, const DivMBestConfig& config,
                                 std::uint64_t baseline_seed);

std::vector<SyntheticInstance> generate_suite(const InstanceParams& params, std::size_t count, std::uint64_t seed);
std::vector<ImageCandidates> build_suite(const std::vector<SyntheticInstance>& instances, const DivMBestConfig& config,
                                         std::uint64_t seed);

struct ImageEval {
    std::string id;
    double map_iou = 0.0;
    double oracle_iou = 0.0;
    std::size_t oracle_index = 0;
    double min_iou = 0.0;
    double random_pick_iou = 0.0;
    std::optional<double> reranked_iou;
    std::optional<std::size_t> reranked_index;
    double random_perturb_oracle_iou = 0.0;
    double confidence_perturb_oracle_iou = 0.0;
    // best IoU among the first m candidates, m = 1..M
    std::vector<double> oracle_curve;
    std::vector<double> random_perturb_curve;
    std::vector<double> confidence_perturb_curve;
    std::vector<double> normalized_hamming;
    std::vector<double> energy_gap;
    std::vector<std::size_t> budgets;
    std::vector<std::size_t> random_hamming;
    std::vector<std::size_t> confidence_hamming;
    std::vector<double> min_cover_curve;
    double d1_oracle = 0.0;
    double d2_oracle = 0.0;
};

struct EvalReport {
    std::size_t m = 0;
    std::vector<ImageEval> images;
    double mean_map_iou = 0.0;
    double mean_oracle_iou = 0.0;
    double mean_random_pick_iou = 0.0;
    std::optional<double> mean_reranked_iou;
    double mean_random_perturb_oracle_iou = 0.0;
    double mean_confidence_perturb_oracle_iou = 0.0;
    std::vector<double> mean_oracle_curve;
    std::vector<double> mean_random_perturb_curve;
    std::vector<double> mean_confidence_perturb_curve;
    std::vector<double> mean_normalized_hamming;
    std::vector<double> mean_min_cover_curve;
    double mean_d1_oracle = 0.0;
    double mean_d2_oracle = 0.0;
};

EvalReport evaluate_candidates(const std::vector<ImageCandidates>& images, const RerankerModel* model);

EvalReport evaluate_pipeline(const std::vector<SyntheticInstance>& instances, const DivMBestConfig& config,
                             const RerankerModel* model, std::uint64_t seed);

std::vector<CandidateSet> candidate_sets(const std::vector<ImageCandidates>& images);

}  // namespace divmbest

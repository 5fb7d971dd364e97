#include <algorithm>
#include <string>

#include "divmbest/benchtask.hpp"
#include "divmbest/errors.hpp"
#include "divmbest/inference.hpp"
#include "divmbest/parallel.hpp"
#include "divmbest/random.hpp"

namespace divmbest {

namespace {

std::size_t hamming_distance(const Labeling& a, const Labeling& b)
{
    std::size_t d = 0;
    for (std::size_t s = 0; s < a.size(); ++s) d += a[s] != b[s] ? 1 : 0;
    return d;
}

std::vector<double> prefix_max(const std::vector<double>& v)
{
    std::vector<double> out(v.size());
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        best = i == 0 ? v[i] : std::max(best, v[i]);
        out[i] = best;
    }
    return out;
}

void accumulate(std::vector<double>& sum, const std::vector<double>& v)
{
    if (sum.size() < v.size()) sum.resize(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
}

template <class T>
std::vector<double> as_double(const std::vector<T>& v, double scale)
{
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]) * scale;
    return out;
}

}  // namespace

DivMBestConfig bench_divmbest(std::size_t m, double lambda)
{
    DivMBestConfig config;
    config.m = m;
    config.diversity = DiversityFn::hamming();
    config.mode = FixedLambda{lambda};
    config.solver = "graphcut";
    validate(config);
    return config;
}

ImageCandidates build_candidates(const SyntheticInstance& inst, const DivMBestConfig& config,
                                 std::uint64_t baseline_seed)
{
    ImageCandidates out;
    out.id = inst.id;
    const auto run = divmbest_run(inst.mrf, config);
    out.modes = run.set.solutions;
    const std::size_t M = out.modes.size();
    const Labeling& map = out.modes.front().labeling;

    for (const auto& s : out.modes) out.ious.push_back(iou(inst.mask, s.labeling));

    out.candidates.id = inst.id;
    out.candidates.features = candidate_features(inst, out.modes);
    for (double v : out.ious) out.candidates.losses.push_back(std::clamp(1.0 - v, 0.0, 1.0));

    for (const auto& s : out.modes) out.budgets.push_back(hamming_distance(s.labeling, map));

    out.random_perturbed.push_back(map);
    out.confidence_perturbed.push_back(map);
    if (M > 1) {
        const auto solver = make_solver(config.solver);
        const auto mm = solver->min_marginals(inst.mrf);
        for (std::size_t m = 1; m < M; ++m) {
            out.random_perturbed.push_back(
                baseline_random_perturb(inst.mrf, map, out.budgets[m], mix_seed(baseline_seed, m), mm));
            out.confidence_perturbed.push_back(baseline_confidence_perturb(inst.mrf, map, out.budgets[m], mm));
        }
    }
    for (const auto& x : out.random_perturbed) out.random_ious.push_back(iou(inst.mask, x));
    for (const auto& x : out.confidence_perturbed) out.confidence_ious.push_back(iou(inst.mask, x));

    const auto labelings = run.set.labelings();
    for (std::size_t m = 1; m <= M; ++m) {
        out.min_cover_curve.push_back(min_cover(map, labelings, m, inst.width, inst.height));
    }
    const auto oracle = oracle_index(inst.mask, labelings);
    out.d1_oracle = covering_d1(map, labelings[oracle.index], inst.width, inst.height);
    out.d2_oracle = covering_d2(map, labelings[oracle.index], inst.width, inst.height);
    return out;
}

std::vector<SyntheticInstance> generate_suite(const InstanceParams& params, std::size_t count, std::uint64_t seed)
{
    validate(params);
    std::vector<SyntheticInstance> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = generate(params, mix_seed(seed, i)); });
    return out;
}

std::vector<ImageCandidates> build_suite(const std::vector<SyntheticInstance>& instances, const DivMBestConfig& config,
                                         std::uint64_t seed)
{
    validate(config);
    std::vector<ImageCandidates> out(instances.size());
    parallel_for(instances.size(),
                 [&](std::size_t i) { out[i] = build_candidates(instances[i], config, mix_seed(seed, i)); });
    return out;
}

EvalReport evaluate_candidates(const std::vector<ImageCandidates>& images, const RerankerModel* model)
{
    if (images.empty()) throw InvalidArgument("nothing to evaluate");
    EvalReport report;
    report.m = images.front().modes.size();
    double reranked_sum = 0.0;
    std::vector<double> hamming_sum;

    for (const auto& img : images) {
        if (img.modes.empty()) throw InvalidArgument("image '" + img.id + "' has no candidates");
        const std::size_t n = img.modes.front().labeling.size();
        ImageEval e;
        e.id = img.id;
        e.map_iou = img.ious.front();
        e.oracle_curve = prefix_max(img.ious);
        e.oracle_iou = e.oracle_curve.back();
        e.oracle_index = static_cast<std::size_t>(std::max_element(img.ious.begin(), img.ious.end()) -
                                                  img.ious.begin());
        e.min_iou = *std::min_element(img.ious.begin(), img.ious.end());
        for (double v : img.ious) e.random_pick_iou += v;
        e.random_pick_iou /= static_cast<double>(img.ious.size());
        if (model) {
            e.reranked_index = predict(*model, img.candidates);
            e.reranked_iou = img.ious[*e.reranked_index];
            reranked_sum += *e.reranked_iou;
        }
        e.random_perturb_curve = prefix_max(img.random_ious);
        e.confidence_perturb_curve = prefix_max(img.confidence_ious);
        e.random_perturb_oracle_iou = e.random_perturb_curve.back();
        e.confidence_perturb_oracle_iou = e.confidence_perturb_curve.back();
        e.budgets = img.budgets;
        e.normalized_hamming = as_double(img.budgets, 1.0 / static_cast<double>(n));
        for (const auto& s : img.modes) {
            e.energy_gap.push_back((s.energy - img.modes.front().energy) / static_cast<double>(n));
        }
        const Labeling& map = img.modes.front().labeling;
        for (const auto& x : img.random_perturbed) e.random_hamming.push_back(hamming_distance(x, map));
        for (const auto& x : img.confidence_perturbed) e.confidence_hamming.push_back(hamming_distance(x, map));
        e.min_cover_curve = img.min_cover_curve;
        e.d1_oracle = img.d1_oracle;
        e.d2_oracle = img.d2_oracle;

        report.mean_map_iou += e.map_iou;
        report.mean_oracle_iou += e.oracle_iou;
        report.mean_random_pick_iou += e.random_pick_iou;
        report.mean_random_perturb_oracle_iou += e.random_perturb_oracle_iou;
        report.mean_confidence_perturb_oracle_iou += e.confidence_perturb_oracle_iou;
        report.mean_d1_oracle += e.d1_oracle;
        report.mean_d2_oracle += e.d2_oracle;
        accumulate(report.mean_oracle_curve, e.oracle_curve);
        accumulate(report.mean_random_perturb_curve, e.random_perturb_curve);
        accumulate(report.mean_confidence_perturb_curve, e.confidence_perturb_curve);
        accumulate(hamming_sum, e.normalized_hamming);
        accumulate(report.mean_min_cover_curve, e.min_cover_curve);
        report.images.push_back(std::move(e));
    }

    const double count = static_cast<double>(images.size());
    for (double* v : {&report.mean_map_iou, &report.mean_oracle_iou, &report.mean_random_pick_iou,
                      &report.mean_random_perturb_oracle_iou, &report.mean_confidence_perturb_oracle_iou,
                      &report.mean_d1_oracle, &report.mean_d2_oracle}) {
        *v /= count;
    }
    for (auto* curve : {&report.mean_oracle_curve, &report.mean_random_perturb_curve,
                        &report.mean_confidence_perturb_curve, &report.mean_min_cover_curve}) {
        for (double& v : *curve) v /= count;
    }
    report.mean_normalized_hamming = std::move(hamming_sum);
    for (double& v : report.mean_normalized_hamming) v /= count;
    if (model) report.mean_reranked_iou = reranked_sum / count;
    return report;
}

EvalReport evaluate_pipeline(const std::vector<SyntheticInstance>& instances, const DivMBestConfig& config,
                             const RerankerModel* model, std::uint64_t seed)
{
    return evaluate_candidates(build_suite(instances, config, seed), model);
}

std::vector<CandidateSet> candidate_sets(const std::vector<ImageCandidates>& images)
{
    std::vector<CandidateSet> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back(img.candidates);
    return out;
}

}  // namespace divmbest

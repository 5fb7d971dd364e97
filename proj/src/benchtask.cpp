#include "divmbest/benchtask.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "divmbest/errors.hpp"
#include "divmbest/random.hpp"

namespace divmbest {

namespace {

void require_same_shape(const Labeling& a, const Labeling& b)
{
    if (a.size() != b.size()) {
        throw DimensionMismatch("masks of different size (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
    }
}

void require_grid(const Labeling& x, std::size_t width, std::size_t height)
{
    if (x.size() != width * height) {
        throw DimensionMismatch("labeling of size " + std::to_string(x.size()) + " is not a " + std::to_string(width) +
                                "x" + std::to_string(height) + " grid");
    }
}

std::vector<double> box_blur(const std::vector<double>& field, std::size_t w, std::size_t h, int radius)
{
    std::vector<double> out(field.size(), 0.0);
    const auto r = static_cast<long>(radius);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double sum = 0.0;
            int count = 0;
            for (long dy = -r; dy <= r; ++dy) {
                const long yy = static_cast<long>(y) + dy;
                if (yy < 0 || yy >= static_cast<long>(h)) continue;
                for (long dx = -r; dx <= r; ++dx) {
                    const long xx = static_cast<long>(x) + dx;
                    if (xx < 0 || xx >= static_cast<long>(w)) continue;
                    sum += field[static_cast<std::size_t>(yy) * w + static_cast<std::size_t>(xx)];
                    ++count;
                }
            }
            out[y * w + x] = sum / count;
        }
    }
    return out;
}

// Overlap of every reference segment with its best partner in `other`.
double covering(const Labeling& reference, const Labeling& other, std::size_t width, std::size_t height,
                bool same_label)
{
    require_grid(reference, width, height);
    require_same_shape(reference, other);
    if (reference.empty()) throw InvalidArgument("covering of an empty reference");
    const auto R = connected_components(reference, width, height);
    const auto O = connected_components(other, width, height);

    std::unordered_map<std::uint64_t, std::size_t> inter;
    for (std::size_t s = 0; s < reference.size(); ++s) {
        ++inter[static_cast<std::uint64_t>(R.component[s]) << 32 | O.component[s]];
    }
    std::vector<double> best(R.sizes.size(), 0.0);
    for (const auto& [key, count] : inter) {
        const auto r = static_cast<std::size_t>(key >> 32);
        const auto o = static_cast<std::size_t>(key & 0xffffffffULL);
        if (same_label && R.labels[r] != O.labels[o]) continue;
        const double overlap = static_cast<double>(count) / static_cast<double>(R.sizes[r] + O.sizes[o] - count);
        best[r] = std::max(best[r], overlap);
    }
    double total = 0.0;
    for (std::size_t r = 0; r < best.size(); ++r) total += static_cast<double>(R.sizes[r]) * best[r];
    return total / static_cast<double>(reference.size());
}

}  // namespace

void validate(const InstanceParams& p)
{
    if (p.width == 0 || p.height == 0) throw InvalidArgument("grid dimensions must be positive");
    if (p.width > kMaxSyntheticPixels || p.height > kMaxSyntheticPixels ||
        p.width * p.height > kMaxSyntheticPixels) {
        throw InvalidArgument("grid of " + std::to_string(p.width) + "x" + std::to_string(p.height) +
                              " exceeds the " + std::to_string(kMaxSyntheticPixels) + " pixel cap");
    }
    if (!std::isfinite(p.sigma) || p.sigma < 0.0) throw InvalidArgument("noise level sigma must be nonnegative");
    if (!std::isfinite(p.smoothness) || p.smoothness < 0.0) throw InvalidArgument("smoothness w must be nonnegative");
    if (!(p.correlated >= 0.0 && p.correlated <= 1.0)) throw InvalidArgument("correlated fraction must lie in [0,1]");
    if (p.blur_radius < 0) throw InvalidArgument("blur radius must be nonnegative");
}

SyntheticInstance generate(const InstanceParams& params, std::uint64_t seed)
{
    validate(params);
    const std::size_t W = params.width, H = params.height, n = W * H;
    Rng rng(seed);

    SyntheticInstance inst;
    inst.id = "syn-" + std::to_string(seed);
    inst.width = W;
    inst.height = H;
    inst.seed = seed;
    inst.sigma = params.sigma;
    inst.smoothness = params.smoothness;

    const double cx = rng.uniform(0.3, 0.7) * static_cast<double>(W);
    const double cy = rng.uniform(0.3, 0.7) * static_cast<double>(H);
    const double rx = rng.uniform(0.15, 0.35) * static_cast<double>(W);
    const double ry = rng.uniform(0.15, 0.35) * static_cast<double>(H);
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const double c = std::cos(angle), s = std::sin(angle);
    inst.mask = Labeling(n, 0);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            const double dx = static_cast<double>(x) + 0.5 - cx, dy = static_cast<double>(y) + 0.5 - cy;
            const double u = (dx * c + dy * s) / rx, v = (-dx * s + dy * c) / ry;
            if (u * u + v * v <= 1.0) inst.mask[y * W + x] = 1;
        }
    }

    std::vector<double> noise(n);
    for (auto& e : noise) e = rng.normal();
    if (params.correlated > 0.0) {
        std::vector<double> white(n);
        for (auto& e : white) e = rng.normal();
        auto smooth = box_blur(white, W, H, params.blur_radius);
        double mean = 0.0, var = 0.0;
        for (double v : smooth) mean += v;
        mean /= static_cast<double>(n);
        for (double v : smooth) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
        const double a = std::sqrt(1.0 - params.correlated), b = std::sqrt(params.correlated);
        for (std::size_t i = 0; i < n; ++i) noise[i] = a * noise[i] + b * (smooth[i] - mean) * scale;
    }

    inst.intensity.resize(n);
    for (std::size_t i = 0; i < n; ++i) inst.intensity[i] = static_cast<double>(inst.mask[i]) + params.sigma * noise[i];

    const double kappa = params.sigma > 0.0 ? 1.0 / (params.sigma * params.sigma) : 1.0;
    std::vector<std::vector<double>> unaries(n);
    for (std::size_t i = 0; i < n; ++i) unaries[i] = {0.0, -(inst.intensity[i] - 0.5) * kappa};

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            const std::size_t i = y * W + x;
            if (x + 1 < W) pairs.emplace_back(i, i + 1);
            if (y + 1 < H) pairs.emplace_back(i, i + W);
        }
    }
    double mean_sq = 0.0;
    for (auto [a, b] : pairs) {
        const double d = inst.intensity[a] - inst.intensity[b];
        mean_sq += d * d;
    }
    if (!pairs.empty()) mean_sq /= static_cast<double>(pairs.size());
    const double beta = mean_sq > 0.0 ? 1.0 / (2.0 * mean_sq) : 0.0;

    std::vector<EdgeSpec> edges;
    edges.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        const double d = inst.intensity[a] - inst.intensity[b];
        const double p = params.smoothness * std::exp(-beta * d * d);
        edges.push_back({a, b, {0.0, p, p, 0.0}});
    }
    inst.mrf = DiscreteMRF(std::move(unaries), std::move(edges));
    return inst;
}

double iou(const Labeling& gt, const Labeling& pred)
{
    require_same_shape(gt, pred);
    double total = 0.0;
    for (Label l : {0, 1}) {
        std::size_t inter = 0, uni = 0;
        for (std::size_t s = 0; s < gt.size(); ++s) {
            const bool a = gt[s] == l, b = pred[s] == l;
            inter += a && b ? 1 : 0;
            uni += a || b ? 1 : 0;
        }
        total += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    return total / 2.0;
}

double relative_task_loss(const Labeling& gt, const Labeling& best, const Labeling& pred)
{
    return iou(gt, best) - iou(gt, pred);
}

OracleChoice oracle_index(const Labeling& gt, const std::vector<Labeling>& candidates)
{
    if (candidates.empty()) throw InvalidArgument("oracle of an empty candidate set");
    OracleChoice out{0, iou(gt, candidates[0])};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double v = iou(gt, candidates[i]);
        if (v > out.iou) out = {i, v};
    }
    return out;
}

Segments connected_components(const Labeling& x, std::size_t width, std::size_t height)
{
    require_grid(x, width, height);
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    Segments seg;
    seg.component.assign(x.size(), kNone);
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < x.size(); ++start) {
        if (seg.component[start] != kNone) continue;
        const std::size_t id = seg.sizes.size();
        seg.sizes.push_back(0);
        seg.labels.push_back(x[start]);
        seg.component[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++seg.sizes[id];
            const std::size_t r = i / width, c = i % width;
            const std::size_t nbr[4] = {c > 0 ? i - 1 : kNone, c + 1 < width ? i + 1 : kNone,
                                        r > 0 ? i - width : kNone, r + 1 < height ? i + width : kNone};
            for (std::size_t j : nbr) {
                if (j == kNone || seg.component[j] != kNone || x[j] != x[i]) continue;
                seg.component[j] = id;
                stack.push_back(j);
            }
        }
    }
    return seg;
}

double covering_d1(const Labeling& reference, const Labeling& other, std::size_t width, std::size_t height)
{
    return covering(reference, other, width, height, false);
}

double covering_d2(const Labeling& reference, const Labeling& other, std::size_t width, std::size_t height)
{
    return covering(reference, other, width, height, true);
}

double min_cover(const Labeling& reference, const std::vector<Labeling>& solutions, std::size_t m, std::size_t width,
                 std::size_t height)
{
    if (m == 0 || m > solutions.size()) {
        throw InvalidArgument("min-cover needs 1 <= m <= " + std::to_string(solutions.size()));
    }
    double out = 1.0;
    for (std::size_t i = 0; i < m; ++i) out = std::min(out, covering_d1(reference, solutions[i], width, height));
    return out;
}

std::vector<std::vector<double>> candidate_features(const SyntheticInstance& inst,
                                                    const std::vector<Solution>& candidates)
{
    if (candidates.empty()) throw InvalidArgument("no candidates to describe");
    const std::size_t n = inst.mask.size();
    const std::size_t M = candidates.size();
    const double nd = static_cast<double>(n);

    std::vector<std::size_t> votes(n, 0);
    for (const auto& c : candidates) {
        require_grid(c.labeling, inst.width, inst.height);
        for (std::size_t s = 0; s < n; ++s) votes[s] += c.labeling[s] == 1 ? 1 : 0;
    }
    const std::size_t edges = inst.mrf.num_edges();

    std::vector<std::vector<double>> out;
    out.reserve(M);
    for (std::size_t m = 0; m < M; ++m) {
        const Labeling& x = candidates[m].labeling;
        const double fg = static_cast<double>(foreground_count(x)) / nd;
        std::size_t cut = 0;
        for (const auto& e : inst.mrf.edges()) cut += x[e.u] != x[e.v] ? 1 : 0;
        std::size_t agree = 0;
        for (std::size_t s = 0; s < n; ++s) {
            const Label majority = 2 * votes[s] > M ? 1 : 0;
            agree += x[s] == majority ? 1 : 0;
        }
        const auto seg = connected_components(x, inst.width, inst.height);
        const auto fg_parts = static_cast<double>(std::count(seg.labels.begin(), seg.labels.end(), 1));
        out.push_back({(candidates[m].energy - candidates[0].energy) / nd,
                       M > 1 ? static_cast<double>(m) / static_cast<double>(M - 1) : 0.0, fg, 1.0 - fg,
                       edges ? static_cast<double>(cut) / static_cast<double>(edges) : 0.0,
                       static_cast<double>(agree) / nd, fg_parts / 10.0});
    }
    return out;
}

}  // namespace divmbest

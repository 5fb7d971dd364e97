#include "divmbest/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "divmbest/errors.hpp"

namespace divmbest {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void require_dimension(const std::vector<double>& alpha, const CandidateSet& set)
{
    if (set.dimension() != alpha.size()) {
        throw DimensionMismatch("feature dimension " + std::to_string(set.dimension()) + " does not match model " +
                                std::to_string(alpha.size()));
    }
}

}  // namespace

std::size_t CandidateSet::oracle_index() const
{
    if (losses.empty()) throw InvalidArgument("candidate set '" + id + "' is empty");
    return static_cast<std::size_t>(std::min_element(losses.begin(), losses.end()) - losses.begin());
}

void validate(const CandidateSet& set)
{
    if (set.losses.empty()) throw InvalidArgument("candidate set '" + set.id + "' is empty");
    if (set.features.size() != set.losses.size()) {
        throw DimensionMismatch("candidate set '" + set.id + "' has " + std::to_string(set.features.size()) +
                                " feature vectors and " + std::to_string(set.losses.size()) + " losses");
    }
    for (const auto& f : set.features) {
        if (f.size() != set.dimension()) throw DimensionMismatch("candidate set '" + set.id + "' has ragged features");
        for (double v : f) {
            if (!std::isfinite(v)) throw InvalidArgument("candidate set '" + set.id + "' has non-finite features");
        }
    }
    for (double l : set.losses) {
        if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgument("candidate set '" + set.id + "' has a loss outside [0,1]");
    }
}

double score(const RerankerModel& model, const std::vector<double>& psi)
{
    if (psi.size() != model.alpha.size()) {
        throw DimensionMismatch("feature dimension " + std::to_string(psi.size()) + " does not match model " +
                                std::to_string(model.alpha.size()));
    }
    return dot(model.alpha, psi);
}

std::size_t predict(const RerankerModel& model, const CandidateSet& set)
{
    if (set.features.empty()) throw InvalidArgument("candidate set '" + set.id + "' is empty");
    std::size_t best = 0;
    double best_score = score(model, set.features[0]);
    for (std::size_t j = 1; j < set.features.size(); ++j) {
        const double s = score(model, set.features[j]);
        if (s > best_score) {
            best = j;
            best_score = s;
        }
    }
    return best;
}

std::vector<double> relative_losses(const std::vector<double>& losses)
{
    if (losses.empty()) throw InvalidArgument("relative loss of an empty candidate set");
    const double lo = *std::min_element(losses.begin(), losses.end());
    std::vector<double> out(losses.size());
    for (std::size_t j = 0; j < losses.size(); ++j) out[j] = losses[j] - lo;
    return out;
}

double relative_loss(const std::vector<double>& losses, std::size_t j)
{
    const auto rel = relative_losses(losses);
    if (j >= rel.size()) throw InvalidArgument("candidate index out of range");
    return rel[j];
}

double violation(const std::vector<double>& alpha, const CandidateSet& set, std::size_t j, bool margin_rescaling)
{
    require_dimension(alpha, set);
    const std::size_t star = set.oracle_index();
    const double loss = set.losses[j] - set.losses[star];
    const double margin = dot(alpha, set.features[star]) - dot(alpha, set.features[j]);
    return margin_rescaling ? loss - margin : loss * (1.0 - margin);
}

std::size_t find_most_violated(const RerankerModel& model, const CandidateSet& set, bool margin_rescaling)
{
    std::size_t best = 0;
    double best_value = violation(model.alpha, set, 0, margin_rescaling);
    for (std::size_t j = 1; j < set.size(); ++j) {
        const double v = violation(model.alpha, set, j, margin_rescaling);
        if (v > best_value) {
            best = j;
            best_value = v;
        }
    }
    return best;
}

QpResult solve_restricted_qp(const std::vector<std::vector<double>>& a, const std::vector<double>& b, double C,
                             std::vector<double> beta0, double tol, int max_passes)
{
    const std::size_t K = a.size();
    if (b.size() != K) throw DimensionMismatch("QP constraint vectors and offsets differ in count");
    if (!(C > 0.0)) throw InvalidArgument("C must be positive");
    const std::size_t p = K == 0 ? 0 : a[0].size();

    // Index K is the slack multiplier C - sum(beta) with a = 0, b = 0.
    std::vector<double> beta(K + 1, 0.0);
    if (!beta0.empty()) {
        if (beta0.size() > K) throw DimensionMismatch("warm start has too many multipliers");
        std::copy(beta0.begin(), beta0.end(), beta.begin());
    }
    double used = 0.0;
    for (std::size_t c = 0; c < K; ++c) used += beta[c];
    beta[K] = std::max(0.0, C - used);

    std::vector<double> alpha(p, 0.0);
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t d = 0; d < p; ++d) alpha[d] += beta[c] * a[c][d];
    }
    auto gradient = [&](std::size_t c) { return c == K ? 0.0 : b[c] - dot(a[c], alpha); };
    auto dist2 = [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t d = 0; d < p; ++d) {
            const double ai = i == K ? 0.0 : a[i][d];
            const double aj = j == K ? 0.0 : a[j][d];
            s += (ai - aj) * (ai - aj);
        }
        return s;
    };

    QpResult out;
    for (out.passes = 0; out.passes < max_passes; ++out.passes) {
        std::size_t up = 0, down = K + 1;
        double g_up = -std::numeric_limits<double>::infinity(), g_down = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c <= K; ++c) {
            const double g = gradient(c);
            if (g > g_up) {
                g_up = g;
                up = c;
            }
            if (beta[c] > 0.0 && g < g_down) {
                g_down = g;
                down = c;
            }
        }
        if (down > K || g_up - g_down <= tol) break;
        const double q = dist2(up, down);
        double t = q > 0.0 ? (g_up - g_down) / q : beta[down];
        t = std::min(t, beta[down]);
        if (!(t > 0.0)) break;
        beta[up] += t;
        beta[down] -= t;
        for (std::size_t d = 0; d < p; ++d) {
            const double ai = up == K ? 0.0 : a[up][d];
            const double aj = down == K ? 0.0 : a[down][d];
            alpha[d] += t * (ai - aj);
        }
    }

    out.xi = 0.0;
    for (std::size_t c = 0; c < K; ++c) out.xi = std::max(out.xi, b[c] - dot(a[c], alpha));
    out.objective = 0.5 * dot(alpha, alpha) + C * out.xi;
    out.alpha = std::move(alpha);
    beta.pop_back();
    out.beta = std::move(beta);
    return out;
}

TrainResult train_1slack(const std::vector<CandidateSet>& data, double C, double eps, const TrainOptions& options)
{
    if (data.empty()) throw InvalidArgument("no training images");
    if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be positive");
    if (options.max_iters < 1) throw InvalidArgument("iteration limit must be at least 1");
    const std::size_t p = data.front().dimension();
    for (const auto& set : data) {
        validate(set);
        if (set.dimension() != p) throw DimensionMismatch("images disagree on the feature dimension");
    }

    TrainResult out;
    out.model = {std::vector<double>(p, 0.0), C, eps};

    bool spread = false;
    for (const auto& set : data) {
        const auto rel = relative_losses(set.losses);
        spread = spread || std::any_of(rel.begin(), rel.end(), [](double v) { return v > 0.0; });
    }
    if (!spread) {
        out.degenerate = true;
        return out;
    }

    const double n = static_cast<double>(data.size());
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> beta;

    for (;;) {
        std::vector<std::size_t> tuple(data.size());
        std::vector<double> agg(p, 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& set = data[i];
            const std::size_t j = find_most_violated(out.model, set, options.margin_rescaling);
            tuple[i] = j;
            const std::size_t star = set.oracle_index();
            const double l = set.losses[j] - set.losses[star];
            const double w = options.margin_rescaling ? 1.0 : l;
            for (std::size_t d = 0; d < p; ++d) agg[d] += w * (set.features[star][d] - set.features[j][d]) / n;
            loss += l / n;
        }
        out.final_violation = loss - dot(out.model.alpha, agg);
        if (!a.empty() && out.final_violation <= out.xi + eps) break;
        if (std::find(out.working_set.begin(), out.working_set.end(), tuple) != out.working_set.end()) break;
        if (out.iterations >= options.max_iters) break;

        out.working_set.push_back(tuple);
        a.push_back(std::move(agg));
        b.push_back(loss);
        const auto qp = solve_restricted_qp(a, b, C, beta);
        beta = qp.beta;
        out.model.alpha = qp.alpha;
        out.xi = qp.xi;
        out.objectives.push_back(qp.objective);
        ++out.iterations;
    }
    return out;
}

std::vector<std::size_t> mmr_select(const std::vector<double>& scores,
                                    const std::vector<std::vector<double>>& overlap, double theta, std::size_t count)
{
    const std::size_t n = scores.size();
    if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0,1]");
    if (count > n) {
        throw InvalidArgument("cannot select " + std::to_string(count) + " of " + std::to_string(n) + " items");
    }
    if (overlap.size() != n) throw DimensionMismatch("overlap matrix does not match the number of scores");
    for (std::size_t i = 0; i < n; ++i) {
        if (overlap[i].size() != n) throw DimensionMismatch("overlap matrix is not square");
        for (std::size_t j = 0; j < n; ++j) {
            if (!(overlap[i][j] >= 0.0 && overlap[i][j] <= 1.0)) throw InvalidArgument("overlaps must lie in [0,1]");
            if (overlap[i][j] != overlap[j][i]) throw InvalidArgument("overlap matrix is not symmetric");
        }
    }

    std::vector<std::size_t> picked;
    std::vector<char> taken(n, 0);
    while (picked.size() < count) {
        std::size_t best = n;
        double best_value = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double redundancy = 0.0;
            for (std::size_t j : picked) redundancy = std::max(redundancy, overlap[i][j]);
            const double v = theta * scores[i] - (1.0 - theta) * redundancy;
            if (best == n || v > best_value) {
                best = i;
                best_value = v;
            }
        }
        taken[best] = 1;
        picked.push_back(best);
    }
    return picked;
}

}  // namespace divmbest

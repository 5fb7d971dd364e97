#pragma once

#include <string>
#include <vector>

namespace divmbest {

// Candidates of one image: a feature vector and a task loss in [0, 1] each.
struct CandidateSet {
    std::string id;
    std::vector<std::vector<double>> features;
    std::vector<double> losses;

    std::size_t size() const { return losses.size(); }
    std::size_t dimension() const { return features.empty() ? 0 : features.front().size(); }
    // argmin loss, smallest index on ties
    std::size_t oracle_index() const;
};

// Throws on empty sets, ragged features, or losses outside [0, 1].
void validate(const CandidateSet& set);

struct RerankerModel {
    std::vector<double> alpha;
    double C = 1.0;
    double eps = 1e-3;
};

double score(const RerankerModel& model, const std::vector<double>& psi);
// argmax score, smallest index on ties
std::size_t predict(const RerankerModel& model, const CandidateSet& set);

// l_j - min_k l_k
std::vector<double> relative_losses(const std::vector<double>& losses);
double relative_loss(const std::vector<double>& losses, std::size_t j);

// Slack-rescaled violation L_j * (1 - alpha . (psi_oracle - psi_j)), or the
// margin-rescaled L_j - alpha . (psi_oracle - psi_j).
double violation(const std::vector<double>& alpha, const CandidateSet& set, std::size_t j,
                 bool margin_rescaling = false);
// argmax violation, smallest index on ties
std::size_t find_most_violated(const RerankerModel& model, const CandidateSet& set, bool margin_rescaling = false);

// min 1/2 |alpha|^2 + C xi  s.t.  xi >= b_c - alpha . a_c for every c, xi >= 0,
// solved in the dual (multipliers beta_c >= 0, sum beta_c <= C) by pairwise
// coordinate ascent.
struct QpResult {
    std::vector<double> alpha;
    double xi = 0.0;
    double objective = 0.0;
    std::vector<double> beta;
    int passes = 0;
};

QpResult solve_restricted_qp(const std::vector<std::vector<double>>& a, const std::vector<double>& b, double C,
                             std::vector<double> beta0 = {}, double tol = 1e-10, int max_passes = 10000);

struct TrainOptions {
    int max_iters = 1000;
    bool margin_rescaling = false;
};

struct TrainResult {
    RerankerModel model;
    double xi = 0.0;
    int iterations = 0;
    // restricted-QP objective after each added constraint
    std::vector<double> objectives;
    // one candidate index per image for each working-set constraint
    std::vector<std::vector<std::size_t>> working_set;
    // aggregate violation of the most violated tuple at exit
    double final_violation = 0.0;
    // all relative losses were zero; the model is alpha = 0
    bool degenerate = false;
};

TrainResult train_1slack(const std::vector<CandidateSet>& data, double C, double eps, const TrainOptions& options = {});

// Maximal marginal relevance: repeatedly pick the item maximizing
// theta * score_i - (1 - theta) * max_{j selected} overlap[i][j]
// (smallest index on ties).
std::vector<std::size_t> mmr_select(const std::vector<double>& scores,
                                    const std::vector<std::vector<double>>& overlap, double theta, std::size_t count);

}  // namespace divmbest

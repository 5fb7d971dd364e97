#include <algorithm>
#include <string>

#include "divmbest/errors.hpp"
#include "divmbest/inference.hpp"

namespace divmbest {

void require_expansion_metric(const DiscreteMRF& mrf)
{
    for (const auto& e : mrf.edges()) {
        const int k = std::min(e.ku, e.kv);
        for (int alpha = 0; alpha < k; ++alpha) {
            for (int beta = 0; beta < e.ku; ++beta) {
                for (int gamma = 0; gamma < e.kv; ++gamma) {
                    const double lhs = e.at(alpha, alpha) + e.at(beta, gamma);
                    const double rhs = e.at(beta, alpha) + e.at(alpha, gamma);
                    if (lhs > rhs + kEnergyTolerance) {
                        throw NonMetric("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                        ") is not a metric: the expansion move on label " + std::to_string(alpha) +
                                        " is not submodular");
                    }
                }
            }
        }
    }
}

namespace {

// Binary model of one expansion move: y_s = 1 switches node s to alpha.
// Nodes that cannot take alpha get identical rows, so y_s is irrelevant.
DiscreteMRF expansion_move(const DiscreteMRF& mrf, const Labeling& x, Label alpha)
{
    const std::size_t n = mrf.num_nodes();
    auto target = [&](NodeId s) { return alpha < mrf.num_labels(s) ? alpha : x[s]; };

    std::vector<std::vector<double>> unaries(n);
    for (std::size_t s = 0; s < n; ++s) unaries[s] = {mrf.unary(s, x[s]), mrf.unary(s, target(s))};

    std::vector<EdgeSpec> edges;
    edges.reserve(mrf.num_edges());
    for (const auto& e : mrf.edges()) {
        const Label xu = x[e.u], xv = x[e.v];
        const Label au = target(e.u), av = target(e.v);
        edges.push_back({e.u, e.v, {e.at(xu, xv), e.at(xu, av), e.at(au, xv), e.at(au, av)}});
    }
    return {std::move(unaries), std::move(edges)};
}

}  // namespace

ExpansionResult alpha_expansion(const DiscreteMRF& mrf, const Labeling& init, int max_sweeps)
{
    validate_labeling(mrf, init);
    require_expansion_metric(mrf);
    if (max_sweeps < 1) throw InvalidArgument("max_sweeps must be at least 1");

    ExpansionResult out;
    out.labeling = init;
    out.energy = energy(mrf, init);
    out.energy_trace.push_back(out.energy);

    const int labels = mrf.max_labels();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        ++out.sweeps;
        bool improved = false;
        for (Label alpha = 0; alpha < labels; ++alpha) {
            const auto move = graphcut_map(expansion_move(mrf, out.labeling, alpha));
            Labeling candidate = out.labeling;
            for (std::size_t s = 0; s < candidate.size(); ++s) {
                if (move.labeling[s] == 1 && alpha < mrf.num_labels(s)) candidate[s] = alpha;
            }
            const double e = energy(mrf, candidate);
            if (e < out.energy - kEnergyTolerance) {
                out.labeling = std::move(candidate);
                out.energy = e;
                out.energy_trace.push_back(e);
                improved = true;
            }
        }
        if (!improved) break;
    }
    return out;
}

}  // namespace divmbest

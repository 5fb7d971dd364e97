#include <string>

#include "divmbest/errors.hpp"
#include "divmbest/inference.hpp"
#include "divmbest/maxflow.hpp"

namespace divmbest {

void require_binary_submodular(const DiscreteMRF& mrf)
{
    for (std::size_t s = 0; s < mrf.num_nodes(); ++s) {
        if (mrf.num_labels(s) != 2) {
            throw NotBinary("graph cuts need binary labels; node " + std::to_string(s) + " has " +
                            std::to_string(mrf.num_labels(s)));
        }
    }
    for (const auto& e : mrf.edges()) {
        const double a = e.at(0, 0), b = e.at(0, 1), c = e.at(1, 0), d = e.at(1, 1);
        if (a + d > b + c + kEnergyTolerance) {
            throw NotSubmodular("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                ") is not submodular: theta(0,0)+theta(1,1) > theta(0,1)+theta(1,0)");
        }
    }
}

MapResult graphcut_map(const DiscreteMRF& mrf)
{
    require_binary_submodular(mrf);
    const std::size_t n = mrf.num_nodes();

    // label 0 <-> source side, label 1 <-> sink side; cost_one[s] is the
    // extra energy of x_s = 1 over x_s = 0
    std::vector<double> cost_one(n);
    for (std::size_t s = 0; s < n; ++s) cost_one[s] = mrf.unary(s, 1) - mrf.unary(s, 0);

    MaxFlowGraph graph(n);
    // E = A + (C-A) x_u + (D-C) x_v + (B+C-A-D) (1-x_u) x_v
    for (const auto& e : mrf.edges()) {
        const double a = e.at(0, 0), b = e.at(0, 1), c = e.at(1, 0), d = e.at(1, 1);
        cost_one[e.u] += c - a;
        cost_one[e.v] += d - c;
        const double coupling = b + c - a - d;
        if (coupling > 0.0) graph.add_edge(e.u, e.v, coupling, 0.0);
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (cost_one[s] > 0.0) {
            graph.add_terminal_edge(s, cost_one[s], 0.0);
        } else if (cost_one[s] < 0.0) {
            graph.add_terminal_edge(s, 0.0, -cost_one[s]);
        }
    }
    graph.maxflow();

    Labeling x(n, 0);
    for (std::size_t s = 0; s < n; ++s) x[s] = graph.in_sink_side(s) ? 1 : 0;
    return {x, energy(mrf, x)};
}

}  // namespace divmbest

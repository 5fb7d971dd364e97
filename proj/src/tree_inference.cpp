#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "divmbest/errors.hpp"
#include "divmbest/inference.hpp"

namespace divmbest {

namespace {

constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();

// Rooted view of a forest: BFS order per component, parent node/edge per node.
struct RootedForest {
    std::vector<NodeId> order;
    std::vector<NodeId> parent;
    std::vector<std::size_t> parent_edge;
};

RootedForest root_forest(const DiscreteMRF& mrf)
{
    require_forest(mrf);
    const std::size_t n = mrf.num_nodes();
    RootedForest f;
    f.parent.assign(n, n);
    f.parent_edge.assign(n, kNoEdge);
    std::vector<char> seen(n, 0);
    f.order.reserve(n);
    for (NodeId root = 0; root < n; ++root) {
        if (seen[root]) continue;
        seen[root] = 1;
        std::size_t head = f.order.size();
        f.order.push_back(root);
        while (head < f.order.size()) {
            const NodeId s = f.order[head++];
            for (std::size_t e : mrf.incident(s)) {
                const auto& edge = mrf.edge(e);
                const NodeId t = edge.u == s ? edge.v : edge.u;
                if (seen[t]) continue;
                seen[t] = 1;
                f.parent[t] = s;
                f.parent_edge[t] = e;
                f.order.push_back(t);
            }
        }
    }
    return f;
}

// theta_e(x_s = a, x_t = b) regardless of storage orientation.
double pair_energy(const Edge& e, NodeId s, Label a, Label b)
{
    return e.u == s ? e.at(a, b) : e.at(b, a);
}

// Message from `child` to its parent: m(b) = min_a [belief_child(a) + theta(a, b)].
std::vector<double> upward_message(const DiscreteMRF& mrf, const Edge& e, NodeId child, NodeId parent,
                                   const std::vector<double>& child_belief, std::vector<Label>* argmins)
{
    const int kc = mrf.num_labels(child);
    const int kp = mrf.num_labels(parent);
    std::vector<double> msg(static_cast<std::size_t>(kp), std::numeric_limits<double>::infinity());
    if (argmins) argmins->assign(static_cast<std::size_t>(kp), 0);
    for (int b = 0; b < kp; ++b) {
        for (int a = 0; a < kc; ++a) {
            const double v = child_belief[static_cast<std::size_t>(a)] + pair_energy(e, child, a, b);
            if (v < msg[static_cast<std::size_t>(b)]) {
                msg[static_cast<std::size_t>(b)] = v;
                if (argmins) (*argmins)[static_cast<std::size_t>(b)] = a;
            }
        }
    }
    return msg;
}

}  // namespace

void require_forest(const DiscreteMRF& mrf)
{
    std::vector<NodeId> root(mrf.num_nodes());
    std::iota(root.begin(), root.end(), NodeId{0});
    auto find = [&](NodeId s) {
        while (root[s] != s) {
            root[s] = root[root[s]];
            s = root[s];
        }
        return s;
    };
    for (const auto& e : mrf.edges()) {
        const NodeId a = find(e.u);
        const NodeId b = find(e.v);
        if (a == b) {
            throw NotATree("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") closes a cycle");
        }
        root[a] = b;
    }
}

MapResult tree_map(const DiscreteMRF& mrf)
{
    const auto forest = root_forest(mrf);
    const std::size_t n = mrf.num_nodes();

    // belief[s] = unary + messages from children, filled leaves-first
    std::vector<std::vector<double>> belief(n);
    for (NodeId s = 0; s < n; ++s) {
        const auto th = mrf.unary(s);
        belief[s].assign(th.begin(), th.end());
    }
    std::vector<std::vector<Label>> backpointer(n);
    for (auto it = forest.order.rbegin(); it != forest.order.rend(); ++it) {
        const NodeId s = *it;
        if (forest.parent_edge[s] == kNoEdge) continue;
        const NodeId p = forest.parent[s];
        const auto msg = upward_message(mrf, mrf.edge(forest.parent_edge[s]), s, p, belief[s], &backpointer[s]);
        for (std::size_t b = 0; b < msg.size(); ++b) belief[p][b] += msg[b];
    }

    Labeling x(n, 0);
    for (NodeId s : forest.order) {
        if (forest.parent_edge[s] == kNoEdge) {
            const auto& b = belief[s];
            x[s] = static_cast<Label>(std::min_element(b.begin(), b.end()) - b.begin());
        } else {
            x[s] = backpointer[s][static_cast<std::size_t>(x[forest.parent[s]])];
        }
    }
    return {x, energy(mrf, x)};
}

MinMarginalTable tree_min_marginals(const DiscreteMRF& mrf)
{
    const auto forest = root_forest(mrf);
    const std::size_t n = mrf.num_nodes();

    std::vector<std::vector<double>> up_belief(n);  // unary + messages from children
    std::vector<std::vector<double>> up_msg(n);     // message s -> parent(s)
    for (NodeId s = 0; s < n; ++s) {
        const auto th = mrf.unary(s);
        up_belief[s].assign(th.begin(), th.end());
    }
    for (auto it = forest.order.rbegin(); it != forest.order.rend(); ++it) {
        const NodeId s = *it;
        if (forest.parent_edge[s] == kNoEdge) continue;
        const NodeId p = forest.parent[s];
        up_msg[s] = upward_message(mrf, mrf.edge(forest.parent_edge[s]), s, p, up_belief[s], nullptr);
        for (std::size_t b = 0; b < up_msg[s].size(); ++b) up_belief[p][b] += up_msg[s][b];
    }

    std::vector<std::vector<NodeId>> children(n);
    for (NodeId s : forest.order) {
        if (forest.parent_edge[s] != kNoEdge) children[forest.parent[s]].push_back(s);
    }

    // down_msg[s] = message parent(s) -> s; built root-first from sums of
    // incoming messages (no subtraction, so penalties never cancel)
    std::vector<std::vector<double>> down_msg(n);
    MinMarginalTable table;
    table.values.resize(n);
    for (NodeId p : forest.order) {
        table.values[p] = up_belief[p];
        if (forest.parent_edge[p] != kNoEdge) {
            for (std::size_t a = 0; a < down_msg[p].size(); ++a) table.values[p][a] += down_msg[p][a];
        }
        for (NodeId s : children[p]) {
            const auto th = mrf.unary(p);
            std::vector<double> rest(th.begin(), th.end());
            if (forest.parent_edge[p] != kNoEdge) {
                for (std::size_t b = 0; b < rest.size(); ++b) rest[b] += down_msg[p][b];
            }
            for (NodeId c : children[p]) {
                if (c == s) continue;
                for (std::size_t b = 0; b < rest.size(); ++b) rest[b] += up_msg[c][b];
            }
            down_msg[s] = upward_message(mrf, mrf.edge(forest.parent_edge[s]), p, s, rest, nullptr);
        }
    }
    return table;
}

}  // namespace divmbest

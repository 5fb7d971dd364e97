#include "divmbest/maxflow.hpp"

#include <algorithm>
#include <limits>

#include "divmbest/errors.hpp"

namespace divmbest {

MaxFlowGraph::MaxFlowGraph(std::size_t num_nodes) : nodes_(num_nodes) {}

std::size_t MaxFlowGraph::add_node()
{
    nodes_.emplace_back();
    return nodes_.size() - 1;
}

void MaxFlowGraph::add_terminal_edge(std::size_t i, double source_cap, double sink_cap)
{
    if (source_cap < 0.0 || sink_cap < 0.0) throw InvalidArgument("negative terminal capacity");
    // flow min(source, sink) straight through the node and keep the difference
    const double both = std::min(source_cap, sink_cap);
    flow_ += both;
    nodes_[i].terminal += (source_cap - both) - (sink_cap - both);
}

void MaxFlowGraph::add_edge(std::size_t i, std::size_t j, double cap, double rev_cap)
{
    if (cap < 0.0 || rev_cap < 0.0) throw InvalidArgument("negative edge capacity");
    if (i == j) return;
    const std::size_t a = arcs_.size();
    arcs_.push_back({j, nodes_[i].first, a + 1, cap});
    arcs_.push_back({i, nodes_[j].first, a, rev_cap});
    nodes_[i].first = a;
    nodes_[j].first = a + 1;
}

void MaxFlowGraph::set_active(std::size_t i)
{
    if (nodes_[i].active) return;
    nodes_[i].active = true;
    active_.push_back(i);
}

// Extends the tree of node i by one layer. Returns the arc joining the source
// tree to the sink tree (oriented source side -> sink side) if one is found.
std::size_t MaxFlowGraph::grow(std::size_t i)
{
    Node& ni = nodes_[i];
    for (std::size_t a = ni.first; a != kNone; a = arcs_[a].next) {
        const std::size_t j = arcs_[a].head;
        Node& nj = nodes_[j];
        if (ni.tree == Tree::Source) {
            if (arcs_[a].residual <= 0.0) continue;
            if (nj.tree == Tree::Free) {
                nj.tree = Tree::Source;
                nj.parent = arcs_[a].sister;
                nj.timestamp = ni.timestamp;
                nj.dist = ni.dist + 1;
                set_active(j);
            } else if (nj.tree == Tree::Sink) {
                return a;
            }
        } else {
            const std::size_t back = arcs_[a].sister;
            if (arcs_[back].residual <= 0.0) continue;
            if (nj.tree == Tree::Free) {
                nj.tree = Tree::Sink;
                nj.parent = back;
                nj.timestamp = ni.timestamp;
                nj.dist = ni.dist + 1;
                set_active(j);
            } else if (nj.tree == Tree::Source) {
                return back;
            }
        }
    }
    return kNone;
}

void MaxFlowGraph::augment(std::size_t middle)
{
    const std::size_t source_end = arcs_[arcs_[middle].sister].head;
    const std::size_t sink_end = arcs_[middle].head;

    double bottleneck = arcs_[middle].residual;
    std::size_t i = source_end;
    while (nodes_[i].parent != kTerminal) {
        const std::size_t a = nodes_[i].parent;
        bottleneck = std::min(bottleneck, arcs_[arcs_[a].sister].residual);
        i = arcs_[a].head;
    }
    bottleneck = std::min(bottleneck, nodes_[i].terminal);
    i = sink_end;
    while (nodes_[i].parent != kTerminal) {
        const std::size_t a = nodes_[i].parent;
        bottleneck = std::min(bottleneck, arcs_[a].residual);
        i = arcs_[a].head;
    }
    bottleneck = std::min(bottleneck, -nodes_[i].terminal);

    arcs_[middle].residual -= bottleneck;
    arcs_[arcs_[middle].sister].residual += bottleneck;

    i = source_end;
    while (nodes_[i].parent != kTerminal) {
        const std::size_t a = nodes_[i].parent;
        const std::size_t down = arcs_[a].sister;
        arcs_[a].residual += bottleneck;
        arcs_[down].residual -= bottleneck;
        const std::size_t next = arcs_[a].head;
        if (arcs_[down].residual <= 0.0) {
            arcs_[down].residual = 0.0;
            nodes_[i].parent = kOrphan;
            orphans_.push_front(i);
        }
        i = next;
    }
    nodes_[i].terminal -= bottleneck;
    if (nodes_[i].terminal <= 0.0) {
        nodes_[i].terminal = 0.0;
        nodes_[i].parent = kOrphan;
        orphans_.push_front(i);
    }

    i = sink_end;
    while (nodes_[i].parent != kTerminal) {
        const std::size_t a = nodes_[i].parent;
        arcs_[a].residual -= bottleneck;
        arcs_[arcs_[a].sister].residual += bottleneck;
        const std::size_t next = arcs_[a].head;
        if (arcs_[a].residual <= 0.0) {
            arcs_[a].residual = 0.0;
            nodes_[i].parent = kOrphan;
            orphans_.push_front(i);
        }
        i = next;
    }
    nodes_[i].terminal += bottleneck;
    if (nodes_[i].terminal >= 0.0) {
        nodes_[i].terminal = 0.0;
        nodes_[i].parent = kOrphan;
        orphans_.push_front(i);
    }

    flow_ += bottleneck;
    ++augmentations_;
}

void MaxFlowGraph::adopt(std::size_t i)
{
    const Tree tree = nodes_[i].tree;
    constexpr long kInfiniteDist = std::numeric_limits<long>::max();

    std::size_t best_arc = kNone;
    long best_dist = kInfiniteDist;
    for (std::size_t a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
        const double residual = tree == Tree::Source ? arcs_[arcs_[a].sister].residual : arcs_[a].residual;
        if (residual <= 0.0) continue;
        std::size_t j = arcs_[a].head;
        if (nodes_[j].tree != tree || nodes_[j].parent == kNone) continue;

        // does j still trace back to a terminal?
        long d = 0;
        while (true) {
            if (nodes_[j].timestamp == time_) {
                d += nodes_[j].dist;
                break;
            }
            const std::size_t up = nodes_[j].parent;
            ++d;
            if (up == kTerminal) {
                nodes_[j].timestamp = time_;
                nodes_[j].dist = 1;
                break;
            }
            if (up == kOrphan) {
                d = kInfiniteDist;
                break;
            }
            j = arcs_[up].head;
        }
        if (d == kInfiniteDist) continue;
        if (d < best_dist) {
            best_arc = a;
            best_dist = d;
        }
        for (j = arcs_[a].head; nodes_[j].timestamp != time_; j = arcs_[nodes_[j].parent].head) {
            nodes_[j].timestamp = time_;
            nodes_[j].dist = d--;
        }
    }

    if (best_arc != kNone) {
        nodes_[i].parent = best_arc;
        nodes_[i].timestamp = time_;
        nodes_[i].dist = best_dist + 1;
        return;
    }

    // no valid parent: i leaves its tree and its children become orphans
    for (std::size_t a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
        const std::size_t j = arcs_[a].head;
        Node& nj = nodes_[j];
        if (nj.tree != tree || nj.parent == kNone) continue;
        const double residual = tree == Tree::Source ? arcs_[arcs_[a].sister].residual : arcs_[a].residual;
        if (residual > 0.0) set_active(j);
        if (nj.parent != kTerminal && nj.parent != kOrphan && arcs_[nj.parent].head == i) {
            nj.parent = kOrphan;
            orphans_.push_back(j);
        }
    }
    nodes_[i].tree = Tree::Free;
    nodes_[i].parent = kNone;
}

double MaxFlowGraph::maxflow()
{
    active_.clear();
    orphans_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Node& n = nodes_[i];
        n.active = false;
        n.timestamp = 0;
        n.dist = 1;
        if (n.terminal > 0.0) {
            n.tree = Tree::Source;
            n.parent = kTerminal;
            set_active(i);
        } else if (n.terminal < 0.0) {
            n.tree = Tree::Sink;
            n.parent = kTerminal;
            set_active(i);
        } else {
            n.tree = Tree::Free;
            n.parent = kNone;
        }
    }

    while (!active_.empty()) {
        const std::size_t i = active_.front();
        if (nodes_[i].tree == Tree::Free) {
            active_.pop_front();
            nodes_[i].active = false;
            continue;
        }
        const std::size_t middle = grow(i);
        if (middle == kNone) {
            active_.pop_front();
            nodes_[i].active = false;
            continue;
        }
        ++time_;
        augment(middle);
        while (!orphans_.empty()) {
            const std::size_t o = orphans_.front();
            orphans_.pop_front();
            adopt(o);
        }
    }

    compute_cut();
    return flow_;
}

void MaxFlowGraph::compute_cut()
{
    sink_side_.assign(nodes_.size(), 0);
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].terminal < 0.0) {
            sink_side_[i] = 1;
            queue.push_back(i);
        }
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const std::size_t v = queue[q];
        for (std::size_t a = nodes_[v].first; a != kNone; a = arcs_[a].next) {
            const std::size_t u = arcs_[a].head;
            if (!sink_side_[u] && arcs_[arcs_[a].sister].residual > 0.0) {
                sink_side_[u] = 1;
                queue.push_back(u);
            }
        }
    }
}

}  // namespace divmbest

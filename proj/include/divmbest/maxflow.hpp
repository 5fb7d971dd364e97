#pragma once

#include <cstddef>
#include <deque>
#include <vector>

namespace divmbest {

// s-t max-flow on a graph with real capacities, using the Boykov-Kolmogorov
// search-tree algorithm (two trees grown from the terminals, augment along
// the connecting path, re-adopt orphans).
//
// Terminal edges are given per node: `source_cap` from the source into the
// node, `sink_cap` from the node into the sink. After maxflow(),
// in_sink_side(i) reports the minimal sink side of a minimum cut: nodes that
// can still reach the sink in the residual graph.
class MaxFlowGraph {
public:
    explicit MaxFlowGraph(std::size_t num_nodes = 0);

    std::size_t add_node();
    std::size_t num_nodes() const { return nodes_.size(); }

    // Accumulates onto the node's terminal capacities. Both must be >= 0.
    void add_terminal_edge(std::size_t i, double source_cap, double sink_cap);
    // Edge i->j with capacity `cap` and j->i with capacity `rev_cap`.
    void add_edge(std::size_t i, std::size_t j, double cap, double rev_cap);

    double maxflow();

    bool in_sink_side(std::size_t i) const { return sink_side_[i] != 0; }
    std::size_t augmentations() const { return augmentations_; }

private:
    enum class Tree : unsigned char { Free, Source, Sink };
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    static constexpr std::size_t kTerminal = static_cast<std::size_t>(-2);
    static constexpr std::size_t kOrphan = static_cast<std::size_t>(-3);

    struct Arc {
        std::size_t head;
        std::size_t next;    // next arc out of the same tail
        std::size_t sister;  // reverse arc
        double residual;
    };

    struct Node {
        std::size_t first = kNone;    // first outgoing arc
        std::size_t parent = kNone;   // arc to the parent, kTerminal, kOrphan or kNone
        Tree tree = Tree::Free;
        // > 0: residual source->node capacity, < 0: residual node->sink capacity
        double terminal = 0.0;
        long timestamp = 0;
        long dist = 0;
        bool active = false;
    };

    void set_active(std::size_t i);
    std::size_t grow(std::size_t i);
    void augment(std::size_t middle);
    void adopt(std::size_t i);
    void compute_cut();

    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    std::deque<std::size_t> active_;
    std::deque<std::size_t> orphans_;
    std::vector<char> sink_side_;
    double flow_ = 0.0;
    long time_ = 0;
    std::size_t augmentations_ = 0;
};

}  // namespace divmbest

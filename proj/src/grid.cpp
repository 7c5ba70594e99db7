#include "aisim/grid.hpp"

#include "aisim/error.hpp"
#include "aisim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

namespace aisim {

std::string_view to_string(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::Generator: return "generator";
        case NodeKind::Load: return "load";
        case NodeKind::Vsg: return "vsg";
    }
    return "load";
}

NodeKind node_kind_from_string(std::string_view name) {
    if (name == "generator" || name == "gen") return NodeKind::Generator;
    if (name == "load") return NodeKind::Load;
    if (name == "vsg") return NodeKind::Vsg;
    throw InvalidGrid("unknown node kind '" + std::string(name) + "'");
}

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void validate_node(const Node& n) {
    if (!std::isfinite(n.P)) throw InvalidGrid("node " + std::to_string(n.id) + ": P is not finite");
    if (!positive(n.d)) throw NonPositiveParameter(n.id, "d");
    switch (n.kind) {
        case NodeKind::Generator:
            if (!positive(n.m)) throw NonPositiveParameter(n.id, "m");
            break;
        case NodeKind::Vsg:
            if (!positive(n.m_min)) throw NonPositiveParameter(n.id, "m_min");
            if (!positive(n.alpha)) throw NonPositiveParameter(n.id, "alpha");
            if (!positive(n.beta)) throw NonPositiveParameter(n.id, "beta");
            if (n.m != 0.0 && !positive(n.m)) throw NonPositiveParameter(n.id, "m");
            break;
        case NodeKind::Load:
            break;
    }
}

}  // namespace

Grid Grid::build(GridSpec spec) {
    const std::size_t n = spec.nodes.size();
    if (n == 0) throw InvalidGrid("grid has no nodes");
    if (!positive(spec.frequency_base_hz)) throw InvalidGrid("frequency_base_hz must be > 0");

    std::sort(spec.nodes.begin(), spec.nodes.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.nodes[i].id != i) {
            throw InvalidGrid("node ids must be contiguous 0..N-1 (missing or repeated id near " +
                              std::to_string(i) + ")");
        }
        validate_node(spec.nodes[i]);
    }

    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (std::size_t k = 0; k < spec.lines.size(); ++k) {
        const Line& l = spec.lines[k];
        if (l.from >= n || l.to >= n) {
            throw InvalidGrid("line " + std::to_string(k) + " references a missing node");
        }
        if (l.from == l.to) throw InvalidGrid("line " + std::to_string(k) + " is a self loop");
        if (!positive(l.b)) throw InvalidGrid("line " + std::to_string(k) + ": b must be > 0");
        auto key = std::minmax(l.from, l.to);
        if (!seen.emplace(key.first, key.second).second) throw DuplicateLine(key.first, key.second);
        adjacency[l.from].push_back(l.to);
        adjacency[l.to].push_back(l.from);
    }

    std::vector<bool> reached(n, false);
    std::vector<std::size_t> stack{0};
    reached[0] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : adjacency[u]) {
            if (!reached[v]) {
                reached[v] = true;
                stack.push_back(v);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!reached[i]) throw DisconnectedGraph(i);
    }

    // Neumaier summation keeps the balance check independent of node order.
    double sum = 0.0;
    double comp = 0.0;
    for (const Node& node : spec.nodes) {
        const double t = sum + node.P;
        comp += std::abs(sum) >= std::abs(node.P) ? (sum - t) + node.P : (node.P - t) + sum;
        sum = t;
    }
    const double imbalance = std::abs(sum + comp);
    if (imbalance > kBalanceTolerance) throw PowerImbalance(imbalance);

    Grid g;
    g.frequency_base_hz_ = spec.frequency_base_hz;
    g.nodes_ = std::move(spec.nodes);
    g.lines_ = std::move(spec.lines);
    g.from_.reserve(g.lines_.size());
    g.to_.reserve(g.lines_.size());
    g.b_.reserve(g.lines_.size());
    for (const Line& l : g.lines_) {
        g.from_.push_back(static_cast<std::uint32_t>(l.from));
        g.to_.push_back(static_cast<std::uint32_t>(l.to));
        g.b_.push_back(l.b);
    }
    g.inertial_index_.assign(n, -1);
    g.vsg_index_.assign(n, -1);
    for (const Node& node : g.nodes_) {
        if (node.inertial()) {
            g.inertial_index_[node.id] = static_cast<int>(g.inertial_nodes_.size());
            g.inertial_nodes_.push_back(node.id);
        }
        if (node.kind == NodeKind::Vsg) {
            g.vsg_index_[node.id] = static_cast<int>(g.vsg_nodes_.size());
            g.vsg_nodes_.push_back(node.id);
        }
    }
    return g;
}

double Grid::total_damping() const noexcept {
    return std::accumulate(nodes_.begin(), nodes_.end(), 0.0,
                           [](double acc, const Node& n) { return acc + n.d; });
}

double Grid::minimum_inertia_budget() const noexcept {
    double total = 0.0;
    for (const Node& n : nodes_) {
        if (n.kind == NodeKind::Generator) total += n.m;
        if (n.kind == NodeKind::Vsg) total += n.m_min;
    }
    return total;
}

GridSpec Grid::spec() const {
    return GridSpec{frequency_base_hz_, nodes_, lines_};
}

Grid sample_rts_params(const Grid& grid, std::uint64_t seed) {
    GridSpec spec = grid.spec();
    for (Node& n : spec.nodes) {
        if (!n.inertial()) continue;
        auto rng = SplitMix64::stream(seed, n.id);
        const double m = rng.uniform(kRtsInertiaLow, kRtsInertiaHigh);
        n.m = m;
        n.d = kRtsDampingRatio * m;
        if (n.kind == NodeKind::Vsg) n.m_min = kRtsMinInertiaFraction * m;
    }
    return Grid::build(std::move(spec));
}

Grid promote_to_vsg(const Grid& grid, std::span<const std::size_t> node_ids, double alpha,
                    double beta, double m_min_rule) {
    GridSpec spec = grid.spec();
    for (std::size_t id : node_ids) {
        if (id >= spec.nodes.size() || spec.nodes[id].kind != NodeKind::Generator) {
            throw NotAGenerator(id);
        }
        Node& n = spec.nodes[id];
        n.kind = NodeKind::Vsg;
        n.m_min = m_min_rule * n.m;
        n.alpha = alpha;
        n.beta = beta;
    }
    return Grid::build(std::move(spec));
}

}  // namespace aisim

#include "aisim/synthetic.hpp"

#include "aisim/equilibrium.hpp"
#include "aisim/error.hpp"
#include "aisim/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <utility>

namespace aisim::synthetic {

namespace {

// Stream tags keep the generators independent for the same seed.
constexpr std::uint64_t kTagMixed = 0x6d69786564;
constexpr std::uint64_t kTagVsg = 0x616c6c767367;
constexpr std::uint64_t kTag40 = 0x73796e3430;
constexpr std::uint64_t kTagBarbell = 0x626172626c;
constexpr std::uint64_t kTagRtsChoice = 0x727473766b;

std::string area_name(std::size_t k) { return std::string(1, static_cast<char>('A' + k)); }

/// Spreads the imbalance evenly so sum P is zero to rounding.
void balance(std::vector<Node>& nodes) {
    double sum = 0.0;
    for (const Node& n : nodes) sum += n.P;
    const double shift = sum / static_cast<double>(nodes.size());
    for (Node& n : nodes) n.P -= shift;
}

/// Random tree plus `extra` chords, no duplicates.
std::vector<Line> random_topology(SplitMix64& rng, std::size_t n, std::size_t extra, double b_lo,
                                  double b_hi) {
    std::vector<Line> lines;
    std::set<std::pair<std::size_t, std::size_t>> used;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = rng.below(i);
        used.emplace(j, i);
        lines.push_back({j, i, rng.uniform(b_lo, b_hi)});
    }
    for (std::size_t k = 0, tries = 0; k < extra && tries < 20 * extra; ++tries) {
        std::size_t a = rng.below(n);
        std::size_t b = rng.below(n);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (!used.emplace(a, b).second) continue;
        lines.push_back({a, b, rng.uniform(b_lo, b_hi)});
        ++k;
    }
    return lines;
}

/// Builds the grid, doubling every coupling until a fixed point exists in the
/// normal operating regime.
Grid feasible(GridSpec spec) {
    for (int attempt = 0; attempt < 12; ++attempt) {
        Grid g = Grid::build(spec);
        try {
            (void)solve_fixed_point(g);
            return g;
        } catch (const NoConvergence&) {
        } catch (const AngleOutOfRange&) {
        }
        for (Line& l : spec.lines) l.b *= 2.0;
    }
    throw Error("synthetic grid: no feasible operating point");
}

}  // namespace

Grid random_mixed(std::uint64_t seed, std::size_t n_min, std::size_t n_max) {
    SplitMix64 rng = SplitMix64::stream(seed, kTagMixed);
    const std::size_t n = n_min + rng.below(n_max - n_min + 1);
    GridSpec spec;
    for (std::size_t i = 0; i < n; ++i) {
        Node node;
        node.id = i;
        const double r = rng.uniform();
        node.kind = r < 0.4 ? NodeKind::Generator : r < 0.6 ? NodeKind::Vsg : NodeKind::Load;
        if (i == 0) node.kind = NodeKind::Generator;  // at least one inertial node
        const double m = rng.uniform(kRtsInertiaLow, kRtsInertiaHigh);
        switch (node.kind) {
            case NodeKind::Generator:
                node.P = rng.uniform(0.2, 1.0);
                node.m = m;
                node.d = kRtsDampingRatio * m;
                break;
            case NodeKind::Vsg:
                node.P = rng.uniform(0.2, 1.0);
                node.m = m;
                node.m_min = kRtsMinInertiaFraction * m;
                node.d = kRtsDampingRatio * m;
                node.alpha = rng.uniform(0.5, 10.0);
                node.beta = rng.uniform(0.5, 10.0);
                break;
            case NodeKind::Load:
                node.P = -rng.uniform(0.2, 1.0);
                node.d = rng.uniform(0.05, 0.5);
                break;
        }
        node.area = area_name(rng.below(3));
        spec.nodes.push_back(node);
    }
    balance(spec.nodes);
    spec.lines = random_topology(rng, n, n / 2, 1.0, 3.0);
    return feasible(std::move(spec));
}

Grid random_all_vsg(std::uint64_t seed, std::size_t n_max) {
    SplitMix64 rng = SplitMix64::stream(seed, kTagVsg);
    const std::size_t n = 2 + rng.below(n_max - 1);
    GridSpec spec;
    for (std::size_t i = 0; i < n; ++i) {
        Node node;
        node.id = i;
        node.kind = NodeKind::Vsg;
        node.P = rng.uniform(-0.5, 0.5);
        node.m = rng.uniform(kRtsInertiaLow, kRtsInertiaHigh);
        node.m_min = kRtsMinInertiaFraction * node.m;
        node.d = kRtsDampingRatio * node.m;
        node.alpha = rng.uniform(0.5, 10.0);
        node.beta = rng.uniform(0.5, 10.0);
        node.area = "A";
        spec.nodes.push_back(node);
    }
    balance(spec.nodes);
    spec.lines = random_topology(rng, n, n / 2, 1.0, 3.0);
    return feasible(std::move(spec));
}

Grid four_node() {
    GridSpec spec;
    spec.nodes = {
        {0, NodeKind::Generator, 1.0, 3.0, 2.0, 0.0, 0.0, 0.0, "A"},
        {1, NodeKind::Vsg, 0.5, 2.0, 1.5, 0.5, 5.0, 5.0, "A"},
        {2, NodeKind::Load, -0.8, 2.5, 0.0, 0.0, 0.0, 0.0, "B"},
        {3, NodeKind::Load, -0.7, 2.5, 0.0, 0.0, 0.0, 0.0, "B"},
    };
    spec.lines = {{0, 1, 2.0}, {1, 2, 2.0}, {2, 3, 2.0}, {0, 3, 2.0}, {0, 2, 1.5}};
    return Grid::build(std::move(spec));
}

// ============================================================================
// RTS-96
// ============================================================================

namespace {

struct Branch {
    int from;
    int to;
    double x;  // reactance, pu on 100 MVA
};

// IEEE RTS-24 branches; parallel circuits already merged (x halved).
constexpr std::array<Branch, 34> kRts24Branches = {{
    {1, 2, 0.0139},  {1, 3, 0.2112},  {1, 5, 0.0845},  {2, 4, 0.1267},  {2, 6, 0.1920},
    {3, 9, 0.1190},  {3, 24, 0.0839}, {4, 9, 0.1037},  {5, 10, 0.0883}, {6, 10, 0.0605},
    {7, 8, 0.0614},  {8, 9, 0.1651},  {8, 10, 0.1651}, {9, 11, 0.0839}, {9, 12, 0.0839},
    {10, 11, 0.0839}, {10, 12, 0.0839}, {11, 13, 0.0476}, {11, 14, 0.0418}, {12, 13, 0.0476},
    {12, 23, 0.0966}, {13, 23, 0.0865}, {14, 16, 0.0389}, {15, 16, 0.0173}, {15, 21, 0.0245},
    {15, 24, 0.0519}, {16, 17, 0.0259}, {16, 19, 0.0231}, {17, 18, 0.0144}, {17, 22, 0.1053},
    {18, 21, 0.01295}, {19, 20, 0.0198}, {20, 23, 0.0108}, {21, 22, 0.0678},
}};

// Bus load and installed generation, MW.
constexpr std::array<double, 24> kRts24Load = {108, 97,  180, 74,  71,  136, 125, 171,
                                               175, 195, 0,   0,   265, 194, 317, 100,
                                               0,   333, 181, 128, 0,   0,   0,   0};
constexpr std::array<double, 24> kRts24Capacity = {192, 192, 0,   0,   0,   0,   300, 0,
                                                   0,   0,   0,   0,   591, 0,   215, 155,
                                                   0,   400, 0,   0,   400, 300, 660, 0};

struct Tie {
    int area_from;
    int bus_from;
    int area_to;
    int bus_to;
    double x;
};

// Area interconnections; area 3 bus 25 is the 73rd node.
constexpr std::array<Tie, 6> kRts96Ties = {{
    {0, 7, 1, 3, 0.161},
    {0, 13, 1, 15, 0.075},
    {0, 23, 1, 17, 0.074},
    {1, 23, 2, 18, 0.104},
    {0, 21, 2, 25, 0.097},
    {2, 25, 2, 23, 0.059},
}};

std::size_t rts_node(int area, int bus) {
    if (bus == 25) return 72;
    return static_cast<std::size_t>(area * 24 + bus - 1);
}

}  // namespace

Grid rts96_like(std::uint64_t seed) {
    double load = 0.0;
    double capacity = 0.0;
    for (std::size_t b = 0; b < 24; ++b) {
        load += kRts24Load[b];
        capacity += kRts24Capacity[b];
    }
    const double dispatch = load / capacity;

    GridSpec spec;
    for (int area = 0; area < 3; ++area) {
        for (int bus = 1; bus <= 24; ++bus) {
            Node node;
            node.id = rts_node(area, bus);
            node.area = area_name(static_cast<std::size_t>(area));
            const double gen = kRts24Capacity[bus - 1] * dispatch;
            node.P = mw_to_pu(gen - kRts24Load[bus - 1]);
            if (kRts24Capacity[bus - 1] > 0.0) {
                node.kind = NodeKind::Generator;
                node.m = 1.0;  // replaced by sample_rts_params
                node.d = kRtsDampingRatio;
            } else {
                node.kind = NodeKind::Load;
            }
            spec.nodes.push_back(node);
        }
        for (const Branch& br : kRts24Branches) {
            spec.lines.push_back({rts_node(area, br.from), rts_node(area, br.to), 1.0 / br.x});
        }
    }
    Node hub;
    hub.id = 72;
    hub.kind = NodeKind::Load;
    hub.area = area_name(2);
    spec.nodes.push_back(hub);
    for (const Tie& t : kRts96Ties) {
        spec.lines.push_back({rts_node(t.area_from, t.bus_from), rts_node(t.area_to, t.bus_to), 1.0 / t.x});
    }
    balance(spec.nodes);
    return sample_rts_params(feasible(std::move(spec)), seed);
}

std::vector<std::size_t> rts96_vsg_choice(const Grid& grid, std::uint64_t seed) {
    SplitMix64 rng = SplitMix64::stream(seed, kTagRtsChoice);
    std::vector<std::size_t> chosen;
    for (std::size_t a = 0; a < 3; ++a) {
        std::vector<std::size_t> gens;
        for (const Node& n : grid.nodes()) {
            if (n.kind == NodeKind::Generator && n.area == area_name(a)) gens.push_back(n.id);
        }
        for (std::size_t k = 0; k < 2 && k < gens.size(); ++k) {
            const std::size_t j = k + rng.below(gens.size() - k);
            std::swap(gens[k], gens[j]);
            chosen.push_back(gens[k]);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

// ============================================================================
// 40-node geometric grid
// ============================================================================

Grid synthetic40(std::uint64_t seed) {
    constexpr std::size_t n = 40;
    constexpr std::size_t generators = 16;
    SplitMix64 rng = SplitMix64::stream(seed, kTag40);

    std::vector<std::array<double, 2>> pos(n);
    for (auto& p : pos) p = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 1.0)};
    auto dist = [&](std::size_t i, std::size_t j) {
        return std::hypot(pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
    };

    std::vector<bool> is_gen(n, false);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t k = 0; k < generators; ++k) {
        const std::size_t j = k + rng.below(n - k);
        std::swap(order[k], order[j]);
        is_gen[order[k]] = true;
    }

    GridSpec spec;
    double gen_total = 0.0;
    double load_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Node node;
        node.id = i;
        node.area = area_name(std::min<std::size_t>(2, static_cast<std::size_t>(pos[i][0])));
        if (is_gen[i]) {
            node.kind = NodeKind::Generator;
            node.P = rng.uniform(0.5, 3.0);
            node.m = 1.0;
            node.d = kRtsDampingRatio;
            gen_total += node.P;
        } else {
            node.kind = NodeKind::Load;
            node.P = -rng.uniform(0.5, 2.0);
            load_total -= node.P;
        }
        spec.nodes.push_back(node);
    }
    for (Node& node : spec.nodes) {
        if (node.kind == NodeKind::Load) node.P *= gen_total / load_total;
    }
    balance(spec.nodes);

    // Nearest earlier node gives a spanning tree; chords to the nearest
    // unconnected neighbour add meshing.
    std::set<std::pair<std::size_t, std::size_t>> used;
    auto connect = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        if (!used.emplace(a, b).second) return;
        spec.lines.push_back({a, b, rng.uniform(6.0, 14.0)});
    };
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < i; ++j) {
            if (dist(i, j) < dist(i, best)) best = j;
        }
        connect(best, i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() >= 0.5) continue;
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || used.count(std::minmax(i, j))) continue;
            if (best == n || dist(i, j) < dist(i, best)) best = j;
        }
        if (best < n) connect(i, best);
    }
    return sample_rts_params(feasible(std::move(spec)), seed);
}

// ============================================================================
// Barbell
// ============================================================================

Grid barbell(std::uint64_t seed, const BarbellLayout& layout) {
    SplitMix64 rng = SplitMix64::stream(seed, kTagBarbell);
    const std::size_t c = layout.core;
    const std::size_t a = layout.arm;
    GridSpec spec;
    auto add_node = [&](std::size_t id, bool gen, double p, const std::string& area) {
        Node node;
        node.id = id;
        node.area = area;
        if (gen) {
            node.kind = NodeKind::Generator;
            node.P = p;
            node.m = layout.m;
            node.d = kRtsDampingRatio * layout.m;
        } else {
            node.kind = NodeKind::Load;
            node.P = -p;
        }
        spec.nodes.push_back(node);
    };
    for (std::size_t i = 0; i < c; ++i) add_node(i, i % 2 == 0, 1.2, "core");
    for (std::size_t arm = 0; arm < 2; ++arm) {
        for (std::size_t p = 0; p < a; ++p) {
            add_node(c + arm * a + p, p % 2 == 0, 1.0, arm == 0 ? "arm1" : "arm2");
        }
    }
    balance(spec.nodes);

    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = i + 1; j < c; ++j) {
            spec.lines.push_back({i, j, layout.core_b * rng.uniform(0.9, 1.1)});
        }
    }
    const std::array<std::size_t, 2> anchor = {0, c / 2};
    for (std::size_t arm = 0; arm < 2; ++arm) {
        std::size_t prev = anchor[arm];
        for (std::size_t p = 0; p < a; ++p) {
            const std::size_t id = c + arm * a + p;
            spec.lines.push_back({prev, id, layout.arm_b * rng.uniform(0.9, 1.1)});
            prev = id;
        }
    }
    return feasible(std::move(spec));
}

std::vector<std::size_t> barbell_arm_nodes(const BarbellLayout& layout) {
    std::vector<std::size_t> ids;
    for (std::size_t i = layout.core; i < layout.core + 2 * layout.arm; ++i) ids.push_back(i);
    return ids;
}

}  // namespace aisim::synthetic

#pragma once

// Small hand-built grids shared by the unit tests.

#include "aisim/grid.hpp"

#include <string>
#include <utility>
#include <vector>

namespace aisim::test {

inline Node gen(std::size_t id, double P, double m, double d, std::string area = "A") {
    Node n;
    n.id = id;
    n.kind = NodeKind::Generator;
    n.P = P;
    n.m = m;
    n.d = d;
    n.area = std::move(area);
    return n;
}

inline Node vsg(std::size_t id, double P, double m_min, double d, double alpha, double beta,
                std::string area = "A") {
    Node n;
    n.id = id;
    n.kind = NodeKind::Vsg;
    n.P = P;
    n.m = 3.0 * m_min;
    n.m_min = m_min;
    n.d = d;
    n.alpha = alpha;
    n.beta = beta;
    n.area = std::move(area);
    return n;
}

inline Node load(std::size_t id, double P, double d, std::string area = "A") {
    Node n;
    n.id = id;
    n.kind = NodeKind::Load;
    n.P = P;
    n.d = d;
    n.area = std::move(area);
    return n;
}

/// Generator (P) feeding a load (-P) over one line.
inline Grid two_bus(double P = 0.5, double b = 1.0) {
    GridSpec spec;
    spec.nodes = {gen(0, P, 1.0, 0.3), load(1, -P, 0.1)};
    spec.lines = {{0, 1, b}};
    return Grid::build(std::move(spec));
}

/// Unloaded star: hub 0 and `leaves` generators, uniform b.
inline Grid star(std::size_t leaves, double b = 1.0) {
    GridSpec spec;
    spec.nodes.push_back(gen(0, 0.0, 1.0, 0.3));
    for (std::size_t i = 1; i <= leaves; ++i) {
        spec.nodes.push_back(gen(i, 0.0, 1.0, 0.3));
        spec.lines.push_back({0, i, b});
    }
    return Grid::build(std::move(spec));
}

inline std::string data_path(const std::string& rel) { return std::string(AISIM_DATA_DIR) + "/" + rel; }

}  // namespace aisim::test

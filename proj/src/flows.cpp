#include "aisim/flows.hpp"

#include "aisim/simd/kernels.hpp"

#include <algorithm>

namespace aisim {

void node_flows(const Grid& grid, std::span<const double> theta, std::span<double> flow,
                std::span<double> line_scratch) {
    simd::active().line_flows(theta, grid.line_from(), grid.line_to(), grid.line_b(), line_scratch);
    std::fill(flow.begin(), flow.end(), 0.0);
    const auto from = grid.line_from();
    const auto to = grid.line_to();
    for (std::size_t k = 0; k < line_scratch.size(); ++k) {
        flow[from[k]] += line_scratch[k];
        flow[to[k]] -= line_scratch[k];
    }
}

std::vector<double> node_flows(const Grid& grid, std::span<const double> theta) {
    std::vector<double> flow(grid.size());
    std::vector<double> scratch(grid.lines().size());
    node_flows(grid, theta, flow, scratch);
    return flow;
}

}  // namespace aisim

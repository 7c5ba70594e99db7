#pragma once

// Reproducible test and study grids. Every generator here is a pure function of
// its arguments; the shipped files under data/grids are their output.

#include "aisim/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aisim::synthetic {

/// Connected grid with N in [n_min, n_max] and a random mix of generators,
/// loads and VSGs (at least one inertial node). Couplings are scaled up until
/// the fixed point lies inside the |dtheta| < pi/2 regime.
[[nodiscard]] Grid random_mixed(std::uint64_t seed, std::size_t n_min = 4, std::size_t n_max = 40);

/// Connected all-VSG grid with N in [2, n_max].
[[nodiscard]] Grid random_all_vsg(std::uint64_t seed, std::size_t n_max = 10);

/// One generator, one VSG, two loads; sum of d is 10.
[[nodiscard]] Grid four_node();

/// Three copies of the 24-bus reliability test system joined by the RTS-96
/// interconnections, plus the 73rd bus that links areas A and C. Buses with
/// generating units are generators dispatched in proportion to capacity;
/// inertia and damping follow sample_rts_params(seed).
[[nodiscard]] Grid rts96_like(std::uint64_t seed);

/// Two generator buses per area of rts96_like, drawn with `seed`.
[[nodiscard]] std::vector<std::size_t> rts96_vsg_choice(const Grid& grid, std::uint64_t seed);

/// 40-node grid in three areas with a random geometric topology.
[[nodiscard]] Grid synthetic40(std::uint64_t seed);

/// Dense core (complete graph) with two sparse path arms hanging off it.
/// Every generator has the same inertia so VSG placements can be compared at
/// equal budget.
struct BarbellLayout {
    std::size_t core = 6;
    std::size_t arm = 8;
    double core_b = 8.0;
    double arm_b = 3.0;
    double m = 0.6;
};

[[nodiscard]] Grid barbell(std::uint64_t seed, const BarbellLayout& layout = {});

/// Node ids of the arm (peripheral) part of a barbell grid.
[[nodiscard]] std::vector<std::size_t> barbell_arm_nodes(const BarbellLayout& layout = {});

}  // namespace aisim::synthetic

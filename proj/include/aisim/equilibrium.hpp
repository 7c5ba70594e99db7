#pragma once

#include "aisim/fault.hpp"
#include "aisim/grid.hpp"

#include <optional>
#include <span>
#include <vector>

namespace aisim {

/// Synchronous operating point of the pre-fault grid, node 0 at angle 0.
struct FixedPoint {
    std::vector<double> theta0;
    double residual_norm = 0.0;  ///< max_i |P_i - flow_i|
    int iterations = 0;
    std::vector<double> residual_history;  ///< max-norm residual before each Newton step
};

struct NewtonOptions {
    // Power mismatch; load rows divide it by d, so keep headroom under 1e-10.
    double tolerance = 1e-12;
    int max_iterations = 50;
    int max_halvings = 8;
};

/// Newton iteration on P_i = sum_j b_ij sin(theta_i - theta_j) with node 0
/// pinned. The Jacobian is the reduced network Laplacian; each step is damped by
/// halving until the max-norm residual decreases.
///
/// Throws NoConvergence, or AngleOutOfRange if the converged point has a line
/// with |theta_i - theta_j| >= pi/2.
[[nodiscard]] FixedPoint solve_fixed_point(const Grid& grid,
                                           std::optional<std::span<const double>> initial_guess = {},
                                           const NewtonOptions& options = {});

/// Common frequency deviation after the step: delta_P / sum_i d_i.
///
/// Every inertia relaxes to its floor and all nodes rotate together, so each
/// node balances d_i * omega_sync against its share of the lost power.
[[nodiscard]] double post_fault_sync_frequency(const Grid& grid, const Fault& fault);

}  // namespace aisim

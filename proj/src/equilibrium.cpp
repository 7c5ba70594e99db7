#include "aisim/equilibrium.hpp"

#include "aisim/error.hpp"
#include "aisim/flows.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aisim {

namespace {

struct Residual {
    std::vector<double> values;
    double max_abs = 0.0;
};

Residual residual(const Grid& grid, std::span<const double> theta, std::vector<double>& flow,
                  std::vector<double>& scratch) {
    node_flows(grid, theta, flow, scratch);
    Residual r;
    r.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.values[i] = grid.node(i).P - flow[i];
        r.max_abs = std::max(r.max_abs, std::abs(r.values[i]));
    }
    return r;
}

// Laplacian with weights b_ij cos(theta_i - theta_j), row and column 0 removed.
Eigen::SparseMatrix<double> reduced_laplacian(const Grid& grid, std::span<const double> theta) {
    const auto n = static_cast<Eigen::Index>(grid.size()) - 1;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(grid.lines().size() * 4);
    for (const Line& l : grid.lines()) {
        const double w = l.b * std::cos(theta[l.from] - theta[l.to]);
        const auto i = static_cast<Eigen::Index>(l.from) - 1;
        const auto j = static_cast<Eigen::Index>(l.to) - 1;
        if (i >= 0) triplets.emplace_back(i, i, w);
        if (j >= 0) triplets.emplace_back(j, j, w);
        if (i >= 0 && j >= 0) {
            triplets.emplace_back(i, j, -w);
            triplets.emplace_back(j, i, -w);
        }
    }
    Eigen::SparseMatrix<double> lap(n, n);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    lap.makeCompressed();
    return lap;
}

}  // namespace

FixedPoint solve_fixed_point(const Grid& grid, std::optional<std::span<const double>> initial_guess,
                             const NewtonOptions& options) {
    const std::size_t n = grid.size();
    FixedPoint fp;
    fp.theta0.assign(n, 0.0);
    if (initial_guess) {
        if (initial_guess->size() != n) throw Error("initial guess has wrong dimension");
        std::copy(initial_guess->begin(), initial_guess->end(), fp.theta0.begin());
        const double ref = fp.theta0[0];
        for (double& t : fp.theta0) t -= ref;
    }

    std::vector<double> flow(n);
    std::vector<double> scratch(grid.lines().size());
    Residual r = residual(grid, fp.theta0, flow, scratch);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    std::vector<double> trial(n);
    int iter = 0;
    while (r.max_abs > options.tolerance) {
        if (iter >= options.max_iterations || n == 1) throw NoConvergence(iter, r.max_abs);
        fp.residual_history.push_back(r.max_abs);

        const Eigen::SparseMatrix<double> lap = reduced_laplacian(grid, fp.theta0);
        lu.compute(lap);
        if (lu.info() != Eigen::Success) throw NoConvergence(iter, r.max_abs);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
        for (std::size_t i = 1; i < n; ++i) rhs[static_cast<Eigen::Index>(i - 1)] = r.values[i];
        const Eigen::VectorXd step = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !step.allFinite()) throw NoConvergence(iter, r.max_abs);

        double lambda = 1.0;
        Residual next;
        for (int halving = 0;; ++halving) {
            trial[0] = 0.0;
            for (std::size_t i = 1; i < n; ++i) {
                trial[i] = fp.theta0[i] + lambda * step[static_cast<Eigen::Index>(i - 1)];
            }
            next = residual(grid, trial, flow, scratch);
            if (next.max_abs < r.max_abs || halving >= options.max_halvings) break;
            lambda *= 0.5;
        }
        fp.theta0.swap(trial);
        r = std::move(next);
        ++iter;
    }

    fp.residual_norm = r.max_abs;
    fp.iterations = iter;
    const auto& lines = grid.lines();
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const double diff = std::abs(fp.theta0[lines[k].from] - fp.theta0[lines[k].to]);
        if (!(diff < std::numbers::pi / 2)) throw AngleOutOfRange(k, diff);
    }
    return fp;
}

double post_fault_sync_frequency(const Grid& grid, const Fault& fault) {
    return fault.delta_P / grid.total_damping();
}

}  // namespace aisim

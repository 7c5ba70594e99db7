#pragma once

#include "aisim/grid.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace aisim {

/// Network Laplacian at an operating point:
///   L_ij = -b_ij cos(theta0_i - theta0_j) for i != j,  L_ii = -sum_{j != i} L_ij.
[[nodiscard]] Eigen::MatrixXd laplacian(const Grid& grid, std::span<const double> theta0);

/// Linearization of the swing dynamics about the synchronous fixed point.
///
/// Variables are ordered [dtheta (all nodes) | domega (inertial) | dm (VSGs)].
/// Inertial nodes linearize with inertia m (generators) or m_min (VSGs); loads
/// keep their first-order rows dtheta_l' = -(L dtheta)_l / d_l. At the fixed
/// point domega/dt = 0, so the inertia rows decouple to dm' = -beta dm (the
/// epsilon-deadband drive is flat there).
///
/// For a grid of n VSGs and no loads this is the 3n x 3n block matrix
///   [ 0          1          0    ]
///   [ -M^-1 L   -M^-1 D     0    ]
///   [ 0          0        -beta  ].
struct JacobianBlocks {
    Eigen::MatrixXd full;
    /// Leading block without the inertia rows: the conventional-generator
    /// stability matrix with inertia m_min on VSGs.
    Eigen::MatrixXd conventional;
    Eigen::VectorXd inertia;  ///< diag of M (m or m_min), inertial nodes
    Eigen::VectorXd damping;  ///< diag of D, all nodes
    Eigen::VectorXd beta;     ///< VSGs
    std::size_t nodes = 0;
    std::size_t inertial = 0;
    std::size_t vsgs = 0;
    bool all_vsg = false;  ///< no loads and no conventional generators
};

[[nodiscard]] JacobianBlocks full_jacobian(const Grid& grid, std::span<const double> theta0);

struct SpectrumReport {
    std::vector<std::complex<double>> full;          ///< eig of the full Jacobian
    std::vector<std::complex<double>> conventional;  ///< eig of the conventional block
    std::vector<double> beta_modes;                  ///< -beta_k
    std::vector<double> pairing_distances;           ///< one per eigenvalue, after matching
    double max_pairing_distance = 0.0;
    /// max ||J [u; 0] - lambda [u; 0]|| over unit eigenvectors u of the conventional block.
    double max_embedding_residual = 0.0;
    /// Largest real part after removing the zero (rotational gauge) mode.
    double spectral_abscissa = 0.0;
    double zero_mode = 0.0;  ///< |lambda| of the removed mode
    bool all_vsg = false;
    bool union_holds = false;
};

/// Checks eig(full) == eig(conventional) U {-beta_k} as multisets within
/// `tolerance`. Throws SpectrumMismatch when the pairing distance exceeds it.
[[nodiscard]] SpectrumReport spectrum_union_check(const Grid& grid, std::span<const double> theta0,
                                                  double tolerance = 1e-8);

/// Greedy nearest-neighbour matching of two eigenvalue multisets of equal size,
/// after sorting both by (real, imag). Returns the matched distances.
[[nodiscard]] std::vector<double> pair_spectra(std::vector<std::complex<double>> a,
                                               std::vector<std::complex<double>> b);

}  // namespace aisim

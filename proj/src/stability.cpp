#include "aisim/stability.hpp"

#include "aisim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aisim {

Eigen::MatrixXd laplacian(const Grid& grid, std::span<const double> theta0) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (theta0.size() != grid.size()) throw Error("theta0 has wrong dimension");
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (const Line& l : grid.lines()) {
        const auto i = static_cast<Eigen::Index>(l.from);
        const auto j = static_cast<Eigen::Index>(l.to);
        const double w = l.b * std::cos(theta0[l.from] - theta0[l.to]);
        lap(i, j) -= w;
        lap(j, i) -= w;
        lap(i, i) += w;
        lap(j, j) += w;
    }
    return lap;
}

JacobianBlocks full_jacobian(const Grid& grid, std::span<const double> theta0) {
    const Eigen::MatrixXd lap = laplacian(grid, theta0);
    JacobianBlocks jb;
    jb.nodes = grid.size();
    jb.inertial = grid.inertial_count();
    jb.vsgs = grid.vsg_count();
    jb.all_vsg = jb.vsgs == jb.nodes;

    const auto n = static_cast<Eigen::Index>(jb.nodes);
    const auto ni = static_cast<Eigen::Index>(jb.inertial);
    const auto nv = static_cast<Eigen::Index>(jb.vsgs);
    const Eigen::Index dim = n + ni + nv;

    jb.inertia.resize(ni);
    jb.damping.resize(n);
    jb.beta.resize(nv);
    jb.full = Eigen::MatrixXd::Zero(dim, dim);

    for (const Node& node : grid.nodes()) {
        const auto i = static_cast<Eigen::Index>(node.id);
        jb.damping[i] = node.d;
        const int k = grid.inertial_index()[node.id];
        if (k < 0) {
            jb.full.block(i, 0, 1, n) = -lap.row(i) / node.d;
            continue;
        }
        const Eigen::Index row = n + k;
        const double mass = node.kind == NodeKind::Vsg ? node.m_min : node.m;
        jb.inertia[k] = mass;
        jb.full(i, row) = 1.0;
        jb.full.block(row, 0, 1, n) = -lap.row(i) / mass;
        jb.full(row, row) = -node.d / mass;
        const int v = grid.vsg_index()[node.id];
        if (v >= 0) {
            jb.beta[v] = node.beta;
            jb.full(n + ni + v, n + ni + v) = -node.beta;
        }
    }
    jb.conventional = jb.full.topLeftCorner(n + ni, n + ni);
    return jb;
}

namespace {

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    const Eigen::VectorXcd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

bool lex_less(const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

std::vector<double> pair_spectra(std::vector<std::complex<double>> a,
                                 std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) throw SpectrumMismatch(std::numeric_limits<double>::infinity());
    std::sort(a.begin(), a.end(), lex_less);
    std::sort(b.begin(), b.end(), lex_less);
    std::vector<bool> used(b.size(), false);
    std::vector<double> dist;
    dist.reserve(a.size());
    for (const auto& x : a) {
        std::size_t best = b.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        used[best] = true;
        dist.push_back(best_d);
    }
    return dist;
}

SpectrumReport spectrum_union_check(const Grid& grid, std::span<const double> theta0,
                                    double tolerance) {
    const JacobianBlocks jb = full_jacobian(grid, theta0);
    SpectrumReport rep;
    rep.all_vsg = jb.all_vsg;
    rep.full = eigenvalues(jb.full);

    Eigen::EigenSolver<Eigen::MatrixXd> conv(jb.conventional, true);
    if (conv.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    const Eigen::VectorXcd conv_ev = conv.eigenvalues();
    rep.conventional.assign(conv_ev.data(), conv_ev.data() + conv_ev.size());
    for (Eigen::Index k = 0; k < jb.beta.size(); ++k) rep.beta_modes.push_back(-jb.beta[k]);

    std::vector<std::complex<double>> united = rep.conventional;
    for (double b : rep.beta_modes) united.emplace_back(b, 0.0);
    rep.pairing_distances = pair_spectra(united, rep.full);
    rep.max_pairing_distance =
        rep.pairing_distances.empty()
            ? 0.0
            : *std::max_element(rep.pairing_distances.begin(), rep.pairing_distances.end());

    // Each conventional eigenvector, padded with zeros on the inertia rows, is
    // an eigenvector of the full matrix.
    const Eigen::MatrixXcd vecs = conv.eigenvectors();
    const Eigen::MatrixXcd full_c = jb.full.cast<std::complex<double>>();
    const Eigen::Index nc = jb.conventional.rows();
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
        Eigen::VectorXcd u = Eigen::VectorXcd::Zero(jb.full.rows());
        u.head(nc) = vecs.col(k).normalized();
        const double res = (full_c * u - conv_ev[k] * u).norm();
        rep.max_embedding_residual = std::max(rep.max_embedding_residual, res);
    }

    std::size_t zero = 0;
    for (std::size_t k = 1; k < rep.full.size(); ++k) {
        if (std::abs(rep.full[k]) < std::abs(rep.full[zero])) zero = k;
    }
    rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rep.full.size(); ++k) {
        if (k == zero) continue;
        rep.spectral_abscissa = std::max(rep.spectral_abscissa, rep.full[k].real());
    }
    if (!rep.full.empty()) rep.zero_mode = std::abs(rep.full[zero]);

    rep.union_holds = rep.max_pairing_distance < tolerance;
    if (!rep.union_holds) throw SpectrumMismatch(rep.max_pairing_distance);
    return rep;
}

}  // namespace aisim

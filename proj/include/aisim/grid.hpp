#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aisim {

enum class NodeKind { Generator, Load, Vsg };

[[nodiscard]] std::string_view to_string(NodeKind kind) noexcept;
[[nodiscard]] NodeKind node_kind_from_string(std::string_view name);

/// Default frequency-dependence of load nodes when a grid file omits `d`.
/// Not a published value; RTS-96 and continental grid data do not carry it.
inline constexpr double kDefaultLoadDamping = 0.1;

/// One bus of the network. All quantities in per unit.
///
/// `m` is the physical inertia for generators. For VSGs it is optional and holds
/// the nominal (constant-case) inertia the device replaced; the dynamics of a VSG
/// only use `m_min`, `alpha` and `beta`.
struct Node {
    std::size_t id = 0;
    NodeKind kind = NodeKind::Load;
    double P = 0.0;
    double d = kDefaultLoadDamping;
    double m = 0.0;
    double m_min = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::string area;

    [[nodiscard]] bool inertial() const noexcept { return kind != NodeKind::Load; }
};

/// Lossless line; `b` is the susceptance times both voltage magnitudes.
struct Line {
    std::size_t from = 0;
    std::size_t to = 0;
    double b = 0.0;
};

/// Unvalidated grid description, as read from a file or built by hand.
struct GridSpec {
    double frequency_base_hz = 50.0;
    std::vector<Node> nodes;
    std::vector<Line> lines;
};

/// Validated, immutable network. Every instance satisfies:
///  - node ids are 0..N-1 and stored in order,
///  - d > 0 everywhere, m > 0 on generators, m_min, alpha, beta > 0 on VSGs,
///  - b > 0, no self loops, at most one line per unordered node pair,
///  - the line graph is connected,
///  - |sum_i P_i| <= kBalanceTolerance.
class Grid {
public:
    static constexpr double kBalanceTolerance = 1e-9;

    /// Validates `spec` and throws one of the `InvalidGrid` errors on failure.
    static Grid build(GridSpec spec);

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const Node& node(std::size_t id) const { return nodes_.at(id); }
    [[nodiscard]] const std::vector<Line>& lines() const noexcept { return lines_; }
    [[nodiscard]] double frequency_base_hz() const noexcept { return frequency_base_hz_; }

    // Structure-of-arrays view of the lines for the flow kernels.
    [[nodiscard]] std::span<const std::uint32_t> line_from() const noexcept { return from_; }
    [[nodiscard]] std::span<const std::uint32_t> line_to() const noexcept { return to_; }
    [[nodiscard]] std::span<const double> line_b() const noexcept { return b_; }

    /// Indices into the per-kind state blocks; -1 when the node has no such state.
    [[nodiscard]] std::span<const int> inertial_index() const noexcept { return inertial_index_; }
    [[nodiscard]] std::span<const int> vsg_index() const noexcept { return vsg_index_; }
    [[nodiscard]] std::size_t inertial_count() const noexcept { return inertial_nodes_.size(); }
    [[nodiscard]] std::size_t vsg_count() const noexcept { return vsg_nodes_.size(); }
    [[nodiscard]] std::span<const std::size_t> inertial_nodes() const noexcept { return inertial_nodes_; }
    [[nodiscard]] std::span<const std::size_t> vsg_nodes() const noexcept { return vsg_nodes_; }

    [[nodiscard]] double total_damping() const noexcept;
    /// Sum of the permanent inertia floor: m for generators, m_min for VSGs.
    [[nodiscard]] double minimum_inertia_budget() const noexcept;

    /// Copy of the description, for building modified grids.
    [[nodiscard]] GridSpec spec() const;

private:
    Grid() = default;

    double frequency_base_hz_ = 50.0;
    std::vector<Node> nodes_;
    std::vector<Line> lines_;
    std::vector<std::uint32_t> from_;
    std::vector<std::uint32_t> to_;
    std::vector<double> b_;
    std::vector<int> inertial_index_;
    std::vector<int> vsg_index_;
    std::vector<std::size_t> inertial_nodes_;
    std::vector<std::size_t> vsg_nodes_;
};

/// Reproducible parameter assignment for RTS-96 style studies.
///
/// Generators and VSGs draw m ~ U[0.1, 1.1] from a per-node SplitMix64 stream
/// keyed by node id, then d = 0.3 m. VSGs keep the draw as their nominal m and
/// get m_min = m / 3. Loads are untouched.
[[nodiscard]] Grid sample_rts_params(const Grid& grid, std::uint64_t seed);

inline constexpr double kRtsInertiaLow = 0.1;
inline constexpr double kRtsInertiaHigh = 1.1;
inline constexpr double kRtsDampingRatio = 0.3;
inline constexpr double kRtsMinInertiaFraction = 1.0 / 3.0;

/// Turns the listed generators into VSGs with m_min = m_min_rule * m. P, d and
/// the line set are preserved. Throws NotAGenerator for any other kind.
[[nodiscard]] Grid promote_to_vsg(const Grid& grid, std::span<const std::size_t> node_ids,
                                  double alpha, double beta, double m_min_rule);

/// MW to per unit on a `base_mva` power base (100 MVA by default).
[[nodiscard]] constexpr double mw_to_pu(double mw, double base_mva = 100.0) noexcept {
    return mw / base_mva;
}

// ---------------------------------------------------------------------------
// Grid file (JSON)
// ---------------------------------------------------------------------------

[[nodiscard]] GridSpec parse_grid_json(std::string_view text);
[[nodiscard]] std::string grid_to_json(const Grid& grid, int indent = 2);
[[nodiscard]] Grid load_grid(const std::string& path);
void save_grid(const Grid& grid, const std::string& path);

/// FNV-1a of the compact JSON serialization; used as provenance in reports.
[[nodiscard]] std::uint64_t grid_hash(const Grid& grid);

}  // namespace aisim

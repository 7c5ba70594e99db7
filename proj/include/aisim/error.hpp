#pragma once

#include "aisim/format.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aisim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Grid construction
// ---------------------------------------------------------------------------

class InvalidGrid : public Error {
public:
    using Error::Error;
};

class DisconnectedGraph : public InvalidGrid {
public:
    explicit DisconnectedGraph(std::size_t unreachable_node)
        : InvalidGrid("grid is disconnected: node " + std::to_string(unreachable_node) +
                      " is not reachable from node 0"),
          node(unreachable_node) {}
    std::size_t node;
};

class PowerImbalance : public InvalidGrid {
public:
    explicit PowerImbalance(double mismatch)
        : InvalidGrid("power injections do not sum to zero: |sum P| = " + std::to_string(mismatch)),
          imbalance(mismatch) {}
    double imbalance;
};

class NonPositiveParameter : public InvalidGrid {
public:
    NonPositiveParameter(std::size_t node_id, std::string field_name)
        : InvalidGrid("node " + std::to_string(node_id) + ": parameter '" + field_name +
                      "' must be > 0"),
          node(node_id),
          field(std::move(field_name)) {}
    std::size_t node;
    std::string field;
};

class DuplicateLine : public InvalidGrid {
public:
    DuplicateLine(std::size_t from, std::size_t to)
        : InvalidGrid("duplicate line between nodes " + std::to_string(from) + " and " +
                      std::to_string(to) + " (merge parallel lines by summing b)"),
          from_node(from),
          to_node(to) {}
    std::size_t from_node;
    std::size_t to_node;
};

class NotAGenerator : public Error {
public:
    explicit NotAGenerator(std::size_t node_id)
        : Error("node " + std::to_string(node_id) + " is not a conventional generator"),
          node(node_id) {}
    std::size_t node;
};

// ---------------------------------------------------------------------------
// Equilibrium
// ---------------------------------------------------------------------------

class NoConvergence : public Error {
public:
    NoConvergence(int iters, double resid)
        : Error("Newton iteration did not converge after " + std::to_string(iters) +
                " iterations (residual " + std::to_string(resid) + ")"),
          iterations(iters),
          residual(resid) {}
    int iterations;
    double residual;
};

class AngleOutOfRange : public Error {
public:
    AngleOutOfRange(std::size_t line_index, double angle_difference)
        : Error("line " + std::to_string(line_index) + " has |dtheta| = " +
                std::to_string(angle_difference) + " >= pi/2 at the fixed point"),
          line(line_index),
          delta_theta(angle_difference) {}
    std::size_t line;
    double delta_theta;
};

// ---------------------------------------------------------------------------
// Dynamics / integration
// ---------------------------------------------------------------------------

/// A VSG inertia fell below its floor by more than the integration tolerance.
class InertiaBelowFloor : public Error {
public:
    InertiaBelowFloor(std::size_t node_id, double m, double m_min, double time)
        : Error("inertia " + format_double(m) + " below m_min " + format_double(m_min) + " at node " +
                std::to_string(node_id) + ", t = " + format_double(time)),
          node(node_id), t(time) {}
    std::size_t node;
    double t;
};

class NonFiniteState : public Error {
public:
    explicit NonFiniteState(double time)
        : Error("non-finite state encountered at t = " + std::to_string(time)), t(time) {}
    double t;
};

class StepSizeUnderflow : public Error {
public:
    StepSizeUnderflow(double time, double step)
        : Error("step size underflow at t = " + std::to_string(time) + " (h = " +
                std::to_string(step) + ")"),
          t(time),
          h(step) {}
    double t;
    double h;
};

class HorizonTooShort : public Error {
public:
    explicit HorizonTooShort(const std::string& detail)
        : Error("integration horizon too short: " + detail) {}
};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

class NonConvergedTail : public Error {
public:
    NonConvergedTail(const std::string& metric, double relative_tail)
        : Error("metric '" + metric + "' has unconverged tail (relative bound " +
                std::to_string(relative_tail) + ")"),
          relative_bound(relative_tail) {}
    double relative_bound;
};

class NeverSynchronized : public Error {
public:
    explicit NeverSynchronized(double horizon)
        : Error("frequencies did not settle within the 1 mHz band before t = " +
                std::to_string(horizon)) {}
};

class MissingAreaLabel : public Error {
public:
    explicit MissingAreaLabel(std::size_t node_id)
        : Error("node " + std::to_string(node_id) + " has no area label"), node(node_id) {}
    std::size_t node;
};

// ---------------------------------------------------------------------------
// Stability
// ---------------------------------------------------------------------------

class SpectrumMismatch : public Error {
public:
    explicit SpectrumMismatch(double distance)
        : Error("eigenvalue union check failed: max pairing distance " + std::to_string(distance)),
          max_distance(distance) {}
    double max_distance;
};

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

class NoQualifyingFaults : public Error {
public:
    NoQualifyingFaults() : Error("no generator satisfies the fault-campaign power threshold") {}
};

class InertiaBudgetMismatch : public Error {
public:
    InertiaBudgetMismatch(double a, double b)
        : Error("placement variants have different minimum inertia budgets (" + std::to_string(a) +
                " vs " + std::to_string(b) + ")"),
          first(a),
          second(b) {}
    double first;
    double second;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A lower-level error re-raised with the id of the scenario that hit it.
class ScenarioFailed : public Error {
public:
    ScenarioFailed(std::string scenario_id, const std::string& detail)
        : Error("scenario '" + scenario_id + "': " + detail), scenario(std::move(scenario_id)) {}
    std::string scenario;
};

}  // namespace aisim

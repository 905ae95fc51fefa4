#pragma once

// Finite discrete space-time frames, shift vectors, boundary handling and the
// canonical bijection between k-tuple positions and inner space-time blocks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nestca/errors.hpp"

namespace nestca {

using Symbol = std::uint32_t;
using Coord = std::vector<int>;

enum class BoundaryKind { Periodic, Fixed };

struct Boundary {
    BoundaryKind kind = BoundaryKind::Periodic;
    Symbol fixed_symbol = 0;  // only meaningful for Fixed

    static Boundary periodic() { return {BoundaryKind::Periodic, 0}; }
    static Boundary fixed(Symbol s) { return {BoundaryKind::Fixed, s}; }

    bool operator==(const Boundary&) const = default;
};

// A d-dimensional finite lattice paired with a time horizon (number of time
// slices retained/evolved). Immutable after construction.
class SpaceTimeFrame {
  public:
    SpaceTimeFrame(std::vector<int> extents, int horizon, Boundary boundary);

    int dims() const { return static_cast<int>(extents_.size()); }
    const std::vector<int>& extents() const { return extents_; }
    int horizon() const { return horizon_; }
    const Boundary& boundary() const { return boundary_; }

    // |R| = product of extents.
    std::size_t cell_count() const { return cell_count_; }
    // |R x T_window| = |R| * horizon.
    std::size_t block_size() const { return cell_count_ * static_cast<std::size_t>(horizon_); }

    // Row-major linear index over space (last axis fastest).
    std::size_t site_index(const Coord& r) const;
    Coord site_coord(std::size_t index) const;
    bool contains(const Coord& r) const;

    bool operator==(const SpaceTimeFrame&) const = default;

  private:
    std::vector<int> extents_;
    int horizon_;
    Boundary boundary_;
    std::size_t cell_count_;
};

// A space-time displacement (dr, dt) with dt >= 1 so that arguments always
// reference strictly earlier slices.
struct Shift {
    Coord dr;
    int dt = 1;

    Shift() = default;
    Shift(Coord dr_, int dt_) : dr(std::move(dr_)), dt(dt_) {
        if (dt < 1) throw ValidationError("shift dt must be >= 1, got " + std::to_string(dt));
    }

    bool operator==(const Shift&) const = default;
};

// Ordered shift lists for the k state arguments and l input arguments.
// Argument order is semantically significant.
struct ShiftStructure {
    std::vector<Shift> state_shifts;
    std::vector<Shift> input_shifts;

    std::size_t state_arity() const { return state_shifts.size(); }
    std::size_t input_arity() const { return input_shifts.size(); }
    int max_dt() const;

    void validate(int dims) const;

    bool operator==(const ShiftStructure&) const = default;
};

// Either an in-lattice coordinate or the boundary's fixed symbol.
using ResolveResult = std::variant<Coord, Symbol>;

// r - dr reduced by the frame's boundary rule: wrapped componentwise
// (periodic) or replaced by the fixed symbol when the shifted point exits
// the lattice. Total by construction.
ResolveResult resolve(const SpaceTimeFrame& frame, const Coord& r, const Shift& shift);

// Index-based fast path used by the evaluation engine.
struct ResolvedSite {
    std::optional<std::size_t> site;  // row-major index when inside the lattice
    Symbol fixed_value = 0;
};
ResolvedSite resolve_site(const SpaceTimeFrame& frame, std::size_t site, const Shift& shift);

// Canonical bijection between positions {1..k} and points of the inner block
// R' x T_window': time-major, then row-major over space.
class BlockIndex {
  public:
    explicit BlockIndex(SpaceTimeFrame inner_frame);

    const SpaceTimeFrame& frame() const { return frame_; }
    std::size_t size() const { return frame_.block_size(); }  // k

    // pos is 1-based; returns (r', t') with t' in 0..horizon'-1.
    std::pair<Coord, int> to_point(std::size_t pos) const;
    std::size_t to_pos(const Coord& r, int t) const;

    bool operator==(const BlockIndex&) const = default;

  private:
    SpaceTimeFrame frame_;
};

}  // namespace nestca

#pragma once

// Propagation-speed calculus: per-shift speeds v_i = dr_i/dt_i, effective
// speeds across nesting levels u*sqrt(1 - sum(v_j^2)/u^2), per-automaton
// speed tables, and rational shift synthesis for real-valued targets.

#include <vector>

#include "nestca/nesting.hpp"
#include "nestca/spacetime.hpp"

namespace nestca {

struct Speed {
    std::vector<double> components;  // lattice units per time step
    double magnitude = 0.0;          // Euclidean norm of components
};

Speed shift_speed(const Shift& shift);

// u is the global/limiting speed; level_speeds are the per-level relative
// speed magnitudes, outermost first.
struct NestedSpeedSpec {
    double u = 1.0;
    std::vector<double> level_speeds;

    void validate() const;
};

// Effective propagation speed at a nesting level:
//   level 0 -> v_1 (the raw relative speed),
//   level n -> u * sqrt(1 - (v_1^2 + ... + v_n^2)/u^2).
// Throws SpeedExceedsLimit when the cumulative sum exceeds u^2; equality is
// accepted and yields 0.
double nested_speed(const NestedSpeedSpec& spec, int level);

struct SpeedTableRow {
    int level;         // 0 = outermost
    int shift_index;   // 1-based position in that level's state shifts
    double raw_speed;  // |dr|/dt of the level's own shift
    double effective_speed;  // NaN when flagged
    bool exceeds_limit = false;
};

// Per-level, per-shift speeds with the effective speed of each row computed
// from the same-index shifts of the enclosing levels (pairing by index;
// missing ancestor indices contribute zero). Rows ordered by (level, index).
std::vector<SpeedTableRow> speed_table(const NestedAutomaton& nested, double u);

struct RationalShift {
    Shift shift;
    double error;  // |dr/dt - target|
};

// The 1-D shift (dr, dt) with dt <= max_dt minimizing |dr/dt - target|.
// Ties break toward smaller dt, then smaller |dr|.
RationalShift rationalize_speed(double target, int max_dt);

}  // namespace nestca

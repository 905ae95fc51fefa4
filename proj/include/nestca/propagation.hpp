#pragma once

// Closed-form evaluators for the nested propagation recurrences over
// real-valued nested coordinates, independent of the lattice engine. At each
// nesting level a step back-translates the level's first spatial axis by its
// effective speed times the level's per-step delay.

#include <functional>
#include <span>
#include <vector>

#include "nestca/kinematics.hpp"
#include "nestca/spacetime.hpp"

namespace nestca {

struct LevelCoordinate {
    std::vector<double> r;
    double t = 0.0;
};

// Outermost level first; up to 3 levels.
struct NestedCoordinate {
    std::vector<LevelCoordinate> levels;

    void validate() const;
};

struct NestedField {
    std::function<Symbol(const NestedCoordinate&)> eval;
    int levels = 1;

    Symbol operator()(const NestedCoordinate& coord) const { return eval(coord); }
};

// 1 within `tolerance` of `site` at every defined level, 0 elsewhere.
NestedField delta_field(NestedCoordinate site, double tolerance, Symbol hit = 1, Symbol miss = 0);
// high where the level-0 first spatial coordinate is >= threshold.
NestedField step_field(double threshold, Symbol high = 1, Symbol low = 0);
// Periodic lattice samples on the level-0 first axis; queries within
// `tolerance` of an integer site read that sample, anything else reads the
// background symbol.
NestedField grid_field(std::vector<Symbol> samples, double tolerance = 1e-9,
                       Symbol background = 0);

// Per-level per-step delays t_1, t'_1, t''_1; levels without an entry use 1.
struct StepDelays {
    std::vector<double> per_level;

    double at(std::size_t level) const {
        return level < per_level.size() ? per_level[level] : 1.0;
    }
};

// Every level j of `coord` translated by steps * nested_speed(spec, j) *
// delay_j along its first axis, with times decremented accordingly.
NestedCoordinate back_translate(const NestedSpeedSpec& spec, const NestedCoordinate& coord,
                                double steps, const StepDelays& delays = {});

// Signal propagation without processing: the field evaluated at the
// back-translated coordinate (exact closed form of the n-fold recurrence).
Symbol propagate_pure(const NestedField& field, const NestedSpeedSpec& spec,
                      const NestedCoordinate& coord, int steps, const StepDelays& delays = {});

using UnaryRule = std::function<Symbol(Symbol)>;

// Propagation with processing: n-fold alternation of back-translation and F.
Symbol propagate_processed(const NestedField& field, const NestedSpeedSpec& spec,
                           const UnaryRule& rule, const NestedCoordinate& coord, int steps,
                           const StepDelays& delays = {});

using MultiRule = std::function<Symbol(std::span<const Symbol>)>;

// Multiple signals of different speeds: each step applies F to k arguments,
// argument i read at the coordinate back-translated by (v_i, eff_i) at
// levels 0 and 1. Unrolled with memoization over translation counts.
Symbol propagate_multi(const NestedField& field, const NestedSpeedSpec& spec,
                       const MultiRule& rule, const std::vector<double>& argument_speeds,
                       const NestedCoordinate& coord, int steps, const StepDelays& delays = {});

// Single step of the full formula: F over k arguments, argument i
// back-translated simultaneously at all levels of `coord` using the per-level
// relative speeds of that argument (level_argument_speeds[level][argument],
// one list per level above the last).
Symbol general_formula(const NestedField& field, const NestedSpeedSpec& spec,
                       const MultiRule& rule,
                       const std::vector<std::vector<double>>& level_argument_speeds,
                       const NestedCoordinate& coord, const StepDelays& delays = {});

}  // namespace nestca

#pragma once

// Recursive composition of automata: an outer level whose cell function is
// the global map of an inner automaton over its own block R' x T', to
// arbitrary depth. Processing rules live only at the leaves.

#include <memory>
#include <optional>
#include <string>

#include "nestca/automaton.hpp"

namespace nestca {

// Either a leaf (carries the CellRule) or an outer structure wrapping an
// inner automaton. Cell states are stored as flat vectors of ground symbols;
// a level's state consists of component_count components of component_width
// symbols each, components ordered by the canonical block order of the level
// below (time-major, then row-major).
class NestedAutomaton {
  public:
    static NestedAutomaton leaf(Alphabet alphabet, SpaceTimeFrame frame, CellRule rule,
                                GatherPlan plan);

    // Bypasses construction invariants. Exists so validators can be exercised
    // against malformed trees; not for regular use.
    static NestedAutomaton unchecked(Alphabet alphabet, SpaceTimeFrame frame,
                                     ShiftStructure structure, std::vector<int> taps,
                                     std::optional<CellRule> rule,
                                     std::shared_ptr<const NestedAutomaton> inner);

    int depth() const;
    bool is_leaf() const { return inner_ == nullptr; }

    const Alphabet& alphabet() const { return alphabet_; }
    const SpaceTimeFrame& frame() const { return frame_; }
    const ShiftStructure& structure() const { return structure_; }
    const std::vector<int>& taps() const { return taps_; }
    const CellRule* rule() const { return rule_ ? &*rule_ : nullptr; }
    const NestedAutomaton* inner() const { return inner_.get(); }
    const BlockIndex& block_index() const;

    // Components per cell state: m at a leaf, k at an outer level.
    std::size_t component_count() const;
    // Ground symbols per component: 1 at a leaf, inner state width above it.
    std::size_t component_width() const;
    std::size_t state_width() const { return component_count() * component_width(); }

    // Leaf levels evaluate through the flat engine.
    const Automaton& as_flat() const;

  private:
    NestedAutomaton() = default;

    Alphabet alphabet_;
    SpaceTimeFrame frame_{{1}, 1, Boundary::periodic()};
    ShiftStructure structure_;
    std::vector<int> taps_;
    std::optional<CellRule> rule_;
    std::shared_ptr<const NestedAutomaton> inner_;
    std::optional<BlockIndex> block_;
    std::optional<Automaton> leaf_flat_;

    friend NestedAutomaton compose_nested(ShiftStructure, SpaceTimeFrame, NestedAutomaton,
                                          std::vector<int>);
};

// Wraps `inner` one level out. Outer k must equal the inner block size
// |R'| * horizon'; empty taps default to position-matched selectors.
// Nested levels are autonomous (no input shifts) in this version.
NestedAutomaton compose_nested(ShiftStructure outer_structure, SpaceTimeFrame outer_frame,
                               NestedAutomaton inner, std::vector<int> taps = {});

// The outer cell's F: treats the block as the inner history window (horizon'
// slices in canonical order), evolves the inner automaton horizon' fresh
// steps and returns the evolved block. Output length equals input length.
std::vector<Symbol> cell_function_of(const NestedAutomaton& inner, std::span<const Symbol> block);

// One synchronous update of a level: gathers each cell's k components via
// taps from the shifted neighbors and applies the cell function (leaf rule,
// or inner evolution).
StepResult step_nested(const NestedAutomaton& nested, const HistoryView& history, int t);

Trajectory evaluate_nested(const NestedAutomaton& nested, const Trajectory& initial, int steps,
                           const InputProvider& inputs = {});

struct FlattenOptions {
    // Explicit-table flattening is used when the rule domain has at most this
    // many entries; beyond it the rule stays a synthesized closure.
    std::size_t table_cap = std::size_t{1} << 16;
    bool force_table = false;  // error instead of falling back to a closure
};

// Depth-1 equivalent with ground-symbol vector states: step_direct of the
// result equals step_nested of the original on all histories.
Automaton flatten(const NestedAutomaton& nested, const FlattenOptions& options = {});

struct LowestLevelFinding {
    bool ok = true;
    std::string path;  // path to the violating node, e.g. "root.inner"
    std::string what;

    explicit operator bool() const { return ok; }
};

// Confirms that processing functions occur only at the lowest level: every
// leaf carries a rule, no outer node does.
LowestLevelFinding validate_lowest_level(const NestedAutomaton& nested);

// Compares step_nested against the flattened automaton's direct stepper over
// initial histories (exhaustive within the cap, or a seeded random sample).
EquivalenceReport verify_flatten_equivalence(const NestedAutomaton& nested,
                                             const VerifyOptions& options,
                                             const FlattenOptions& flatten_options = {});

}  // namespace nestca

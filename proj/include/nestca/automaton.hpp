#pragma once

// Flat cellular automaton: cell rules, direct local-recurrence stepping, and
// the factorized evaluation global = pointwise-stage o shift-stage, with an
// equivalence checker between the two routes.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nestca/spacetime.hpp"

namespace nestca {

struct Alphabet {
    std::uint32_t states = 2;   // |S|
    std::uint32_t inputs = 1;   // |X|, singleton means "no input"
    std::uint32_t outputs = 1;  // |Y|

    void validate() const;
    bool operator==(const Alphabet&) const = default;
};

// The cell pair (F, G): F maps gathered arguments to the cell's m-component
// state, G to its l output components. Stored as a dense table (mixed-radix
// keyed over S^k x X^l), a named built-in, or a synthesized closure.
class CellRule {
  public:
    enum class Builtin { Identity, Xor, SumMod, Threshold, Projection };

    using ApplyFn = std::function<void(std::span<const Symbol> state_args,
                                       std::span<const Symbol> input_args,
                                       std::span<Symbol> state_out,
                                       std::span<Symbol> output_out)>;

    static CellRule table(const Alphabet& alphabet, int arity_state, int arity_input,
                          int state_width, std::vector<Symbol> f_entries,
                          std::vector<Symbol> g_entries);
    static CellRule builtin(const Alphabet& alphabet, Builtin kind, int arity_state,
                            int arity_input = 0, int param = 0);
    // Exact closure-backed rule; used by flatten when a table would exceed caps.
    static CellRule synthesized(const Alphabet& alphabet, int arity_state, int arity_input,
                                int state_width, ApplyFn fn, std::string label);

    const Alphabet& alphabet() const { return alphabet_; }
    int arity_state() const { return arity_state_; }  // k
    int arity_input() const { return arity_input_; }  // l
    int state_width() const { return state_width_; }  // m

    void apply(std::span<const Symbol> state_args, std::span<const Symbol> input_args,
               std::span<Symbol> state_out, std::span<Symbol> output_out) const;

    bool is_table() const { return kind_ == Kind::Table; }
    bool is_builtin() const { return kind_ == Kind::BuiltinRule; }
    bool is_synthesized() const { return kind_ == Kind::Synthesized; }
    Builtin builtin_kind() const;
    int builtin_param() const { return param_; }
    const std::vector<Symbol>& f_entries() const { return f_entries_; }
    const std::vector<Symbol>& g_entries() const { return g_entries_; }
    const std::string& label() const { return label_; }

    // Mixed-radix index of an argument tuple, state args most significant.
    std::size_t domain_index(std::span<const Symbol> state_args,
                             std::span<const Symbol> input_args) const;
    std::size_t domain_size() const;

  private:
    enum class Kind { Table, BuiltinRule, Synthesized };

    CellRule() = default;

    Kind kind_ = Kind::BuiltinRule;
    Alphabet alphabet_;
    int arity_state_ = 1;
    int arity_input_ = 0;
    int state_width_ = 1;
    Builtin builtin_ = Builtin::Identity;
    int param_ = 0;
    std::vector<Symbol> f_entries_;
    std::vector<Symbol> g_entries_;
    ApplyFn fn_;
    std::string label_;
};

// Shift structure plus the tap map: tap i selects which component of the
// gathered neighbor's m-wide state feeds argument i. Taps are 1-based;
// an empty list means the defaults min(i, m).
struct GatherPlan {
    ShiftStructure structure;
    std::vector<int> taps;

    static std::vector<int> default_taps(std::size_t arity, int state_width);
};

// State/input/output distributions over a frame window. Slices are flat
// row-major arrays: states hold state_width symbols per site, inputs and
// outputs hold input_width/output_width symbols per site.
class Trajectory {
  public:
    Trajectory(SpaceTimeFrame frame, int state_width, int input_width, int output_width,
               int t_begin = 0);

    const SpaceTimeFrame& frame() const { return frame_; }
    int state_width() const { return state_width_; }
    int input_width() const { return input_width_; }
    int output_width() const { return output_width_; }
    int t_begin() const { return t_begin_; }
    int t_end() const { return t_begin_ + static_cast<int>(states_.size()); }
    std::size_t slice_count() const { return states_.size(); }

    void append(std::vector<Symbol> states, std::vector<Symbol> inputs = {},
                std::vector<Symbol> outputs = {});

    std::span<const Symbol> states_at(int t) const;
    std::span<const Symbol> inputs_at(int t) const;
    std::span<const Symbol> outputs_at(int t) const;

    Symbol state_component(int t, std::size_t site, int component) const;  // 1-based component

    bool operator==(const Trajectory&) const = default;

  private:
    SpaceTimeFrame frame_;
    int state_width_;
    int input_width_;
    int output_width_;
    int t_begin_;
    std::vector<std::vector<Symbol>> states_;
    std::vector<std::vector<Symbol>> inputs_;
    std::vector<std::vector<Symbol>> outputs_;
};

// Non-owning window over the most recent slices; what the step operators read.
class HistoryView {
  public:
    HistoryView(const SpaceTimeFrame* frame, int state_width, int input_width, int t_begin,
                std::vector<std::span<const Symbol>> states,
                std::vector<std::span<const Symbol>> inputs);

    const SpaceTimeFrame& frame() const { return *frame_; }
    int state_width() const { return state_width_; }
    int input_width() const { return input_width_; }
    int t_begin() const { return t_begin_; }
    int t_end() const { return t_begin_ + static_cast<int>(states_.size()); }

    std::span<const Symbol> states_at(int t) const;
    std::span<const Symbol> inputs_at(int t) const;

  private:
    const SpaceTimeFrame* frame_;
    int state_width_;
    int input_width_;
    int t_begin_;
    std::vector<std::span<const Symbol>> states_;
    std::vector<std::span<const Symbol>> inputs_;
};

// Ring buffer holding exactly the last `depth` slices, so long runs stay
// memory-bound independent of step count.
class HistoryWindow {
  public:
    HistoryWindow(SpaceTimeFrame frame, int state_width, int input_width, int depth,
                  int t_begin);

    static HistoryWindow from_trajectory(const Trajectory& trajectory, int depth);

    void push(std::vector<Symbol> states, std::vector<Symbol> inputs);
    int next_time() const { return t_next_; }
    int depth() const { return depth_; }
    HistoryView view() const;

  private:
    SpaceTimeFrame frame_;
    int state_width_;
    int input_width_;
    int depth_;
    int t_next_;
    int pushed_ = 0;
    // ring storage, slot (t % depth) holds slice t
    std::vector<std::vector<Symbol>> state_ring_;
    std::vector<std::vector<Symbol>> input_ring_;
};

// A flat (depth-1) automaton. Immutable after construction.
class Automaton {
  public:
    Automaton(Alphabet alphabet, SpaceTimeFrame frame, CellRule rule, GatherPlan plan);

    const Alphabet& alphabet() const { return alphabet_; }
    const SpaceTimeFrame& frame() const { return frame_; }
    const CellRule& rule() const { return rule_; }
    const GatherPlan& plan() const { return plan_; }
    int state_width() const { return rule_.state_width(); }
    int input_width() const { return static_cast<int>(plan_.structure.input_arity()); }

    Trajectory zero_initial_window() const;  // all-zero window of depth max(max_dt, 1)

  private:
    Alphabet alphabet_;
    SpaceTimeFrame frame_;
    CellRule rule_;
    GatherPlan plan_;
};

struct StepResult {
    std::vector<Symbol> states;   // cells * m
    std::vector<Symbol> outputs;  // cells * l

    bool operator==(const StepResult&) const = default;
};

// Direct local recurrence: per cell, gather the k (+l) shifted arguments and
// apply (F, G) immediately.
StepResult step_direct(const Automaton& automaton, const HistoryView& history, int t);

// The shift stage: k + l full spatial slices, slice i holding at each r the
// tapped component of the trajectory at (resolve(r, shift_i), t - dt_i).
std::vector<std::vector<Symbol>> build_shift_stage(const Automaton& automaton,
                                                   const HistoryView& history, int t);

// The pointwise stage: (F, G) applied independently at every site of the
// gathered tuple.
StepResult apply_pointwise_stage(const CellRule& rule,
                                 std::span<const std::vector<Symbol>> tuple,
                                 std::size_t cells);

enum class EvalPath { Staged, Direct };

// Input slices for newly evolved times; empty function means all-zero inputs.
using InputProvider = std::function<std::vector<Symbol>(int t)>;

Trajectory evaluate_global(const Automaton& automaton, const Trajectory& initial, int steps,
                           const InputProvider& inputs = {}, EvalPath path = EvalPath::Staged);

enum class VerifyMode { Exhaustive, Random };

struct VerifyOptions {
    VerifyMode mode = VerifyMode::Exhaustive;
    int steps = 16;
    std::uint64_t seed = 0;            // random mode
    std::size_t sample_count = 1000;   // random mode
    std::size_t max_configs = 1u << 20;  // exhaustive cap
    std::size_t mismatch_limit = 100;  // listed mismatches cap (counting is exact)
    // Test fixture: swap two slices of the shift-stage tuple before the
    // pointwise stage, to exercise mismatch reporting.
    std::optional<std::pair<int, int>> corrupt_stage_swap;
};

struct Mismatch {
    std::size_t config_index;
    int t;
    std::size_t site;
    int component;  // 1-based state component, or -j for output component j
    Symbol direct_value;
    Symbol staged_value;
};

struct EquivalenceReport {
    std::size_t configs_checked = 0;
    std::size_t mismatch_count = 0;
    std::vector<Mismatch> mismatches;

    bool ok() const { return mismatch_count == 0; }
};

// Compares staged evaluation against repeated direct stepping over initial
// configurations (all of them, or a seeded random sample).
EquivalenceReport verify_factorization(const Automaton& automaton, const VerifyOptions& options);

}  // namespace nestca

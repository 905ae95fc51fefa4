#include "nestca/automaton.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <utility>

namespace nestca {

namespace {

constexpr std::size_t kTableEntryCap = std::size_t{1} << 28;

std::size_t checked_pow(std::size_t base, int exponent, const char* what) {
    std::size_t v = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && v > kTableEntryCap / std::max<std::size_t>(base, 1))
            throw ValidationError(std::string(what) + " size overflows cap");
        v *= base;
    }
    return v;
}

}  // namespace

void Alphabet::validate() const {
    if (states < 1) throw ValidationError("alphabet needs |S| >= 1");
    if (inputs < 1) throw ValidationError("alphabet needs |X| >= 1");
    if (outputs < 1) throw ValidationError("alphabet needs |Y| >= 1");
}

CellRule CellRule::table(const Alphabet& alphabet, int arity_state, int arity_input,
                         int state_width, std::vector<Symbol> f_entries,
                         std::vector<Symbol> g_entries) {
    alphabet.validate();
    if (arity_state < 1) throw ValidationError("rule needs k >= 1");
    if (arity_input < 0) throw ValidationError("rule needs l >= 0");
    if (state_width < 1) throw ValidationError("rule needs m >= 1");

    CellRule r;
    r.kind_ = Kind::Table;
    r.alphabet_ = alphabet;
    r.arity_state_ = arity_state;
    r.arity_input_ = arity_input;
    r.state_width_ = state_width;
    r.label_ = "table";

    std::size_t domain = r.domain_size();
    if (f_entries.size() != domain * static_cast<std::size_t>(state_width))
        throw ValidationError("F table has " + std::to_string(f_entries.size()) +
                              " entries, expected " +
                              std::to_string(domain * static_cast<std::size_t>(state_width)));
    if (g_entries.size() != domain * static_cast<std::size_t>(arity_input))
        throw ValidationError("G table has " + std::to_string(g_entries.size()) +
                              " entries, expected " +
                              std::to_string(domain * static_cast<std::size_t>(arity_input)));
    for (Symbol s : f_entries)
        if (s >= alphabet.states) throw ValidationError("F table entry out of alphabet S");
    for (Symbol y : g_entries)
        if (y >= alphabet.outputs) throw ValidationError("G table entry out of alphabet Y");

    r.f_entries_ = std::move(f_entries);
    r.g_entries_ = std::move(g_entries);
    return r;
}

CellRule CellRule::builtin(const Alphabet& alphabet, Builtin kind, int arity_state,
                           int arity_input, int param) {
    alphabet.validate();
    if (arity_state < 1) throw ValidationError("rule needs k >= 1");
    if (arity_input < 0) throw ValidationError("rule needs l >= 0");

    CellRule r;
    r.kind_ = Kind::BuiltinRule;
    r.alphabet_ = alphabet;
    r.arity_state_ = arity_state;
    r.arity_input_ = arity_input;
    r.builtin_ = kind;
    r.param_ = param;

    switch (kind) {
        case Builtin::Identity:
            r.state_width_ = arity_state;
            r.label_ = "identity";
            break;
        case Builtin::Xor:
            if (alphabet.states != 2) throw ValidationError("xor rule requires |S| = 2");
            r.state_width_ = 1;
            r.label_ = "xor";
            break;
        case Builtin::SumMod:
            r.state_width_ = 1;
            r.label_ = "sum-mod";
            break;
        case Builtin::Threshold:
            if (alphabet.states < 2) throw ValidationError("threshold rule requires |S| >= 2");
            if (param < 0) throw ValidationError("threshold parameter must be >= 0");
            r.state_width_ = 1;
            r.label_ = "threshold";
            break;
        case Builtin::Projection:
            if (param < 1 || param > arity_state)
                throw ValidationError("projection index " + std::to_string(param) +
                                      " out of range 1.." + std::to_string(arity_state));
            r.state_width_ = 1;
            r.label_ = "projection";
            break;
    }
    return r;
}

CellRule CellRule::synthesized(const Alphabet& alphabet, int arity_state, int arity_input,
                               int state_width, ApplyFn fn, std::string label) {
    alphabet.validate();
    if (arity_state < 1) throw ValidationError("rule needs k >= 1");
    if (state_width < 1) throw ValidationError("rule needs m >= 1");
    if (!fn) throw ValidationError("synthesized rule needs a callable");

    CellRule r;
    r.kind_ = Kind::Synthesized;
    r.alphabet_ = alphabet;
    r.arity_state_ = arity_state;
    r.arity_input_ = arity_input;
    r.state_width_ = state_width;
    r.fn_ = std::move(fn);
    r.label_ = std::move(label);
    return r;
}

CellRule::Builtin CellRule::builtin_kind() const {
    if (kind_ != Kind::BuiltinRule) throw ValidationError("rule is not a built-in");
    return builtin_;
}

std::size_t CellRule::domain_size() const {
    std::size_t s = checked_pow(alphabet_.states, arity_state_, "rule domain");
    std::size_t x = checked_pow(alphabet_.inputs, arity_input_, "rule domain");
    if (x != 0 && s > kTableEntryCap / x) throw ValidationError("rule domain size overflows cap");
    return s * x;
}

std::size_t CellRule::domain_index(std::span<const Symbol> state_args,
                                   std::span<const Symbol> input_args) const {
    std::size_t idx = 0;
    for (Symbol s : state_args) {
        if (s >= alphabet_.states) throw ValidationError("state argument out of alphabet S");
        idx = idx * alphabet_.states + s;
    }
    for (Symbol x : input_args) {
        if (x >= alphabet_.inputs) throw ValidationError("input argument out of alphabet X");
        idx = idx * alphabet_.inputs + x;
    }
    return idx;
}

void CellRule::apply(std::span<const Symbol> state_args, std::span<const Symbol> input_args,
                     std::span<Symbol> state_out, std::span<Symbol> output_out) const {
    if (state_args.size() != static_cast<std::size_t>(arity_state_) ||
        input_args.size() != static_cast<std::size_t>(arity_input_))
        throw ValidationError("rule argument arity mismatch");
    if (state_out.size() != static_cast<std::size_t>(state_width_) ||
        output_out.size() != static_cast<std::size_t>(arity_input_))
        throw ValidationError("rule result span size mismatch");

    switch (kind_) {
        case Kind::Table: {
            std::size_t idx = domain_index(state_args, input_args);
            for (int c = 0; c < state_width_; ++c)
                state_out[c] = f_entries_[idx * static_cast<std::size_t>(state_width_) + c];
            for (int j = 0; j < arity_input_; ++j)
                output_out[j] = g_entries_[idx * static_cast<std::size_t>(arity_input_) + j];
            return;
        }
        case Kind::Synthesized:
            fn_(state_args, input_args, state_out, output_out);
            return;
        case Kind::BuiltinRule:
            break;
    }

    switch (builtin_) {
        case Builtin::Identity:
            std::copy(state_args.begin(), state_args.end(), state_out.begin());
            break;
        case Builtin::Xor: {
            Symbol acc = 0;
            for (Symbol s : state_args) acc ^= (s & 1u);
            state_out[0] = acc;
            break;
        }
        case Builtin::SumMod: {
            std::uint64_t acc = 0;
            for (Symbol s : state_args) acc += s;
            state_out[0] = static_cast<Symbol>(acc % alphabet_.states);
            break;
        }
        case Builtin::Threshold: {
            std::uint64_t acc = 0;
            for (Symbol s : state_args) acc += s;
            state_out[0] = acc >= static_cast<std::uint64_t>(param_) ? 1 : 0;
            break;
        }
        case Builtin::Projection:
            state_out[0] = state_args[static_cast<std::size_t>(param_ - 1)];
            break;
    }
    // Built-ins pass the gathered inputs through as outputs.
    for (int j = 0; j < arity_input_; ++j) output_out[j] = input_args[j] % alphabet_.outputs;
}

std::vector<int> GatherPlan::default_taps(std::size_t arity, int state_width) {
    std::vector<int> taps(arity);
    for (std::size_t i = 0; i < arity; ++i)
        taps[i] = std::min(static_cast<int>(i) + 1, state_width);
    return taps;
}

Trajectory::Trajectory(SpaceTimeFrame frame, int state_width, int input_width, int output_width,
                       int t_begin)
    : frame_(std::move(frame)),
      state_width_(state_width),
      input_width_(input_width),
      output_width_(output_width),
      t_begin_(t_begin) {
    if (state_width_ < 1) throw ValidationError("trajectory state width must be >= 1");
    if (input_width_ < 0 || output_width_ < 0)
        throw ValidationError("trajectory input/output widths must be >= 0");
}

void Trajectory::append(std::vector<Symbol> states, std::vector<Symbol> inputs,
                        std::vector<Symbol> outputs) {
    std::size_t cells = frame_.cell_count();
    if (states.size() != cells * static_cast<std::size_t>(state_width_))
        throw ValidationError("state slice size mismatch");
    if (inputs.empty()) inputs.assign(cells * static_cast<std::size_t>(input_width_), 0);
    if (outputs.empty()) outputs.assign(cells * static_cast<std::size_t>(output_width_), 0);
    if (inputs.size() != cells * static_cast<std::size_t>(input_width_))
        throw ValidationError("input slice size mismatch");
    if (outputs.size() != cells * static_cast<std::size_t>(output_width_))
        throw ValidationError("output slice size mismatch");
    states_.push_back(std::move(states));
    inputs_.push_back(std::move(inputs));
    outputs_.push_back(std::move(outputs));
}

std::span<const Symbol> Trajectory::states_at(int t) const {
    if (t < t_begin_ || t >= t_end()) throw ValidationError("trajectory time out of range");
    return states_[static_cast<std::size_t>(t - t_begin_)];
}

std::span<const Symbol> Trajectory::inputs_at(int t) const {
    if (t < t_begin_ || t >= t_end()) throw ValidationError("trajectory time out of range");
    return inputs_[static_cast<std::size_t>(t - t_begin_)];
}

std::span<const Symbol> Trajectory::outputs_at(int t) const {
    if (t < t_begin_ || t >= t_end()) throw ValidationError("trajectory time out of range");
    return outputs_[static_cast<std::size_t>(t - t_begin_)];
}

Symbol Trajectory::state_component(int t, std::size_t site, int component) const {
    if (component < 1 || component > state_width_)
        throw ValidationError("state component out of range");
    return states_at(t)[site * static_cast<std::size_t>(state_width_) +
                        static_cast<std::size_t>(component - 1)];
}

HistoryView::HistoryView(const SpaceTimeFrame* frame, int state_width, int input_width,
                         int t_begin, std::vector<std::span<const Symbol>> states,
                         std::vector<std::span<const Symbol>> inputs)
    : frame_(frame),
      state_width_(state_width),
      input_width_(input_width),
      t_begin_(t_begin),
      states_(std::move(states)),
      inputs_(std::move(inputs)) {}

std::span<const Symbol> HistoryView::states_at(int t) const {
    if (t < t_begin_ || t >= t_end())
        throw ValidationError("insufficient history depth: slice " + std::to_string(t) +
                              " not in window [" + std::to_string(t_begin_) + ", " +
                              std::to_string(t_end()) + ")");
    return states_[static_cast<std::size_t>(t - t_begin_)];
}

std::span<const Symbol> HistoryView::inputs_at(int t) const {
    if (t < t_begin_ || t >= t_end())
        throw ValidationError("insufficient history depth: slice " + std::to_string(t) +
                              " not in window [" + std::to_string(t_begin_) + ", " +
                              std::to_string(t_end()) + ")");
    return inputs_[static_cast<std::size_t>(t - t_begin_)];
}

HistoryWindow::HistoryWindow(SpaceTimeFrame frame, int state_width, int input_width, int depth,
                             int t_begin)
    : frame_(std::move(frame)),
      state_width_(state_width),
      input_width_(input_width),
      depth_(depth),
      t_next_(t_begin) {
    if (depth_ < 1) throw ValidationError("history window depth must be >= 1");
    state_ring_.resize(static_cast<std::size_t>(depth_));
    input_ring_.resize(static_cast<std::size_t>(depth_));
}

HistoryWindow HistoryWindow::from_trajectory(const Trajectory& trajectory, int depth) {
    if (trajectory.slice_count() < static_cast<std::size_t>(depth))
        throw ValidationError("initial window depth " + std::to_string(trajectory.slice_count()) +
                              " is below required history depth " + std::to_string(depth));
    HistoryWindow w(trajectory.frame(), trajectory.state_width(), trajectory.input_width(), depth,
                    trajectory.t_end() - depth);
    for (int t = trajectory.t_end() - depth; t < trajectory.t_end(); ++t) {
        auto s = trajectory.states_at(t);
        auto x = trajectory.inputs_at(t);
        w.push(std::vector<Symbol>(s.begin(), s.end()), std::vector<Symbol>(x.begin(), x.end()));
    }
    return w;
}

void HistoryWindow::push(std::vector<Symbol> states, std::vector<Symbol> inputs) {
    std::size_t cells = frame_.cell_count();
    if (states.size() != cells * static_cast<std::size_t>(state_width_))
        throw ValidationError("state slice size mismatch");
    if (inputs.empty()) inputs.assign(cells * static_cast<std::size_t>(input_width_), 0);
    if (inputs.size() != cells * static_cast<std::size_t>(input_width_))
        throw ValidationError("input slice size mismatch");
    std::size_t slot = static_cast<std::size_t>(t_next_ % depth_ + (t_next_ % depth_ < 0 ? depth_ : 0));
    state_ring_[slot] = std::move(states);
    input_ring_[slot] = std::move(inputs);
    ++t_next_;
    ++pushed_;
}

HistoryView HistoryWindow::view() const {
    if (pushed_ < depth_)
        throw ValidationError("history window not fully seeded: " + std::to_string(pushed_) +
                              " of " + std::to_string(depth_) + " slices");
    std::vector<std::span<const Symbol>> states;
    std::vector<std::span<const Symbol>> inputs;
    states.reserve(static_cast<std::size_t>(depth_));
    inputs.reserve(static_cast<std::size_t>(depth_));
    for (int t = t_next_ - depth_; t < t_next_; ++t) {
        std::size_t slot = static_cast<std::size_t>(t % depth_ + (t % depth_ < 0 ? depth_ : 0));
        states.emplace_back(state_ring_[slot]);
        inputs.emplace_back(input_ring_[slot]);
    }
    return HistoryView(&frame_, state_width_, input_width_, t_next_ - depth_, std::move(states),
                       std::move(inputs));
}

Automaton::Automaton(Alphabet alphabet, SpaceTimeFrame frame, CellRule rule, GatherPlan plan)
    : alphabet_(alphabet), frame_(std::move(frame)), rule_(std::move(rule)), plan_(std::move(plan)) {
    alphabet_.validate();
    if (!(rule_.alphabet() == alphabet_))
        throw ValidationError("rule alphabet differs from automaton alphabet");
    plan_.structure.validate(frame_.dims());
    if (plan_.structure.state_arity() != static_cast<std::size_t>(rule_.arity_state()))
        throw ValidationError("structure k = " + std::to_string(plan_.structure.state_arity()) +
                              " does not match rule arity k = " +
                              std::to_string(rule_.arity_state()));
    if (plan_.structure.input_arity() != static_cast<std::size_t>(rule_.arity_input()))
        throw ValidationError("structure l = " + std::to_string(plan_.structure.input_arity()) +
                              " does not match rule arity l = " +
                              std::to_string(rule_.arity_input()));
    if (frame_.horizon() < plan_.structure.max_dt())
        throw ValidationError("frame horizon " + std::to_string(frame_.horizon()) +
                              " is below max shift dt " +
                              std::to_string(plan_.structure.max_dt()));
    if (plan_.taps.empty())
        plan_.taps = GatherPlan::default_taps(plan_.structure.state_arity(), rule_.state_width());
    if (plan_.taps.size() != plan_.structure.state_arity())
        throw ValidationError("tap list size does not match k");
    for (int tap : plan_.taps)
        if (tap < 1 || tap > rule_.state_width())
            throw ValidationError("tap " + std::to_string(tap) + " out of range 1.." +
                                  std::to_string(rule_.state_width()));
}

Trajectory Automaton::zero_initial_window() const {
    int depth = std::max(plan_.structure.max_dt(), 1);
    Trajectory t(frame_, state_width(), input_width(), input_width(), 0);
    for (int i = 0; i < depth; ++i)
        t.append(std::vector<Symbol>(frame_.cell_count() * static_cast<std::size_t>(state_width()), 0));
    return t;
}

StepResult step_direct(const Automaton& automaton, const HistoryView& history, int t) {
    const SpaceTimeFrame& frame = automaton.frame();
    const GatherPlan& plan = automaton.plan();
    const CellRule& rule = automaton.rule();
    std::size_t cells = frame.cell_count();
    std::size_t k = plan.structure.state_arity();
    std::size_t l = plan.structure.input_arity();
    int m = rule.state_width();

    StepResult result;
    result.states.resize(cells * static_cast<std::size_t>(m));
    result.outputs.resize(cells * l);

    std::vector<Symbol> s_args(k);
    std::vector<Symbol> x_args(l);
    for (std::size_t site = 0; site < cells; ++site) {
        for (std::size_t i = 0; i < k; ++i) {
            const Shift& shift = plan.structure.state_shifts[i];
            ResolvedSite rs = resolve_site(frame, site, shift);
            if (rs.site) {
                std::size_t comp = static_cast<std::size_t>(plan.taps[i] - 1);
                s_args[i] = history.states_at(t - shift.dt)[*rs.site * static_cast<std::size_t>(m) + comp];
            } else {
                s_args[i] = rs.fixed_value;
            }
        }
        for (std::size_t j = 0; j < l; ++j) {
            const Shift& shift = plan.structure.input_shifts[j];
            ResolvedSite rs = resolve_site(frame, site, shift);
            x_args[j] = rs.site ? history.inputs_at(t - shift.dt)[*rs.site * l + j] : rs.fixed_value;
        }
        rule.apply(s_args, x_args,
                   std::span<Symbol>(result.states).subspan(site * static_cast<std::size_t>(m),
                                                            static_cast<std::size_t>(m)),
                   std::span<Symbol>(result.outputs).subspan(site * l, l));
    }
    return result;
}

std::vector<std::vector<Symbol>> build_shift_stage(const Automaton& automaton,
                                                   const HistoryView& history, int t) {
    const SpaceTimeFrame& frame = automaton.frame();
    const GatherPlan& plan = automaton.plan();
    std::size_t cells = frame.cell_count();
    std::size_t k = plan.structure.state_arity();
    std::size_t l = plan.structure.input_arity();
    int m = automaton.rule().state_width();

    std::vector<std::vector<Symbol>> tuple;
    tuple.reserve(k + l);

    // The factors differ only in shifts in time and space: each slice is the
    // whole distribution shifted by one (dr, dt), tap applied.
    for (std::size_t i = 0; i < k; ++i) {
        const Shift& shift = plan.structure.state_shifts[i];
        std::span<const Symbol> source = history.states_at(t - shift.dt);
        std::size_t comp = static_cast<std::size_t>(plan.taps[i] - 1);
        std::vector<Symbol> slice(cells);
        for (std::size_t site = 0; site < cells; ++site) {
            ResolvedSite rs = resolve_site(frame, site, shift);
            slice[site] = rs.site ? source[*rs.site * static_cast<std::size_t>(m) + comp]
                                  : rs.fixed_value;
        }
        tuple.push_back(std::move(slice));
    }
    for (std::size_t j = 0; j < l; ++j) {
        const Shift& shift = plan.structure.input_shifts[j];
        std::span<const Symbol> source = history.inputs_at(t - shift.dt);
        std::vector<Symbol> slice(cells);
        for (std::size_t site = 0; site < cells; ++site) {
            ResolvedSite rs = resolve_site(frame, site, shift);
            slice[site] = rs.site ? source[*rs.site * l + j] : rs.fixed_value;
        }
        tuple.push_back(std::move(slice));
    }
    return tuple;
}

StepResult apply_pointwise_stage(const CellRule& rule,
                                 std::span<const std::vector<Symbol>> tuple, std::size_t cells) {
    std::size_t k = static_cast<std::size_t>(rule.arity_state());
    std::size_t l = static_cast<std::size_t>(rule.arity_input());
    if (tuple.size() != k + l)
        throw ValidationError("tuple has " + std::to_string(tuple.size()) + " slices, rule needs " +
                              std::to_string(k + l));
    for (const auto& slice : tuple)
        if (slice.size() != cells) throw ValidationError("tuple slice size mismatch");

    int m = rule.state_width();
    StepResult result;
    result.states.resize(cells * static_cast<std::size_t>(m));
    result.outputs.resize(cells * l);

    std::vector<Symbol> s_args(k);
    std::vector<Symbol> x_args(l);
    for (std::size_t site = 0; site < cells; ++site) {
        for (std::size_t i = 0; i < k; ++i) s_args[i] = tuple[i][site];
        for (std::size_t j = 0; j < l; ++j) x_args[j] = tuple[k + j][site];
        rule.apply(s_args, x_args,
                   std::span<Symbol>(result.states).subspan(site * static_cast<std::size_t>(m),
                                                            static_cast<std::size_t>(m)),
                   std::span<Symbol>(result.outputs).subspan(site * l, l));
    }
    return result;
}

namespace {

std::vector<Symbol> input_slice_for(const Automaton& automaton, const InputProvider& inputs,
                                    int t) {
    std::size_t want = automaton.frame().cell_count() *
                       static_cast<std::size_t>(automaton.input_width());
    if (!inputs) return std::vector<Symbol>(want, 0);
    std::vector<Symbol> slice = inputs(t);
    if (slice.size() != want)
        throw ValidationError("input provider returned slice of size " +
                              std::to_string(slice.size()) + ", expected " + std::to_string(want));
    return slice;
}

}  // namespace

Trajectory evaluate_global(const Automaton& automaton, const Trajectory& initial, int steps,
                           const InputProvider& inputs, EvalPath path) {
    if (!(initial.frame() == automaton.frame()))
        throw ValidationError("initial window frame differs from automaton frame");
    if (initial.state_width() != automaton.state_width())
        throw ValidationError("initial window state width mismatch");
    if (initial.input_width() != automaton.input_width())
        throw ValidationError("initial window input width mismatch");
    if (steps < 0) throw ValidationError("step count must be >= 0");

    int depth = std::max(automaton.plan().structure.max_dt(), 1);
    HistoryWindow ring = HistoryWindow::from_trajectory(initial, depth);

    Trajectory out(automaton.frame(), automaton.state_width(), automaton.input_width(),
                   automaton.input_width(), initial.t_begin());
    for (int t = initial.t_begin(); t < initial.t_end(); ++t) {
        auto s = initial.states_at(t);
        auto x = initial.inputs_at(t);
        auto y = initial.outputs_at(t);
        out.append(std::vector<Symbol>(s.begin(), s.end()),
                   std::vector<Symbol>(x.begin(), x.end()),
                   std::vector<Symbol>(y.begin(), y.end()));
    }

    std::size_t cells = automaton.frame().cell_count();
    for (int step = 0; step < steps; ++step) {
        int t = ring.next_time();
        StepResult res;
        if (path == EvalPath::Staged) {
            auto tuple = build_shift_stage(automaton, ring.view(), t);
            res = apply_pointwise_stage(automaton.rule(), tuple, cells);
        } else {
            res = step_direct(automaton, ring.view(), t);
        }
        std::vector<Symbol> x = input_slice_for(automaton, inputs, t);
        out.append(res.states, x, res.outputs);
        ring.push(std::move(res.states), std::move(x));
    }
    return out;
}

namespace {

// One evolution path for the factorization check; the staged route may carry
// the test fixture's stage corruption.
Trajectory evolve_for_verify(const Automaton& automaton, const Trajectory& initial, int steps,
                             bool staged, const std::optional<std::pair<int, int>>& corrupt) {
    if (!staged && !corrupt) return evaluate_global(automaton, initial, steps, {}, EvalPath::Direct);
    if (staged && !corrupt) return evaluate_global(automaton, initial, steps, {}, EvalPath::Staged);

    int depth = std::max(automaton.plan().structure.max_dt(), 1);
    HistoryWindow ring = HistoryWindow::from_trajectory(initial, depth);
    Trajectory out = initial;
    std::size_t cells = automaton.frame().cell_count();
    for (int step = 0; step < steps; ++step) {
        int t = ring.next_time();
        auto tuple = build_shift_stage(automaton, ring.view(), t);
        auto [a, b] = *corrupt;
        if (a < 0 || b < 0 || a >= static_cast<int>(tuple.size()) ||
            b >= static_cast<int>(tuple.size()))
            throw ValidationError("stage swap indices out of range");
        std::swap(tuple[static_cast<std::size_t>(a)], tuple[static_cast<std::size_t>(b)]);
        StepResult res = apply_pointwise_stage(automaton.rule(), tuple, cells);
        out.append(res.states, {}, res.outputs);
        ring.push(std::move(res.states), {});
    }
    return out;
}

void diff_trajectories(const Automaton& automaton, const Trajectory& direct,
                       const Trajectory& staged, std::size_t config_index, int first_new_t,
                       EquivalenceReport& report, std::size_t mismatch_limit) {
    std::size_t cells = automaton.frame().cell_count();
    int m = automaton.state_width();
    int l = automaton.input_width();
    for (int t = first_new_t; t < direct.t_end(); ++t) {
        auto ds = direct.states_at(t);
        auto ss = staged.states_at(t);
        auto dy = direct.outputs_at(t);
        auto sy = staged.outputs_at(t);
        for (std::size_t site = 0; site < cells; ++site) {
            for (int c = 0; c < m; ++c) {
                std::size_t idx = site * static_cast<std::size_t>(m) + static_cast<std::size_t>(c);
                if (ds[idx] != ss[idx]) {
                    ++report.mismatch_count;
                    if (report.mismatches.size() < mismatch_limit)
                        report.mismatches.push_back(
                            {config_index, t, site, c + 1, ds[idx], ss[idx]});
                }
            }
            for (int j = 0; j < l; ++j) {
                std::size_t idx = site * static_cast<std::size_t>(l) + static_cast<std::size_t>(j);
                if (dy[idx] != sy[idx]) {
                    ++report.mismatch_count;
                    if (report.mismatches.size() < mismatch_limit)
                        report.mismatches.push_back(
                            {config_index, t, site, -(j + 1), dy[idx], sy[idx]});
                }
            }
        }
    }
}

}  // namespace

EquivalenceReport verify_factorization(const Automaton& automaton,
                                         const VerifyOptions& options) {
    if (options.steps < 1) throw ValidationError("verification needs steps >= 1");
    std::size_t cells = automaton.frame().cell_count();
    int m = automaton.state_width();
    int depth = std::max(automaton.plan().structure.max_dt(), 1);
    std::size_t symbols_per_config =
        cells * static_cast<std::size_t>(m) * static_cast<std::size_t>(depth);
    std::uint32_t s_count = automaton.alphabet().states;

    EquivalenceReport report;

    auto check_config = [&](const std::vector<Symbol>& symbols, std::size_t config_index) {
        Trajectory initial(automaton.frame(), m, automaton.input_width(), automaton.input_width(),
                           0);
        std::size_t per_slice = cells * static_cast<std::size_t>(m);
        for (int d = 0; d < depth; ++d)
            initial.append(std::vector<Symbol>(
                symbols.begin() + static_cast<std::ptrdiff_t>(d * per_slice),
                symbols.begin() + static_cast<std::ptrdiff_t>((d + 1) * per_slice)));
        Trajectory direct =
            evolve_for_verify(automaton, initial, options.steps, /*staged=*/false, std::nullopt);
        Trajectory staged = evolve_for_verify(automaton, initial, options.steps, /*staged=*/true,
                                              options.corrupt_stage_swap);
        diff_trajectories(automaton, direct, staged, config_index, depth, report,
                          options.mismatch_limit);
        ++report.configs_checked;
    };

    if (options.mode == VerifyMode::Exhaustive) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < symbols_per_config; ++i) {
            if (s_count > 1 && total > options.max_configs / s_count)
                throw ValidationError("exhaustive config count exceeds cap " +
                                      std::to_string(options.max_configs));
            total *= s_count;
        }
        std::vector<Symbol> symbols(symbols_per_config, 0);
        for (std::size_t index = 0; index < total; ++index) {
            check_config(symbols, index);
            // mixed-radix increment, last symbol fastest
            for (std::size_t pos = symbols_per_config; pos-- > 0;) {
                if (++symbols[pos] < s_count) break;
                symbols[pos] = 0;
            }
        }
    } else {
        std::mt19937_64 rng(options.seed);
        std::vector<Symbol> symbols(symbols_per_config);
        for (std::size_t index = 0; index < options.sample_count; ++index) {
            for (auto& s : symbols) s = static_cast<Symbol>(rng() % s_count);
            check_config(symbols, index);
        }
    }
    return report;
}

}  // namespace nestca

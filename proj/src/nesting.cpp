#include "nestca/nesting.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace nestca {

NestedAutomaton NestedAutomaton::leaf(Alphabet alphabet, SpaceTimeFrame frame, CellRule rule,
                                      GatherPlan plan) {
    // Reuse the flat constructor's validation, then mirror its resolved plan.
    Automaton flat(alphabet, frame, rule, plan);

    NestedAutomaton n;
    n.alphabet_ = alphabet;
    n.frame_ = std::move(frame);
    n.structure_ = flat.plan().structure;
    n.taps_ = flat.plan().taps;
    n.rule_ = flat.rule();
    n.leaf_flat_ = std::move(flat);
    return n;
}

NestedAutomaton NestedAutomaton::unchecked(Alphabet alphabet, SpaceTimeFrame frame,
                                           ShiftStructure structure, std::vector<int> taps,
                                           std::optional<CellRule> rule,
                                           std::shared_ptr<const NestedAutomaton> inner) {
    NestedAutomaton n;
    n.alphabet_ = alphabet;
    n.frame_ = std::move(frame);
    n.structure_ = std::move(structure);
    n.taps_ = std::move(taps);
    n.rule_ = std::move(rule);
    if (inner) n.block_ = BlockIndex(inner->frame());
    n.inner_ = std::move(inner);
    return n;
}

int NestedAutomaton::depth() const { return inner_ ? 1 + inner_->depth() : 1; }

const BlockIndex& NestedAutomaton::block_index() const {
    if (!block_) throw ValidationError("leaf automaton has no inner block");
    return *block_;
}

std::size_t NestedAutomaton::component_count() const {
    if (is_leaf()) {
        if (!rule_) throw ValidationError("malformed node: leaf without rule");
        return static_cast<std::size_t>(rule_->state_width());
    }
    return structure_.state_arity();
}

std::size_t NestedAutomaton::component_width() const {
    return is_leaf() ? 1 : inner_->state_width();
}

const Automaton& NestedAutomaton::as_flat() const {
    if (!leaf_flat_) throw ValidationError("only leaf levels evaluate through the flat engine");
    return *leaf_flat_;
}

NestedAutomaton compose_nested(ShiftStructure outer_structure, SpaceTimeFrame outer_frame,
                               NestedAutomaton inner, std::vector<int> taps) {
    outer_structure.validate(outer_frame.dims());
    std::size_t k = outer_structure.state_arity();
    std::size_t block = inner.frame().block_size();
    if (k != block)
        throw ValidationError("outer arity k = " + std::to_string(k) +
                              " does not match inner block size |R'| x horizon' = " +
                              std::to_string(block));
    if (outer_structure.input_arity() != 0)
        throw ValidationError("nested levels are autonomous: outer input shifts must be empty");
    if (inner.is_leaf() && inner.structure().input_arity() != 0)
        throw ValidationError("nested levels are autonomous: inner rule must have l = 0");
    if (outer_frame.horizon() < outer_structure.max_dt())
        throw ValidationError("outer frame horizon " + std::to_string(outer_frame.horizon()) +
                              " is below max shift dt " +
                              std::to_string(outer_structure.max_dt()));

    if (taps.empty()) taps = GatherPlan::default_taps(k, static_cast<int>(k));
    if (taps.size() != k) throw ValidationError("tap list size does not match k");
    for (int tap : taps)
        if (tap < 1 || tap > static_cast<int>(k))
            throw ValidationError("tap " + std::to_string(tap) + " out of range 1.." +
                                  std::to_string(k));

    NestedAutomaton n;
    n.alphabet_ = inner.alphabet();
    n.frame_ = std::move(outer_frame);
    n.structure_ = std::move(outer_structure);
    n.taps_ = std::move(taps);
    n.block_ = BlockIndex(inner.frame());
    n.inner_ = std::make_shared<const NestedAutomaton>(std::move(inner));
    return n;
}

std::vector<Symbol> cell_function_of(const NestedAutomaton& inner, std::span<const Symbol> block) {
    const SpaceTimeFrame& frame = inner.frame();
    std::size_t cells = frame.cell_count();
    int horizon = frame.horizon();
    std::size_t width = inner.state_width();
    std::size_t per_slice = cells * width;
    std::size_t expected = per_slice * static_cast<std::size_t>(horizon);
    if (block.size() != expected)
        throw ValidationError("block has " + std::to_string(block.size()) +
                              " symbols, expected " + std::to_string(expected));

    // Canonical time-major layout makes each window slice a contiguous run.
    Trajectory window(frame, static_cast<int>(width), 0, 0, 0);
    for (int t = 0; t < horizon; ++t) {
        auto begin = block.begin() + static_cast<std::ptrdiff_t>(t * per_slice);
        window.append(std::vector<Symbol>(begin, begin + static_cast<std::ptrdiff_t>(per_slice)));
    }

    Trajectory evolved = evaluate_nested(inner, window, horizon);

    std::vector<Symbol> result;
    result.reserve(expected);
    for (int t = horizon; t < 2 * horizon; ++t) {
        auto s = evolved.states_at(t);
        result.insert(result.end(), s.begin(), s.end());
    }
    return result;
}

StepResult step_nested(const NestedAutomaton& nested, const HistoryView& history, int t) {
    if (nested.is_leaf()) return step_direct(nested.as_flat(), history, t);

    const SpaceTimeFrame& frame = nested.frame();
    std::size_t cells = frame.cell_count();
    std::size_t k = nested.structure().state_arity();
    std::size_t comp_width = nested.component_width();
    std::size_t width = nested.state_width();

    StepResult result;
    result.states.resize(cells * width);

    std::vector<Symbol> block(k * comp_width);
    for (std::size_t site = 0; site < cells; ++site) {
        for (std::size_t i = 0; i < k; ++i) {
            const Shift& shift = nested.structure().state_shifts[i];
            ResolvedSite rs = resolve_site(frame, site, shift);
            Symbol* dst = block.data() + i * comp_width;
            if (rs.site) {
                std::span<const Symbol> source = history.states_at(t - shift.dt);
                std::size_t comp = static_cast<std::size_t>(nested.taps()[i] - 1);
                const Symbol* src = source.data() + *rs.site * width + comp * comp_width;
                std::copy(src, src + comp_width, dst);
            } else {
                // Out-of-lattice neighbors contribute the boundary's ground
                // symbol broadcast across the whole component.
                std::fill(dst, dst + comp_width, rs.fixed_value);
            }
        }
        std::vector<Symbol> next = cell_function_of(*nested.inner(), block);
        std::copy(next.begin(), next.end(), result.states.begin() +
                                                static_cast<std::ptrdiff_t>(site * width));
    }
    return result;
}

Trajectory evaluate_nested(const NestedAutomaton& nested, const Trajectory& initial, int steps,
                           const InputProvider& inputs) {
    if (nested.is_leaf())
        return evaluate_global(nested.as_flat(), initial, steps, inputs, EvalPath::Direct);

    if (!(initial.frame() == nested.frame()))
        throw ValidationError("initial window frame differs from automaton frame");
    if (initial.state_width() != static_cast<int>(nested.state_width()))
        throw ValidationError("initial window state width mismatch");
    if (steps < 0) throw ValidationError("step count must be >= 0");

    int depth = std::max(nested.structure().max_dt(), 1);
    HistoryWindow ring = HistoryWindow::from_trajectory(initial, depth);

    Trajectory out(nested.frame(), static_cast<int>(nested.state_width()), 0, 0,
                   initial.t_begin());
    for (int t = initial.t_begin(); t < initial.t_end(); ++t) {
        auto s = initial.states_at(t);
        out.append(std::vector<Symbol>(s.begin(), s.end()));
    }
    for (int step = 0; step < steps; ++step) {
        int t = ring.next_time();
        StepResult res = step_nested(nested, ring.view(), t);
        out.append(res.states);
        ring.push(std::move(res.states), {});
    }
    return out;
}

Automaton flatten(const NestedAutomaton& nested, const FlattenOptions& options) {
    if (nested.is_leaf()) return nested.as_flat();

    std::size_t k = nested.structure().state_arity();
    std::size_t comp_width = nested.component_width();
    std::size_t width = nested.state_width();
    int arity = static_cast<int>(k * comp_width);

    // Each outer argument expands to component_width scalar arguments sharing
    // one shift; taps address the scalars of the selected component.
    ShiftStructure flat_structure;
    std::vector<int> flat_taps;
    flat_structure.state_shifts.reserve(k * comp_width);
    flat_taps.reserve(k * comp_width);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < comp_width; ++j) {
            flat_structure.state_shifts.push_back(nested.structure().state_shifts[i]);
            flat_taps.push_back(static_cast<int>((static_cast<std::size_t>(nested.taps()[i]) - 1) *
                                                     comp_width +
                                                 j + 1));
        }
    }

    std::shared_ptr<const NestedAutomaton> inner =
        std::make_shared<const NestedAutomaton>(*nested.inner());

    std::uint32_t s_count = nested.alphabet().states;
    std::size_t domain = 1;
    bool fits = true;
    for (int i = 0; i < arity && fits; ++i) {
        if (s_count > 1 && domain > options.table_cap / s_count)
            fits = false;
        else
            domain *= s_count;
    }
    if (fits) fits = domain <= options.table_cap;
    if (!fits && options.force_table)
        throw ValidationError("explicit flatten table exceeds cap " +
                              std::to_string(options.table_cap));

    CellRule rule = [&] {
        if (fits) {
            std::vector<Symbol> f_entries(domain * width);
            std::vector<Symbol> args(static_cast<std::size_t>(arity), 0);
            for (std::size_t index = 0; index < domain; ++index) {
                std::vector<Symbol> out = cell_function_of(*inner, args);
                std::copy(out.begin(), out.end(),
                          f_entries.begin() + static_cast<std::ptrdiff_t>(index * width));
                for (std::size_t pos = args.size(); pos-- > 0;) {
                    if (++args[pos] < s_count) break;
                    args[pos] = 0;
                }
            }
            return CellRule::table(nested.alphabet(), arity, 0, static_cast<int>(width),
                                   std::move(f_entries), {});
        }
        return CellRule::synthesized(
            nested.alphabet(), arity, 0, static_cast<int>(width),
            [inner](std::span<const Symbol> state_args, std::span<const Symbol>,
                    std::span<Symbol> state_out, std::span<Symbol>) {
                std::vector<Symbol> out = cell_function_of(*inner, state_args);
                std::copy(out.begin(), out.end(), state_out.begin());
            },
            "flattened");
    }();

    return Automaton(nested.alphabet(), nested.frame(), std::move(rule),
                     GatherPlan{std::move(flat_structure), std::move(flat_taps)});
}

namespace {

LowestLevelFinding walk_lowest_level(const NestedAutomaton& node, const std::string& path) {
    bool has_rule = node.rule() != nullptr;
    bool has_inner = node.inner() != nullptr;
    if (has_rule && has_inner)
        return {false, path, "node carries a cell rule above the lowest level"};
    if (!has_rule && !has_inner) return {false, path, "node carries neither rule nor inner level"};
    if (has_inner) return walk_lowest_level(*node.inner(), path + ".inner");
    return {};
}

}  // namespace

LowestLevelFinding validate_lowest_level(const NestedAutomaton& nested) {
    return walk_lowest_level(nested, "root");
}

namespace {

void diff_state_trajectories(const Trajectory& nested_run, const Trajectory& flat_run,
                             std::size_t config_index, int first_new_t,
                             EquivalenceReport& report, std::size_t mismatch_limit) {
    std::size_t cells = nested_run.frame().cell_count();
    int width = nested_run.state_width();
    for (int t = first_new_t; t < nested_run.t_end(); ++t) {
        auto ns = nested_run.states_at(t);
        auto fs = flat_run.states_at(t);
        for (std::size_t site = 0; site < cells; ++site) {
            for (int c = 0; c < width; ++c) {
                std::size_t idx =
                    site * static_cast<std::size_t>(width) + static_cast<std::size_t>(c);
                if (ns[idx] != fs[idx]) {
                    ++report.mismatch_count;
                    if (report.mismatches.size() < mismatch_limit)
                        report.mismatches.push_back(
                            {config_index, t, site, c + 1, ns[idx], fs[idx]});
                }
            }
        }
    }
}

}  // namespace

EquivalenceReport verify_flatten_equivalence(const NestedAutomaton& nested,
                                             const VerifyOptions& options,
                                             const FlattenOptions& flatten_options) {
    if (options.steps < 1) throw ValidationError("verification needs steps >= 1");
    Automaton flat = flatten(nested, flatten_options);

    std::size_t cells = nested.frame().cell_count();
    std::size_t width = nested.state_width();
    int depth = std::max(nested.structure().max_dt(), 1);
    std::size_t symbols_per_config = cells * width * static_cast<std::size_t>(depth);
    std::uint32_t s_count = nested.alphabet().states;

    EquivalenceReport report;

    auto check_config = [&](const std::vector<Symbol>& symbols, std::size_t config_index) {
        Trajectory initial(nested.frame(), static_cast<int>(width), 0, 0, 0);
        std::size_t per_slice = cells * width;
        for (int d = 0; d < depth; ++d)
            initial.append(std::vector<Symbol>(
                symbols.begin() + static_cast<std::ptrdiff_t>(d * per_slice),
                symbols.begin() + static_cast<std::ptrdiff_t>((d + 1) * per_slice)));
        Trajectory nested_run = evaluate_nested(nested, initial, options.steps);
        Trajectory flat_run = evaluate_global(flat, initial, options.steps, {}, EvalPath::Direct);
        diff_state_trajectories(nested_run, flat_run, config_index, depth, report,
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

#include "nestca/propagation.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace nestca {

void NestedCoordinate::validate() const {
    if (levels.empty()) throw ValidationError("nested coordinate needs at least one level");
    if (levels.size() > 3)
        throw ValidationError("nested coordinates support up to 3 levels, got " +
                              std::to_string(levels.size()));
    for (const LevelCoordinate& lc : levels) {
        if (lc.r.empty()) throw ValidationError("level coordinate needs at least one axis");
        if (lc.t < 0.0) throw ValidationError("level times must be nonnegative");
    }
}

NestedField delta_field(NestedCoordinate site, double tolerance, Symbol hit, Symbol miss) {
    site.validate();
    if (tolerance < 0.0) throw ValidationError("delta tolerance must be >= 0");
    int levels = static_cast<int>(site.levels.size());
    return {[site = std::move(site), tolerance, hit, miss](const NestedCoordinate& coord) {
                if (coord.levels.size() < site.levels.size()) return miss;
                for (std::size_t j = 0; j < site.levels.size(); ++j) {
                    const LevelCoordinate& want = site.levels[j];
                    const LevelCoordinate& got = coord.levels[j];
                    if (got.r.size() != want.r.size()) return miss;
                    if (std::abs(got.t - want.t) > tolerance) return miss;
                    for (std::size_t a = 0; a < want.r.size(); ++a)
                        if (std::abs(got.r[a] - want.r[a]) > tolerance) return miss;
                }
                return hit;
            },
            levels};
}

NestedField step_field(double threshold, Symbol high, Symbol low) {
    return {[threshold, high, low](const NestedCoordinate& coord) {
                if (coord.levels.empty() || coord.levels[0].r.empty())
                    throw ValidationError("step field needs a level-0 spatial coordinate");
                return coord.levels[0].r[0] >= threshold ? high : low;
            },
            1};
}

NestedField grid_field(std::vector<Symbol> samples, double tolerance, Symbol background) {
    if (samples.empty()) throw ValidationError("grid field needs at least one sample");
    if (tolerance < 0.0) throw ValidationError("grid tolerance must be >= 0");
    return {[samples = std::move(samples), tolerance, background](const NestedCoordinate& coord) {
                if (coord.levels.empty() || coord.levels[0].r.empty())
                    throw ValidationError("grid field needs a level-0 spatial coordinate");
                double x = coord.levels[0].r[0];
                double nearest = std::round(x);
                if (std::abs(x - nearest) > tolerance) return background;
                long n = static_cast<long>(nearest);
                long size = static_cast<long>(samples.size());
                long idx = n % size;
                if (idx < 0) idx += size;
                return samples[static_cast<std::size_t>(idx)];
            },
            1};
}

NestedCoordinate back_translate(const NestedSpeedSpec& spec, const NestedCoordinate& coord,
                                double steps, const StepDelays& delays) {
    NestedCoordinate out = coord;
    for (std::size_t j = 0; j < out.levels.size(); ++j) {
        double delay = delays.at(j);
        double speed = nested_speed(spec, static_cast<int>(j));
        out.levels[j].r[0] -= steps * (speed * delay);
        out.levels[j].t -= steps * delay;
    }
    return out;
}

Symbol propagate_pure(const NestedField& field, const NestedSpeedSpec& spec,
                      const NestedCoordinate& coord, int steps, const StepDelays& delays) {
    coord.validate();
    if (steps < 0) throw ValidationError("step count must be >= 0");
    return field(back_translate(spec, coord, steps, delays));
}

Symbol propagate_processed(const NestedField& field, const NestedSpeedSpec& spec,
                           const UnaryRule& rule, const NestedCoordinate& coord, int steps,
                           const StepDelays& delays) {
    coord.validate();
    if (steps < 0) throw ValidationError("step count must be >= 0");
    if (!rule) throw ValidationError("processing rule must be callable");
    // Translation commutes with the pointwise rule, so the alternation
    // collapses to one translation followed by n rule applications.
    Symbol value = field(back_translate(spec, coord, steps, delays));
    for (int i = 0; i < steps; ++i) value = rule(value);
    return value;
}

Symbol propagate_multi(const NestedField& field, const NestedSpeedSpec& spec,
                       const MultiRule& rule, const std::vector<double>& argument_speeds,
                       const NestedCoordinate& coord, int steps, const StepDelays& delays) {
    coord.validate();
    if (steps < 0) throw ValidationError("step count must be >= 0");
    if (!rule) throw ValidationError("processing rule must be callable");
    if (argument_speeds.empty()) throw ValidationError("propagate_multi needs k >= 1 speeds");

    std::size_t k = argument_speeds.size();
    std::size_t translated_levels = std::min<std::size_t>(coord.levels.size(), 2);

    // Per-argument offsets at levels 0 and 1; computing the effective speed
    // validates each v_i against u.
    std::vector<double> level0_offset(k), level1_offset(k);
    for (std::size_t i = 0; i < k; ++i) {
        NestedSpeedSpec arg_spec{spec.u, {argument_speeds[i]}};
        level0_offset[i] = nested_speed(arg_spec, 0) * delays.at(0);
        if (translated_levels > 1) level1_offset[i] = nested_speed(arg_spec, 1) * delays.at(1);
    }

    std::map<std::pair<int, std::vector<int>>, Symbol> memo;

    auto coordinate_for = [&](const std::vector<int>& counts) {
        NestedCoordinate c = coord;
        int total = 0;
        double off0 = 0.0, off1 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            total += counts[i];
            off0 += counts[i] * level0_offset[i];
            off1 += counts[i] * level1_offset[i];
        }
        c.levels[0].r[0] -= off0;
        c.levels[0].t -= total * delays.at(0);
        if (translated_levels > 1) {
            c.levels[1].r[0] -= off1;
            c.levels[1].t -= total * delays.at(1);
        }
        return c;
    };

    std::function<Symbol(int, std::vector<int>&)> value = [&](int depth,
                                                              std::vector<int>& counts) -> Symbol {
        if (depth == 0) return field(coordinate_for(counts));
        auto key = std::make_pair(depth, counts);
        auto found = memo.find(key);
        if (found != memo.end()) return found->second;
        std::vector<Symbol> args(k);
        for (std::size_t i = 0; i < k; ++i) {
            ++counts[i];
            args[i] = value(depth - 1, counts);
            --counts[i];
        }
        Symbol v = rule(args);
        memo.emplace(std::move(key), v);
        return v;
    };

    std::vector<int> counts(k, 0);
    return value(steps, counts);
}

Symbol general_formula(const NestedField& field, const NestedSpeedSpec& spec,
                       const MultiRule& rule,
                       const std::vector<std::vector<double>>& level_argument_speeds,
                       const NestedCoordinate& coord, const StepDelays& delays) {
    coord.validate();
    if (!rule) throw ValidationError("processing rule must be callable");
    std::size_t depth = coord.levels.size();
    if (depth < 2)
        throw ValidationError("the general formula applies to coordinates with >= 2 levels");
    if (level_argument_speeds.size() != depth - 1)
        throw ValidationError("expected " + std::to_string(depth - 1) +
                              " per-level speed lists, got " +
                              std::to_string(level_argument_speeds.size()));
    std::size_t k = level_argument_speeds[0].size();
    if (k == 0) throw ValidationError("the general formula needs k >= 1 arguments");
    for (const auto& row : level_argument_speeds)
        if (row.size() != k)
            throw ValidationError("per-level argument counts are inconsistent");

    std::vector<Symbol> args(k);
    for (std::size_t i = 0; i < k; ++i) {
        NestedSpeedSpec arg_spec{spec.u, {}};
        arg_spec.level_speeds.reserve(depth - 1);
        for (std::size_t lvl = 0; lvl + 1 < depth; ++lvl)
            arg_spec.level_speeds.push_back(level_argument_speeds[lvl][i]);
        NestedCoordinate translated = coord;
        for (std::size_t j = 0; j < depth; ++j) {
            double delay = delays.at(j);
            translated.levels[j].r[0] -= nested_speed(arg_spec, static_cast<int>(j)) * delay;
            translated.levels[j].t -= delay;
        }
        args[i] = field(translated);
    }
    return rule(args);
}

}  // namespace nestca

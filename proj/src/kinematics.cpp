#include "nestca/kinematics.hpp"

#include <cmath>
#include <limits>

namespace nestca {

Speed shift_speed(const Shift& shift) {
    if (shift.dt < 1) throw ValidationError("shift dt must be >= 1");
    Speed s;
    s.components.reserve(shift.dr.size());
    double sum_sq = 0.0;
    for (int d : shift.dr) {
        double c = static_cast<double>(d) / static_cast<double>(shift.dt);
        s.components.push_back(c);
        sum_sq += c * c;
    }
    s.magnitude = std::sqrt(sum_sq);
    return s;
}

void NestedSpeedSpec::validate() const {
    if (!(u > 0.0)) throw ValidationError("global speed u must be > 0");
    for (double v : level_speeds)
        if (v < 0.0) throw ValidationError("level speeds must be >= 0");
}

double nested_speed(const NestedSpeedSpec& spec, int level) {
    spec.validate();
    if (level < 0) throw ValidationError("nesting level must be >= 0");
    if (static_cast<std::size_t>(level) > spec.level_speeds.size())
        throw ValidationError("nesting level " + std::to_string(level) + " exceeds the " +
                              std::to_string(spec.level_speeds.size()) +
                              " provided level speeds");
    if (level == 0) {
        if (spec.level_speeds.empty())
            throw ValidationError("level 0 speed requires at least one level speed");
        return spec.level_speeds[0];
    }
    double sum_sq = 0.0;
    for (int j = 0; j < level; ++j) sum_sq += spec.level_speeds[static_cast<std::size_t>(j)] *
                                              spec.level_speeds[static_cast<std::size_t>(j)];
    double u_sq = spec.u * spec.u;
    if (sum_sq > u_sq) throw SpeedExceedsLimit(sum_sq, u_sq);
    double arg = 1.0 - sum_sq / u_sq;
    if (arg < 0.0) arg = 0.0;  // guard fp residue at the equality boundary
    return spec.u * std::sqrt(arg);
}

std::vector<SpeedTableRow> speed_table(const NestedAutomaton& nested, double u) {
    if (!(u > 0.0)) throw ValidationError("global speed u must be > 0");

    std::vector<const NestedAutomaton*> levels;
    for (const NestedAutomaton* node = &nested; node != nullptr; node = node->inner())
        levels.push_back(node);

    std::vector<SpeedTableRow> rows;
    double u_sq = u * u;
    for (std::size_t n = 0; n < levels.size(); ++n) {
        const auto& shifts = levels[n]->structure().state_shifts;
        for (std::size_t i = 0; i < shifts.size(); ++i) {
            SpeedTableRow row;
            row.level = static_cast<int>(n);
            row.shift_index = static_cast<int>(i) + 1;
            row.raw_speed = shift_speed(shifts[i]).magnitude;
            // Same-index shifts of the enclosing levels feed the sum.
            double sum_sq = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const auto& ancestor = levels[j]->structure().state_shifts;
                if (i < ancestor.size()) {
                    double v = shift_speed(ancestor[i]).magnitude;
                    sum_sq += v * v;
                }
            }
            if (sum_sq > u_sq) {
                row.exceeds_limit = true;
                row.effective_speed = std::numeric_limits<double>::quiet_NaN();
            } else if (n == 0) {
                row.effective_speed = row.raw_speed;
            } else {
                double arg = 1.0 - sum_sq / u_sq;
                if (arg < 0.0) arg = 0.0;
                row.effective_speed = u * std::sqrt(arg);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

RationalShift rationalize_speed(double target, int max_dt) {
    if (max_dt < 1) throw ValidationError("max_dt must be >= 1");
    if (!std::isfinite(target)) throw ValidationError("target speed must be finite");

    bool have_best = false;
    long best_dr = 0;
    int best_dt = 1;
    double best_err = 0.0;
    for (int dt = 1; dt <= max_dt; ++dt) {
        double scaled = target * dt;
        long lo = static_cast<long>(std::floor(scaled));
        for (long dr : {lo, lo + 1}) {
            double err = std::abs(static_cast<double>(dr) / dt - target);
            bool better = !have_best || err < best_err ||
                          (err == best_err && dt == best_dt && std::labs(dr) < std::labs(best_dr));
            if (better) {
                have_best = true;
                best_dr = dr;
                best_dt = dt;
                best_err = err;
            }
        }
    }
    return {Shift({static_cast<int>(best_dr)}, best_dt), best_err};
}

}  // namespace nestca

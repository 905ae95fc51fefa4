#include "nestca/spacetime.hpp"

#include <algorithm>
#include <limits>

namespace nestca {

namespace {

// Euclidean-style modulus: result always in [0, m).
int wrap(int value, int extent) {
    int m = value % extent;
    return m < 0 ? m + extent : m;
}

}  // namespace

SpaceTimeFrame::SpaceTimeFrame(std::vector<int> extents, int horizon, Boundary boundary)
    : extents_(std::move(extents)), horizon_(horizon), boundary_(boundary), cell_count_(1) {
    if (extents_.empty()) throw ValidationError("frame needs at least one spatial axis");
    if (horizon_ < 1) throw ValidationError("frame horizon must be >= 1, got " + std::to_string(horizon_));
    for (int e : extents_) {
        if (e < 1) throw ValidationError("frame extent must be >= 1, got " + std::to_string(e));
        if (cell_count_ > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(e))
            throw ValidationError("frame cell count overflows");
        cell_count_ *= static_cast<std::size_t>(e);
    }
}

std::size_t SpaceTimeFrame::site_index(const Coord& r) const {
    if (!contains(r)) throw ValidationError("coordinate outside frame extents");
    std::size_t idx = 0;
    for (std::size_t a = 0; a < extents_.size(); ++a)
        idx = idx * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(r[a]);
    return idx;
}

Coord SpaceTimeFrame::site_coord(std::size_t index) const {
    if (index >= cell_count_) throw ValidationError("site index out of range");
    Coord r(extents_.size(), 0);
    for (std::size_t a = extents_.size(); a-- > 0;) {
        r[a] = static_cast<int>(index % static_cast<std::size_t>(extents_[a]));
        index /= static_cast<std::size_t>(extents_[a]);
    }
    return r;
}

bool SpaceTimeFrame::contains(const Coord& r) const {
    if (r.size() != extents_.size()) return false;
    for (std::size_t a = 0; a < extents_.size(); ++a)
        if (r[a] < 0 || r[a] >= extents_[a]) return false;
    return true;
}

int ShiftStructure::max_dt() const {
    int m = 0;
    for (const Shift& s : state_shifts) m = std::max(m, s.dt);
    for (const Shift& s : input_shifts) m = std::max(m, s.dt);
    return m;
}

void ShiftStructure::validate(int dims) const {
    if (state_shifts.empty()) throw ValidationError("shift structure needs k >= 1 state shifts");
    auto check = [dims](const Shift& s, const char* what) {
        if (static_cast<int>(s.dr.size()) != dims)
            throw ValidationError(std::string(what) + " shift dimensionality mismatch");
        if (s.dt < 1) throw ValidationError(std::string(what) + " shift dt must be >= 1");
    };
    for (const Shift& s : state_shifts) check(s, "state");
    for (const Shift& s : input_shifts) check(s, "input");
}

ResolveResult resolve(const SpaceTimeFrame& frame, const Coord& r, const Shift& shift) {
    if (!frame.contains(r)) throw ValidationError("resolve: coordinate outside frame");
    if (shift.dr.size() != r.size()) throw ValidationError("resolve: shift dimensionality mismatch");

    Coord q(r.size());
    bool inside = true;
    for (std::size_t a = 0; a < r.size(); ++a) {
        int v = r[a] - shift.dr[a];
        if (frame.boundary().kind == BoundaryKind::Periodic) {
            q[a] = wrap(v, frame.extents()[a]);
        } else {
            if (v < 0 || v >= frame.extents()[a]) inside = false;
            q[a] = v;
        }
    }
    if (!inside) return frame.boundary().fixed_symbol;
    return q;
}

ResolvedSite resolve_site(const SpaceTimeFrame& frame, std::size_t site, const Shift& shift) {
    ResolveResult res = resolve(frame, frame.site_coord(site), shift);
    if (std::holds_alternative<Symbol>(res)) return {std::nullopt, std::get<Symbol>(res)};
    return {frame.site_index(std::get<Coord>(res)), 0};
}

BlockIndex::BlockIndex(SpaceTimeFrame inner_frame) : frame_(std::move(inner_frame)) {}

std::pair<Coord, int> BlockIndex::to_point(std::size_t pos) const {
    if (pos < 1 || pos > size())
        throw ValidationError("block position " + std::to_string(pos) + " out of range 1.." +
                              std::to_string(size()));
    std::size_t zero_based = pos - 1;
    int t = static_cast<int>(zero_based / frame_.cell_count());
    std::size_t site = zero_based % frame_.cell_count();
    return {frame_.site_coord(site), t};
}

std::size_t BlockIndex::to_pos(const Coord& r, int t) const {
    if (t < 0 || t >= frame_.horizon())
        throw ValidationError("block time " + std::to_string(t) + " out of range");
    return static_cast<std::size_t>(t) * frame_.cell_count() + frame_.site_index(r) + 1;
}

}  // namespace nestca

#pragma once

// Iterated partition joins.  Cells live in time-0 coordinates and carry the
// composed forward map, so one refinement step is one affine preimage and one
// convex intersection per (cell, atom) pair.  Empty and zero-area children
// are dropped; cell order is itinerary-lexicographic and deterministic.

#include "gpelab/gpe.hpp"
#include "gpelab/overlay.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gpe {

struct JoinCell {
    std::vector<std::uint32_t> itinerary;
    ConvexPolygon region;
    AffineMap forward;  // T^n restricted to this cell
};

struct LevelStats {
    std::uint64_t atom_count = 0;
    Interval skeleton_length;      // each geometric edge counted once
    Interval per_atom_edge_sum;    // secondary statistic: sum of cell perimeters
    std::uint64_t multiplicity = 0;
    Interval max_diameter;
};

struct JoinLevel {
    std::size_t n = 0;
    std::vector<JoinCell> cells;
    std::vector<Segment> skeleton;
    LevelStats stats;
};

struct JoinOptions {
    std::uint64_t max_cells = 1u << 20;
    std::size_t max_coord_bits = 8192;
    bool with_skeleton = true;
};

struct CapHit {
    enum class Kind { Cells, Bits } kind;
    std::size_t at_level;  // the level that could not be completed

    std::string describe() const {
        return std::string(kind == Kind::Cells ? "cell-count cap" : "coordinate-bit cap") +
               " hit while building level " + std::to_string(at_level);
    }
};

struct JoinRun {
    std::vector<JoinLevel> levels;  // levels 1..N (possibly truncated by a cap)
    std::optional<CapHit> cap;
};

// ---------------------------------------------------------------------------

inline OverlayResult skeleton_of(const std::vector<JoinCell>& cells) {
    std::vector<Segment> all;
    for (const JoinCell& c : cells) {
        auto es = c.region.edges();
        all.insert(all.end(), es.begin(), es.end());
    }
    return overlay_segments(all);
}

// Max over skeleton vertices of the number of cells whose closure holds the
// vertex.  For convex-cell partitions the max of |P_x| is attained there.
inline std::uint64_t multiplicity(const std::vector<JoinCell>& cells,
                                  const std::vector<Segment>& skeleton) {
    std::set<Point> vertex_set;
    for (const Segment& s : skeleton) {
        vertex_set.insert(s.a);
        vertex_set.insert(s.b);
    }
    std::vector<Point> verts(vertex_set.begin(), vertex_set.end());  // sorted (x, y)
    std::vector<std::uint32_t> counts(verts.size(), 0);

    for (const JoinCell& c : cells) {
        Rational xmin, ymin, xmax, ymax;
        c.region.bounding_box(xmin, ymin, xmax, ymax);
        auto lo = std::lower_bound(verts.begin(), verts.end(), xmin,
                                   [](const Point& p, const Rational& x) { return p.x < x; });
        for (auto it = lo; it != verts.end() && it->x <= xmax; ++it) {
            if (it->y < ymin || it->y > ymax) continue;
            if (c.region.contains(*it))
                ++counts[static_cast<std::size_t>(it - verts.begin())];
        }
    }
    std::uint64_t best = 0;
    for (auto c : counts) best = std::max<std::uint64_t>(best, c);
    return best;
}

inline Interval max_cell_diameter(const std::vector<JoinCell>& cells) {
    Rational best(0);
    for (const JoinCell& c : cells) {
        const auto& v = c.region.vertices();
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                Rational d2 = squared_distance(v[i], v[j]);
                if (d2 > best) best = d2;
            }
    }
    return sqrt_enclosure(best);
}

// Split a skeleton into (boundary-of-space, interior) length enclosures.
inline std::pair<Interval, Interval> skeleton_boundary_split(const std::vector<Segment>& skeleton,
                                                             const ConvexPolygon& space) {
    auto space_edges = space.edges();
    Interval boundary, interior;
    for (const Segment& s : skeleton) {
        bool on_boundary = false;
        for (const Segment& e : space_edges) {
            if (segment_contains(e, s.a) && segment_contains(e, s.b)) {
                on_boundary = true;
                break;
            }
        }
        (on_boundary ? boundary : interior) += s.length();
    }
    return {boundary, interior};
}

namespace detail {

inline void fill_stats(JoinLevel& level, bool with_skeleton) {
    level.stats.atom_count = level.cells.size();
    level.stats.max_diameter = max_cell_diameter(level.cells);
    Interval perims;
    for (const JoinCell& c : level.cells) perims += c.region.perimeter();
    level.stats.per_atom_edge_sum = perims;
    if (with_skeleton) {
        OverlayResult overlay = skeleton_of(level.cells);
        level.skeleton = std::move(overlay.segments);
        level.stats.skeleton_length = overlay.total_length;
        level.stats.multiplicity = multiplicity(level.cells, level.skeleton);
    }
}

} // namespace detail

inline JoinLevel first_join_level(const GpeSystem& g, const JoinOptions& opts = {}) {
    JoinLevel level;
    level.n = 1;
    for (std::size_t i = 0; i < g.atom_count(); ++i)
        level.cells.push_back(
            {{static_cast<std::uint32_t>(i)}, g.source().atoms[i], g.piece_maps()[i]});
    detail::fill_stats(level, opts.with_skeleton);
    return level;
}

// One refinement step: level n -> level n+1.  Throws CapHit via JoinRun in
// join_sequence; here a cap is reported through the optional result.
inline std::optional<JoinLevel> refine(const JoinLevel& level, const GpeSystem& g,
                                       const JoinOptions& opts = {},
                                       std::optional<CapHit>* cap = nullptr) {
    JoinLevel next;
    next.n = level.n + 1;
    const std::size_t natoms = g.atom_count();
    if (static_cast<std::uint64_t>(level.cells.size()) * natoms > opts.max_cells) {
        if (cap) *cap = CapHit{CapHit::Kind::Cells, next.n};
        return std::nullopt;
    }
    for (const JoinCell& parent : level.cells) {
        AffineMap inverse = parent.forward.inverse();
        for (std::size_t i = 0; i < natoms; ++i) {
            ConvexPolygon pre = apply_affine(inverse, g.source().atoms[i]);
            auto child_region = intersect_convex(parent.region, pre);
            if (!child_region) continue;
            if (child_region->max_bit_length() > opts.max_coord_bits) {
                if (cap) *cap = CapHit{CapHit::Kind::Bits, next.n};
                return std::nullopt;
            }
            JoinCell child;
            child.itinerary = parent.itinerary;
            child.itinerary.push_back(static_cast<std::uint32_t>(i));
            child.region = std::move(*child_region);
            child.forward = g.piece_maps()[i].compose(parent.forward);
            next.cells.push_back(std::move(child));
        }
    }
    detail::fill_stats(next, opts.with_skeleton);
    return next;
}

inline JoinRun join_sequence(const GpeSystem& g, std::size_t max_level,
                             const JoinOptions& opts = {}) {
    if (max_level < 1) throw std::invalid_argument("max_level must be >= 1");
    JoinRun run;
    run.levels.push_back(first_join_level(g, opts));
    while (run.levels.size() < max_level) {
        auto next = refine(run.levels.back(), g, opts, &run.cap);
        if (!next) break;
        run.levels.push_back(std::move(*next));
    }
    return run;
}

// ---------------------------------------------------------------------------
// CSV emission: one row per level, enclosure endpoints as 12-significant-

// digit decimals (lo rounded down, hi rounded up), counts exact.
inline std::string levels_csv(const JoinRun& run) {
    std::string out = "n,atom_count,skeleton_length_lo,skeleton_length_hi,b,max_diameter_hi\n";
    for (const JoinLevel& level : run.levels) {
        const LevelStats& s = level.stats;
        out += std::to_string(level.n);
        out += ",";
        out += std::to_string(s.atom_count);
        out += ",";
        out += to_decimal(s.skeleton_length.lo, 12, Round::Down);
        out += ",";
        out += to_decimal(s.skeleton_length.hi, 12, Round::Up);
        out += ",";
        out += std::to_string(s.multiplicity);
        out += ",";
        out += to_decimal(s.max_diameter.hi, 12, Round::Up);
        out += "\n";
    }
    return out;
}

} // namespace gpe

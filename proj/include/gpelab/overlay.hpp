#pragma once

// Exact overlay of planar segment sets: merge collinear overlaps, split at
// crossings and T-junctions, and emit a canonical list of pairwise
// interior-disjoint segments together with the certified total length.
// Lines are grouped by direction so parallel families never pairwise test.

#include "gpelab/geometry.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace gpe {

struct OverlayResult {
    std::vector<Segment> segments;
    Interval total_length;
};

namespace detail {

struct LineKey {
    // Normalized (nx, ny, c) for the line {x : n·x = c}; leading nonzero of
    // (nx, ny) scaled to 1, so equal lines share one key.
    Rational nx, ny, c;

    friend bool operator<(const LineKey& a, const LineKey& b) {
        int s = cmp(a.nx, b.nx);
        if (s != 0) return s < 0;
        s = cmp(a.ny, b.ny);
        if (s != 0) return s < 0;
        return a.c < b.c;
    }
    friend bool operator==(const LineKey& a, const LineKey& b) {
        return a.nx == b.nx && a.ny == b.ny && a.c == b.c;
    }
};

inline LineKey line_through(const Point& a, const Point& b) {
    Rational nx = a.y - b.y, ny = b.x - a.x;
    Rational c = nx * a.x + ny * a.y;
    if (sign(nx) != 0) {
        return {Rational(1), ny / nx, c / nx};
    }
    return {Rational(0), Rational(1), c / ny};
}

struct LineRecord {
    LineKey key;
    Point dir;                                     // spans the line; t(p) = dot(dir, p)
    std::vector<std::pair<Rational, Rational>> spans;  // raw [t0,t1] from inputs
    std::map<Rational, Point> events;              // split points keyed by t
};

} // namespace detail

inline OverlayResult overlay_segments(const std::vector<Segment>& input) {
    using detail::LineKey;
    using detail::LineRecord;

    std::map<LineKey, LineRecord> lines;
    for (const Segment& s : input) {
        LineKey key = detail::line_through(s.a, s.b);
        auto [it, fresh] = lines.try_emplace(key);
        LineRecord& rec = it->second;
        if (fresh) {
            rec.key = key;
            rec.dir = Point{-key.ny, key.nx};
        }
        Rational ta = dot(rec.dir, s.a), tb = dot(rec.dir, s.b);
        rec.events.emplace(ta, s.a);
        rec.events.emplace(tb, s.b);
        if (ta > tb) std::swap(ta, tb);
        rec.spans.emplace_back(std::move(ta), std::move(tb));
    }

    // Merge each line's spans into maximal disjoint intervals.
    struct Prepared {
        LineRecord* rec;
        std::vector<std::pair<Rational, Rational>> merged;
    };
    std::vector<Prepared> prepared;
    prepared.reserve(lines.size());
    for (auto& [key, rec] : lines) {
        auto spans = rec.spans;
        std::sort(spans.begin(), spans.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<Rational, Rational>> merged;
        for (auto& sp : spans) {
            if (!merged.empty() && sp.first <= merged.back().second) {
                if (sp.second > merged.back().second) merged.back().second = sp.second;
            } else {
                merged.push_back(sp);
            }
        }
        prepared.push_back({&rec, std::move(merged)});
    }

    auto in_union = [](const Prepared& p, const Rational& t) {
        for (const auto& iv : p.merged)
            if (iv.first <= t && t <= iv.second) return true;
        return false;
    };

    // Crossings between non-parallel lines only (direction part of the key).
    for (std::size_t i = 0; i < prepared.size(); ++i) {
        const LineKey& ki = prepared[i].rec->key;
        for (std::size_t j = i + 1; j < prepared.size(); ++j) {
            const LineKey& kj = prepared[j].rec->key;
            if (ki.nx == kj.nx && ki.ny == kj.ny) continue;  // parallel
            Rational det = ki.nx * kj.ny - ki.ny * kj.nx;
            Point p{(ki.c * kj.ny - kj.c * ki.ny) / det, (ki.nx * kj.c - kj.nx * ki.c) / det};
            Rational ti = dot(prepared[i].rec->dir, p);
            Rational tj = dot(prepared[j].rec->dir, p);
            if (in_union(prepared[i], ti) && in_union(prepared[j], tj)) {
                prepared[i].rec->events.emplace(ti, p);
                prepared[j].rec->events.emplace(std::move(tj), std::move(p));
            }
        }
    }

    OverlayResult out;
    for (const auto& p : prepared) {
        const auto& events = p.rec->events;
        for (const auto& iv : p.merged) {
            auto it = events.find(iv.first);
            auto stop = events.find(iv.second);
            // Both ends were inserted as endpoint events.
            const Point* prev = &it->second;
            while (it != stop) {
                ++it;
                if (it->first > iv.second) break;  // event beyond this interval
                if (it->first <= iv.first) continue;
                out.segments.emplace_back(*prev, it->second);
                prev = &it->second;
            }
            out.total_length += distance_enclosure(events.at(iv.first), events.at(iv.second));
        }
    }
    return out;
}

} // namespace gpe

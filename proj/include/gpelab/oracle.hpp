#pragma once

// Independent brute-force oracles.  These classify rational grid points by
// exact itinerary and count distinct itineraries of full-dimensional cells;
// they share no code path with the join engine or the unfolding counter they
// cross-check.

#include "gpelab/billiard.hpp"
#include "gpelab/gpe.hpp"

#include <cstdint>
#include <thread>
#include <unordered_set>
#include <vector>

namespace gpe {

// Distinct exact itineraries of regular grid points, for levels 1..n.
// counts[k-1] == |R_k| once the grid is fine enough to meet every cell.
inline std::vector<std::uint64_t> grid_itinerary_counts(const GpeSystem& g, std::size_t n,
                                                        std::size_t grid) {
    Rational xmin, ymin, xmax, ymax;
    g.space().bounding_box(xmin, ymin, xmax, ymax);
    Rational w = xmax - xmin, h = ymax - ymin;
    std::vector<std::unordered_set<std::uint64_t>> seen(n);
    if (g.atom_count() > 64) throw std::invalid_argument("oracle supports up to 64 atoms");
    for (std::size_t i = 0; i < grid; ++i) {
        for (std::size_t j = 0; j < grid; ++j) {
            Point p{xmin + Rational(2 * static_cast<long>(i) + 1) * w /
                               Rational(2 * static_cast<long>(grid)),
                    ymin + Rational(2 * static_cast<long>(j) + 1) * h /
                               Rational(2 * static_cast<long>(grid))};
            if (!g.space().contains(p)) continue;
            OrbitResult orbit = evaluate(g, p, n);
            std::uint64_t key = 1;  // leading sentinel bit keeps lengths distinct
            for (std::size_t k = 0; k < orbit.itinerary.size(); ++k) {
                key = key * 64 + orbit.itinerary[k];
                seen[k].insert(key);
            }
        }
    }
    std::vector<std::uint64_t> counts(n);
    for (std::size_t k = 0; k < n; ++k) counts[k] = seen[k].size();
    return counts;
}

// ---------------------------------------------------------------------------
// Exact billiard ray tracing.  Directions are carried as rational vectors;
// the incidence angle theta = 2*atan(tau) enters through the exact identity
// d = cos * e + sin * rot90(e) with cos,sin rational in tau, which keeps the
// angle exact even when the side length is irrational.

namespace oracle_detail {

struct ExactRay {
    Point origin;
    Point dir;  // rational, nonzero, not normalized
};

// First boundary hit; returns false on a vertex hit (singular) or if the
// footpoint leaves the boundary (cannot happen for valid states).
inline bool exact_bounce(const BilliardTable& t, std::size_t from_side, ExactRay& ray,
                         std::size_t& hit_side) {
    const std::size_t m = t.side_count();
    bool found = false;
    Rational best_t;
    std::size_t best_j = 0;
    Point best_point;
    for (std::size_t j = 0; j < m; ++j) {
        if (j == from_side) continue;  // convex tables only
        Segment e = t.exact_side(j);
        Point ev = e.b - e.a;
        Rational denom = cross(ray.dir, ev);
        if (sign(denom) == 0) continue;
        Point rel = e.a - ray.origin;
        Rational tt = cross(rel, ev) / denom;
        if (sign(tt) <= 0) continue;
        Rational ww = cross(rel, ray.dir) / denom;
        int swa = sign(ww), swb = sign(ww - 1);
        if (swa < 0 || swb > 0) continue;
        if (!found || tt < best_t) {
            found = true;
            best_t = tt;
            best_j = j;
            best_point = Point{ray.origin.x + tt * ray.dir.x, ray.origin.y + tt * ray.dir.y};
        }
    }
    if (!found) return false;
    Segment e = t.exact_side(best_j);
    if (best_point == e.a || best_point == e.b) return false;  // exact vertex hit

    // Reflect the direction across the side direction ev.
    Point ev = e.b - e.a;
    Rational n2 = ev.x * ev.x + ev.y * ev.y;
    Rational a = (ev.x * ev.x - ev.y * ev.y) / n2;
    Rational b = 2 * ev.x * ev.y / n2;
    Point reflected{a * ray.dir.x + b * ray.dir.y, b * ray.dir.x - a * ray.dir.y};
    ray.origin = best_point;
    ray.dir = reflected;
    hit_side = best_j;
    return true;
}

} // namespace oracle_detail

// Exact side itinerary of the phase point (side, u, theta=2*atan(tau)):
// sides hit by the first n bounces, or nullopt on a vertex hit.
inline std::optional<std::vector<std::uint16_t>> exact_billiard_itinerary(
    const BilliardTable& t, std::size_t side, const Rational& u, const Rational& tau,
    std::size_t n) {
    if (!t.convex()) throw std::invalid_argument("exact oracle supports convex tables only");
    if (sign(u) <= 0 || u >= 1) return std::nullopt;
    if (sign(tau) <= 0) return std::nullopt;
    Segment e = t.exact_side(side);
    Point ev = e.b - e.a;
    Rational one_plus = 1 + tau * tau;
    Rational cos_t = (1 - tau * tau) / one_plus;
    Rational sin_t = 2 * tau / one_plus;
    oracle_detail::ExactRay ray;
    ray.origin = Point{e.a.x + u * ev.x, e.a.y + u * ev.y};
    ray.dir = Point{cos_t * ev.x - sin_t * ev.y, cos_t * ev.y + sin_t * ev.x};

    std::vector<std::uint16_t> labels;
    labels.reserve(n);
    std::size_t cur = side;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t hit = 0;
        if (!oracle_detail::exact_bounce(t, cur, ray, hit)) return std::nullopt;
        labels.push_back(static_cast<std::uint16_t>(hit));
        cur = hit;
    }
    return labels;
}

// Distinct exact (start side, bounce sides...) itineraries over an
// s_grid x theta_grid phase grid; counts[k-1] approximates |P_k| from below
// and equals it once the grid resolves every cell.  Deterministic; threads
// only partition the grid, the merge is order-independent set union.
inline std::vector<std::uint64_t> billiard_grid_cell_counts(const BilliardTable& t, std::size_t n,
                                                            std::size_t s_grid,
                                                            std::size_t theta_grid,
                                                            unsigned threads = 0) {
    const std::size_t m = t.side_count();
    if (m > 30) throw std::invalid_argument("too many sides for packed itineraries");
    std::size_t width = 1;
    while ((std::size_t(1) << width) < m) ++width;
    if ((n + 1) * width + 1 > 64) throw std::invalid_argument("n too deep for packed itineraries");

    // Spread the s-grid over sides proportionally to length (at least 1 per
    // side); grid points are exact in the side parameter u.
    std::vector<std::size_t> per_side(m);
    double L = t.perimeter_d();
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        per_side[i] = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(static_cast<double>(s_grid) * t.side(i).len / L)));
        assigned += per_side[i];
    }
    (void)assigned;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::vector<std::unordered_set<std::uint64_t>>> partial(
        threads, std::vector<std::unordered_set<std::uint64_t>>(n));

    auto worker = [&](unsigned tid) {
        auto& sets = partial[tid];
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t a = tid; a < per_side[i]; a += threads) {
                Rational u(2 * static_cast<long>(a) + 1, 2 * static_cast<long>(per_side[i]));
                u.canonicalize();
                for (std::size_t b = 0; b < theta_grid / 2; ++b) {
                    for (int rec = 0; rec < 2; ++rec) {
                        // tau and 1/tau cover (0,pi/2) and (pi/2,pi).
                        Rational tau(2 * static_cast<long>(b) + 1,
                                     static_cast<long>(theta_grid));
                        tau.canonicalize();
                        if (rec) tau = 1 / tau;
                        auto labels = exact_billiard_itinerary(t, i, u, tau, n);
                        if (!labels) continue;
                        std::uint64_t key = (std::uint64_t(1) << width) | i;
                        for (std::size_t k = 0; k < labels->size(); ++k) {
                            key = (key << width) | (*labels)[k];
                            sets[k].insert(key);
                        }
                    }
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
    for (auto& th : pool) th.join();

    std::vector<std::uint64_t> counts(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::unordered_set<std::uint64_t> merged;
        for (unsigned tid = 0; tid < threads; ++tid)
            merged.insert(partial[tid][k].begin(), partial[tid][k].end());
        counts[k] = merged.size();
    }
    return counts;
}

} // namespace gpe

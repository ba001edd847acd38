#pragma once

// Exact itinerary-cell counting for convex polygonal billiards.  A side
// itinerary (s_0..s_n) is a positive-area cell of the n-th join iff, after
// unfolding the table by exact rational reflections, some directed line
// crosses every unfolded doorway with consistent orientation and all
// endpoint constraints strict.  Feasibility is decided over the homogeneous
// line coordinates (a,b,c) of {ax+by=c}: a small polyhedral cone in R^3,
// maintained incrementally by its generating rays in exact integers.

#include "gpelab/billiard.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gpe {

namespace unfold_detail {

using IVec3 = std::array<mpz_class, 3>;

inline IVec3 cross3(const IVec3& u, const IVec3& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

inline mpz_class dot3(const IVec3& u, const IVec3& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

inline bool is_zero(const IVec3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

inline void reduce(IVec3& v) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), v[0].get_mpz_t(), v[1].get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v[2].get_mpz_t());
    if (g > 1) {
        v[0] /= g;
        v[1] /= g;
        v[2] /= g;
    }
}

// Constraint "point P on the nonnegative side": coefficients of
// f(a,b,c) = a Px + b Py - c, cleared to integers.
inline IVec3 point_constraint(const Point& p, bool nonnegative) {
    const mpz_class& xn = p.x.get_num();
    const mpz_class& xd = p.x.get_den();
    const mpz_class& yn = p.y.get_num();
    const mpz_class& yd = p.y.get_den();
    IVec3 v{xn * yd, yn * xd, -(xd * yd)};
    reduce(v);
    if (!nonnegative)
        for (auto& e : v) e = -e;
    return v;
}

struct Cone {
    std::vector<IVec3> rays;  // generating set of {x : constraint·x >= 0 for all}

    bool trivial() const { return rays.empty(); }

    void dedupe_insert(IVec3 r) {
        reduce(r);
        if (is_zero(r)) return;
        for (const auto& e : rays)
            if (e == r) return;
        rays.push_back(std::move(r));
    }

    // Intersect with {x : c·x >= 0}.  Standard ray update: keep nonnegative
    // rays, add plane crossings of (+,-) pairs.
    void add_constraint(const IVec3& c) {
        std::vector<mpz_class> val(rays.size());
        for (std::size_t i = 0; i < rays.size(); ++i) val[i] = dot3(c, rays[i]);
        std::vector<IVec3> keep;
        for (std::size_t i = 0; i < rays.size(); ++i)
            if (sgn(val[i]) >= 0) keep.push_back(rays[i]);
        std::vector<IVec3> next = std::move(keep);
        Cone tmp;
        tmp.rays = std::move(next);
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (sgn(val[i]) <= 0) continue;
            for (std::size_t j = 0; j < rays.size(); ++j) {
                if (sgn(val[j]) >= 0) continue;
                IVec3 mix;
                for (int k = 0; k < 3; ++k) mix[k] = val[i] * rays[j][k] - val[j] * rays[i][k];
                tmp.dedupe_insert(std::move(mix));
            }
        }
        rays = std::move(tmp.rays);
    }

    // Rebuild the generating set from the full constraint list (used at the
    // root and when the incremental set grows past the cap).
    static Cone from_constraints(const std::vector<IVec3>& cs) {
        Cone cone;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            for (std::size_t j = i + 1; j < cs.size(); ++j) {
                IVec3 r = cross3(cs[i], cs[j]);
                if (is_zero(r)) continue;
                bool pos_ok = true, neg_ok = true;
                for (const auto& c : cs) {
                    int s = sgn(dot3(c, r));
                    if (s < 0) pos_ok = false;
                    if (s > 0) neg_ok = false;
                    if (!pos_ok && !neg_ok) break;
                }
                if (pos_ok) cone.dedupe_insert(r);
                if (neg_ok) {
                    IVec3 m;
                    for (int k = 0; k < 3; ++k) m[k] = -r[k];
                    cone.dedupe_insert(std::move(m));
                }
            }
        }
        return cone;
    }

    // Full-dimensional iff the generator sum is strictly inside every
    // constraint.  Valid for pointed cones, which corridor cones are.
    bool full_dimensional(const std::vector<IVec3>& cs) const {
        if (rays.empty()) return false;
        IVec3 sum{0, 0, 0};
        for (const auto& r : rays)
            for (int k = 0; k < 3; ++k) sum[k] += r[k];
        for (const auto& c : cs)
            if (sgn(dot3(c, sum)) <= 0) return false;
        return true;
    }
};

// Exact reflection across the supporting line of segment (p, q).
inline AffineMap reflection_across(const Point& p, const Point& q) {
    Point d = q - p;
    Rational n2 = d.x * d.x + d.y * d.y;
    Rational a = (d.x * d.x - d.y * d.y) / n2;
    Rational b = 2 * d.x * d.y / n2;
    // M = [a b; b -a], fixes p: t = p - M p.
    Point mp{a * p.x + b * p.y, b * p.x - a * p.y};
    return AffineMap(a, b, b, -a, Point{p.x - mp.x, p.y - mp.y});
}

} // namespace unfold_detail

struct UnfoldingState {
    AffineMap isometry;    // original coords -> unfolded copy position
    int parity = 1;        // det sign: +1 even reflections, -1 odd
};

struct ItineraryCountOptions {
    std::size_t ray_cap = 24;      // rebuild the generating set past this size
    std::uint64_t node_budget = 50'000'000;  // DFS safety cap
};

// counts[k-1] = |P_k| for k = 1..n (number of positive-area itinerary cells).
inline std::vector<std::uint64_t> count_itinerary_cells(const BilliardTable& t, std::size_t n,
                                                        const ItineraryCountOptions& opts = {}) {
    using namespace unfold_detail;
    if (!t.convex())
        throw std::invalid_argument(
            "itinerary counting supports convex tables only (corridor visibility is automatic)");
    if (n < 1) throw std::invalid_argument("need n >= 1");

    const std::size_t m = t.side_count();
    std::vector<AffineMap> side_reflection;
    side_reflection.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Segment e = t.exact_side(i);
        side_reflection.push_back(reflection_across(e.a, e.b));
    }

    std::vector<std::uint64_t> counts(n, 0);
    std::uint64_t nodes = 0;

    struct Frame {
        UnfoldingState state;
        Cone cone;
    };

    // Depth-first over side sequences; constraints accumulate two per bounce.
    std::vector<IVec3> constraints;
    auto doorway_constraints = [&](const UnfoldingState& st, std::size_t side, bool entering,
                                   IVec3& c1, IVec3& c2) {
        Point A = st.isometry(t.exact_side(side).a);
        Point B = st.isometry(t.exact_side(side).b);
        if (st.parity < 0) std::swap(A, B);  // keep interior on the left
        if (entering) {
            c1 = point_constraint(A, true);
            c2 = point_constraint(B, false);
        } else {
            c1 = point_constraint(B, true);
            c2 = point_constraint(A, false);
        }
    };

    // Recursion via explicit lambda; depth = number of bounces so far.  The
    // ray representation requires a pointed cone, so the root cone is built
    // from the full four-constraint system of the first bounce.
    auto dfs = [&](auto&& self, const Frame& frame, std::size_t depth,
                   std::size_t prev_side) -> void {
        if (depth == n) return;
        for (std::size_t s = 0; s < m; ++s) {
            if (s == prev_side) continue;  // straight line cannot re-cross the same line
            if (++nodes > opts.node_budget)
                throw std::runtime_error("itinerary enumeration budget exceeded");
            IVec3 c1, c2;
            doorway_constraints(frame.state, s, false, c1, c2);
            constraints.push_back(c1);
            constraints.push_back(c2);
            Cone cone;
            if (depth == 0) {
                cone = Cone::from_constraints(constraints);
            } else {
                cone = frame.cone;
                cone.add_constraint(c1);
                if (!cone.trivial()) cone.add_constraint(c2);
                if (cone.rays.size() > opts.ray_cap) cone = Cone::from_constraints(constraints);
            }
            if (cone.full_dimensional(constraints)) {
                counts[depth] += 1;
                Frame child;
                child.state.isometry = frame.state.isometry.compose(side_reflection[s]);
                child.state.parity = -frame.state.parity;
                child.cone = std::move(cone);
                self(self, child, depth + 1, s);
            }
            constraints.pop_back();
            constraints.pop_back();
        }
    };

    for (std::size_t s0 = 0; s0 < m; ++s0) {
        Frame root;
        root.state = UnfoldingState{};  // identity, parity +1
        IVec3 c1, c2;
        doorway_constraints(root.state, s0, true, c1, c2);
        constraints = {c1, c2};
        dfs(dfs, root, 0, s0);
    }
    return counts;
}

inline std::uint64_t count_itinerary_cells_at(const BilliardTable& t, std::size_t n,
                                              const ItineraryCountOptions& opts = {}) {
    return count_itinerary_cells(t, n, opts).at(n - 1);
}

} // namespace gpe

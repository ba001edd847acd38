#pragma once

// Exact rational planar geometry: points, segments, invertible affine maps,
// convex polygons in canonical form, halfplane clipping, convex intersection,
// and exact/enclosed measurements.  All predicates are decided exactly.

#include "gpelab/rational.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <ostream>
#include <vector>

namespace gpe {

struct Point {
    Rational x, y;

    Point() : x(0), y(0) {}
    Point(Rational px, Rational py) : x(std::move(px)), y(std::move(py)) {}

    friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
    friend bool operator<(const Point& a, const Point& b) {
        int c = cmp(a.x, b.x);
        if (c != 0) return c < 0;
        return a.y < b.y;
    }
    friend Point operator+(const Point& a, const Point& b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }
};

inline Rational dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline Rational cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline Rational squared_distance(const Point& a, const Point& b) {
    Rational dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}
inline Interval distance_enclosure(const Point& a, const Point& b) {
    return sqrt_enclosure(squared_distance(a, b));
}

// Sign of the signed area of triangle (a,b,c): >0 ccw, <0 cw, 0 collinear.
inline int orient(const Point& a, const Point& b, const Point& c) {
    return sign(cross(b - a, c - a));
}

struct Segment {
    Point a, b;

    Segment(Point pa, Point pb) : a(std::move(pa)), b(std::move(pb)) {
        if (a == b) throw std::invalid_argument("degenerate segment");
    }
    Rational squared_length() const { return squared_distance(a, b); }
    Interval length() const { return distance_enclosure(a, b); }

    friend bool operator==(const Segment& s, const Segment& t) { return s.a == t.a && s.b == t.b; }
    friend bool operator<(const Segment& s, const Segment& t) {
        if (s.a != t.a) return s.a < t.a;
        return s.b < t.b;
    }
};

// Closed point-on-segment test.
inline bool segment_contains(const Segment& s, const Point& p) {
    if (orient(s.a, s.b, p) != 0) return false;
    return dot(p - s.a, s.b - s.a) >= 0 && dot(p - s.b, s.a - s.b) >= 0;
}

// ---------------------------------------------------------------------------
// Invertible affine map  x -> L x + t  with exact rational entries.

struct AffineMap {
    // Row-major linear part.
    std::array<Rational, 4> linear;  // [a b; c d]
    Point translation;

    AffineMap()
        : linear{Rational(1), Rational(0), Rational(0), Rational(1)}, translation() {}
    AffineMap(Rational a, Rational b, Rational c, Rational d, Point t)
        : linear{std::move(a), std::move(b), std::move(c), std::move(d)},
          translation(std::move(t)) {
        if (sign(det()) == 0) throw std::invalid_argument("singular affine map");
    }

    static AffineMap translate(Point t) {
        return AffineMap(Rational(1), Rational(0), Rational(0), Rational(1), std::move(t));
    }
    static AffineMap identity() { return AffineMap(); }

    Rational det() const { return linear[0] * linear[3] - linear[1] * linear[2]; }

    Point operator()(const Point& p) const {
        return {linear[0] * p.x + linear[1] * p.y + translation.x,
                linear[2] * p.x + linear[3] * p.y + translation.y};
    }

    AffineMap inverse() const {
        Rational d = det();
        Rational ia = linear[3] / d, ib = -linear[1] / d;
        Rational ic = -linear[2] / d, id = linear[0] / d;
        Point it{-(ia * translation.x + ib * translation.y),
                 -(ic * translation.x + id * translation.y)};
        return AffineMap(ia, ib, ic, id, it);
    }

    // this ∘ other  (apply other first).
    AffineMap compose(const AffineMap& other) const {
        return AffineMap(
            linear[0] * other.linear[0] + linear[1] * other.linear[2],
            linear[0] * other.linear[1] + linear[1] * other.linear[3],
            linear[2] * other.linear[0] + linear[3] * other.linear[2],
            linear[2] * other.linear[1] + linear[3] * other.linear[3],
            (*this)(other.translation));
    }

    // L^T L == I, i.e. the linear part is a rational rotation or reflection.
    bool orthogonal_linear() const {
        const auto& m = linear;
        return m[0] * m[0] + m[2] * m[2] == 1 && m[1] * m[1] + m[3] * m[3] == 1 &&
               m[0] * m[1] + m[2] * m[3] == 0;
    }

    std::size_t max_bit_length() const {
        std::size_t m = 0;
        for (const auto& e : linear) m = std::max(m, bit_length(e));
        m = std::max(m, bit_length(translation.x));
        m = std::max(m, bit_length(translation.y));
        return m;
    }

    friend bool operator==(const AffineMap& f, const AffineMap& g) {
        return f.linear == g.linear && f.translation == g.translation;
    }
};

// ---------------------------------------------------------------------------
// Convex polygon, canonical form: ccw, strictly convex vertex list (no three
// consecutive collinear), positive area, starting at the lexicographically
// smallest vertex.  Zero-area inputs canonicalize to "no polygon".

class ConvexPolygon {
  public:
    // Canonicalizes a convex ccw or cw vertex walk; returns nullopt for
    // degenerate (zero-area) input.  Throws if the walk is not convex.
    static std::optional<ConvexPolygon> make(std::vector<Point> vertices);

    // Axis-aligned rectangle [x0,x1] x [y0,y1].
    static ConvexPolygon rectangle(const Rational& x0, const Rational& y0, const Rational& x1,
                                   const Rational& y1);

    const std::vector<Point>& vertices() const { return verts_; }
    std::size_t size() const { return verts_.size(); }
    const Point& vertex(std::size_t i) const { return verts_[i % verts_.size()]; }

    Rational area() const;
    Interval perimeter() const;
    Interval diameter() const;
    std::vector<Segment> edges() const;

    // Strict interior / closed containment, both exact.
    bool contains_interior(const Point& p) const;
    bool contains(const Point& p) const;

    void bounding_box(Rational& xmin, Rational& ymin, Rational& xmax, Rational& ymax) const;
    std::size_t max_bit_length() const;

    friend bool operator==(const ConvexPolygon& p, const ConvexPolygon& q) {
        return p.verts_ == q.verts_;
    }
    friend bool operator!=(const ConvexPolygon& p, const ConvexPolygon& q) { return !(p == q); }

  private:
    ConvexPolygon() = default;
    std::vector<Point> verts_;
};

inline Rational polygon_signed_area2(const std::vector<Point>& v) {
    Rational s(0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        s += cross(a, b);
    }
    return s;
}

inline std::optional<ConvexPolygon> ConvexPolygon::make(std::vector<Point> vertices) {
    // Drop consecutive duplicates (closed walk).
    std::vector<Point> v;
    v.reserve(vertices.size());
    for (auto& p : vertices) {
        if (v.empty() || !(v.back() == p)) v.push_back(std::move(p));
    }
    while (v.size() > 1 && v.front() == v.back()) v.pop_back();
    if (v.size() < 3) return std::nullopt;

    Rational a2 = polygon_signed_area2(v);
    if (sign(a2) == 0) return std::nullopt;
    if (sign(a2) < 0) std::reverse(v.begin(), v.end());

    // Remove collinear middles until stable.
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        std::vector<Point> keep;
        keep.reserve(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point& prev = v[(i + v.size() - 1) % v.size()];
            const Point& cur = v[i];
            const Point& next = v[(i + 1) % v.size()];
            if (orient(prev, cur, next) == 0) {
                changed = true;
            } else {
                keep.push_back(cur);
            }
        }
        v.swap(keep);
    }
    if (v.size() < 3) return std::nullopt;

    for (std::size_t i = 0; i < v.size(); ++i) {
        if (orient(v[(i + v.size() - 1) % v.size()], v[i], v[(i + 1) % v.size()]) <= 0)
            throw std::invalid_argument("vertex walk is not convex");
    }

    std::size_t start = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[start]) start = i;
    }
    std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(start), v.end());

    ConvexPolygon poly;
    poly.verts_ = std::move(v);
    return poly;
}

inline ConvexPolygon ConvexPolygon::rectangle(const Rational& x0, const Rational& y0,
                                              const Rational& x1, const Rational& y1) {
    auto p = make({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    if (!p) throw std::invalid_argument("degenerate rectangle");
    return *p;
}

inline Rational ConvexPolygon::area() const { return polygon_signed_area2(verts_) / 2; }

inline Interval ConvexPolygon::perimeter() const {
    Interval total;
    for (std::size_t i = 0; i < verts_.size(); ++i)
        total += distance_enclosure(verts_[i], verts_[(i + 1) % verts_.size()]);
    return total;
}

inline Interval ConvexPolygon::diameter() const {
    // sqrt is monotone, so compare squared distances exactly and take one root.
    Rational best(0);
    for (std::size_t i = 0; i < verts_.size(); ++i)
        for (std::size_t j = i + 1; j < verts_.size(); ++j) {
            Rational d2 = squared_distance(verts_[i], verts_[j]);
            if (d2 > best) best = d2;
        }
    return sqrt_enclosure(best);
}

inline std::vector<Segment> ConvexPolygon::edges() const {
    std::vector<Segment> out;
    out.reserve(verts_.size());
    for (std::size_t i = 0; i < verts_.size(); ++i)
        out.emplace_back(verts_[i], verts_[(i + 1) % verts_.size()]);
    return out;
}

inline bool ConvexPolygon::contains_interior(const Point& p) const {
    for (std::size_t i = 0; i < verts_.size(); ++i)
        if (orient(verts_[i], verts_[(i + 1) % verts_.size()], p) <= 0) return false;
    return true;
}

inline bool ConvexPolygon::contains(const Point& p) const {
    for (std::size_t i = 0; i < verts_.size(); ++i)
        if (orient(verts_[i], verts_[(i + 1) % verts_.size()], p) < 0) return false;
    return true;
}

inline void ConvexPolygon::bounding_box(Rational& xmin, Rational& ymin, Rational& xmax,
                                        Rational& ymax) const {
    xmin = xmax = verts_[0].x;
    ymin = ymax = verts_[0].y;
    for (const Point& p : verts_) {
        if (p.x < xmin) xmin = p.x;
        if (p.x > xmax) xmax = p.x;
        if (p.y < ymin) ymin = p.y;
        if (p.y > ymax) ymax = p.y;
    }
}

inline std::size_t ConvexPolygon::max_bit_length() const {
    std::size_t m = 0;
    for (const Point& p : verts_) m = std::max({m, bit_length(p.x), bit_length(p.y)});
    return m;
}

// ---------------------------------------------------------------------------
// Kernel operations.

// {p : normal·p <= offset} ∩ poly, or nullopt when the intersection has zero
// area.  One Sutherland-Hodgman pass with exact edge/line intersections.
inline std::optional<ConvexPolygon> clip_halfplane(const ConvexPolygon& poly, const Point& normal,
                                                   const Rational& offset) {
    if (sign(normal.x) == 0 && sign(normal.y) == 0)
        throw std::invalid_argument("zero normal in halfplane");
    const auto& v = poly.vertices();
    std::vector<Point> out;
    out.reserve(v.size() + 2);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        Rational fa = dot(normal, a) - offset;
        Rational fb = dot(normal, b) - offset;
        int sa = sign(fa), sb = sign(fb);
        if (sa <= 0) out.push_back(a);
        if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
            Rational t = fa / (fa - fb);
            out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    return ConvexPolygon::make(std::move(out));
}

// Exact convex intersection; nullopt when interiors are disjoint.
inline std::optional<ConvexPolygon> intersect_convex(const ConvexPolygon& p,
                                                     const ConvexPolygon& q) {
    std::optional<ConvexPolygon> acc = p;
    const auto& v = q.vertices();
    for (std::size_t i = 0; i < v.size() && acc; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        // Interior of q is left of a->b: cross(b-a, x-a) >= 0, rewritten as
        // normal·x <= offset with normal = (dy, -dx).
        Point normal{b.y - a.y, a.x - b.x};
        acc = clip_halfplane(*acc, normal, dot(normal, a));
    }
    return acc;
}

// Image polygon, re-canonicalized (cw images from det<0 are reversed).
inline ConvexPolygon apply_affine(const AffineMap& m, const ConvexPolygon& poly) {
    std::vector<Point> img;
    img.reserve(poly.size());
    for (const Point& p : poly.vertices()) img.push_back(m(p));
    auto out = ConvexPolygon::make(std::move(img));
    if (!out) throw std::logic_error("affine image degenerated");
    return *out;
}

inline std::ostream& operator<<(std::ostream& os, const Point& p) {
    return os << "(" << rational_to_string(p.x) << ", " << rational_to_string(p.y) << ")";
}

inline std::ostream& operator<<(std::ostream& os, const ConvexPolygon& poly) {
    os << "[";
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (i) os << " ";
        os << poly.vertex(i);
    }
    return os << "]";
}

} // namespace gpe

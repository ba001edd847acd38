#pragma once

// Polygonal billiard ball map on the cross-section X = boundary x (0,pi),
// coordinates (arc length s, incidence angle theta from the forward tangent).
// Phase-map iteration is double precision with tracked error bounds and a
// vertex tolerance; exact arithmetic is reserved for the table data and the
// unfolding combinatorics (see unfolding.hpp).

#include "gpelab/geometry.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gpe {

class BilliardTable {
  public:
    struct Side {
        double ax, ay, bx, by;
        double len;
        double offset;          // arc length of the side's start vertex
        double tx, ty;          // unit tangent a->b
        double nx, ny;          // inward normal (left of tangent, ccw boundary)
    };

    static BilliardTable from_polygon(std::vector<Point> vertices);
    static BilliardTable unit_square() {
        return from_polygon({{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(1), rat(1)}, {rat(0), rat(1)}});
    }
    static BilliardTable right_triangle() {
        return from_polygon({{rat(0), rat(0)}, {rat(1), rat(0)}, {rat(0), rat(1)}});
    }

    const std::vector<Point>& vertices() const { return verts_; }
    std::size_t side_count() const { return sides_.size(); }
    const Side& side(std::size_t i) const { return sides_[i]; }
    const std::vector<Side>& sides() const { return sides_; }
    double perimeter_d() const { return total_len_; }
    const Interval& perimeter_exact() const { return total_len_exact_; }
    bool convex() const { return convex_; }
    double vertex_tolerance() const { return vertex_tol_; }
    void set_vertex_tolerance(double t) { vertex_tol_ = t; }

    // Exact side segment (original coordinates), side i from vertex i to i+1.
    Segment exact_side(std::size_t i) const {
        return Segment(verts_[i], verts_[(i + 1) % verts_.size()]);
    }

    std::size_t locate_side(double s) const {
        // s assumed in [0, L)
        std::size_t lo = 0, hi = sides_.size();
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (sides_[mid].offset <= s) lo = mid;
            else hi = mid;
        }
        return lo;
    }

    double wrap(double s) const {
        double r = std::fmod(s, total_len_);
        return r < 0 ? r + total_len_ : r;
    }

  private:
    std::vector<Point> verts_;
    std::vector<Side> sides_;
    double total_len_ = 0;
    Interval total_len_exact_;
    bool convex_ = true;
    double vertex_tol_ = 0;
};

inline BilliardTable BilliardTable::from_polygon(std::vector<Point> vertices) {
    // Drop straight-through collinear vertices; spikes stay and fail the
    // simplicity test below.
    std::vector<Point> v;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Point& prev = vertices[(i + vertices.size() - 1) % vertices.size()];
        const Point& cur = vertices[i];
        const Point& next = vertices[(i + 1) % vertices.size()];
        if (cur == prev) continue;
        if (orient(prev, cur, next) == 0 && sign(dot(cur - prev, next - cur)) > 0) continue;
        v.push_back(cur);
    }
    if (v.size() < 3) throw std::invalid_argument("table needs at least 3 vertices");
    Rational a2 = polygon_signed_area2(v);
    if (sign(a2) == 0) throw std::invalid_argument("degenerate table polygon");
    if (sign(a2) < 0) std::reverse(v.begin(), v.end());

    const std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j || (i + 1) % m == j || (j + 1) % m == i) continue;
            // Non-adjacent sides must be disjoint (exact test).
            Segment si(v[i], v[(i + 1) % m]);
            Segment sj(v[j], v[(j + 1) % m]);
            int o1 = orient(si.a, si.b, sj.a), o2 = orient(si.a, si.b, sj.b);
            int o3 = orient(sj.a, sj.b, si.a), o4 = orient(sj.a, sj.b, si.b);
            bool cross_proper = (o1 * o2 < 0) && (o3 * o4 < 0);
            bool touch = segment_contains(si, sj.a) || segment_contains(si, sj.b) ||
                         segment_contains(sj, si.a) || segment_contains(sj, si.b);
            if (cross_proper || touch)
                throw std::invalid_argument("table boundary is not simple");
        }

    BilliardTable t;
    t.verts_ = std::move(v);
    for (std::size_t i = 0; i < m; ++i) {
        const Point& pa = t.verts_[i];
        const Point& pb = t.verts_[(i + 1) % m];
        if (orient(t.verts_[(i + m - 1) % m], pa, pb) < 0) t.convex_ = false;
        Side s;
        s.ax = to_double(pa.x);
        s.ay = to_double(pa.y);
        s.bx = to_double(pb.x);
        s.by = to_double(pb.y);
        double dx = s.bx - s.ax, dy = s.by - s.ay;
        s.len = std::hypot(dx, dy);
        s.tx = dx / s.len;
        s.ty = dy / s.len;
        s.nx = -s.ty;
        s.ny = s.tx;
        t.sides_.push_back(s);
        t.total_len_exact_ += distance_enclosure(pa, pb);
    }
    double off = 0;
    for (auto& s : t.sides_) {
        s.offset = off;
        off += s.len;
    }
    t.total_len_ = off;
    t.vertex_tol_ = 1e-12 * off;
    return t;
}

// ---------------------------------------------------------------------------

struct PhasePoint {
    double s = 0;
    double theta = 0;
    double err_s = 0;      // tracked positional error bound (arc length units)
    double err_theta = 0;  // tracked angular error bound
};

inline PhasePoint reverse_phase(const PhasePoint& p) {
    return {p.s, M_PI - p.theta, p.err_s, p.err_theta};
}

struct Bounce {
    enum class Status { Ok, VertexHit };
    Status status = Status::Ok;
    PhasePoint next;
    std::size_t side = 0;       // side hit
    double path_length = 0;
};

inline Bounce billiard_map(const BilliardTable& t, const PhasePoint& p) {
    if (!(p.theta > 0) || !(p.theta < M_PI))
        throw std::invalid_argument("theta must lie strictly inside (0, pi)");
    double s = t.wrap(p.s);
    std::size_t i = t.locate_side(s);
    const auto& from = t.side(i);
    double u = (s - from.offset) / from.len;
    double fx = from.ax + u * (from.bx - from.ax);
    double fy = from.ay + u * (from.by - from.ay);
    double ct = std::cos(p.theta), st = std::sin(p.theta);
    double dx = from.tx * ct + from.nx * st;
    double dy = from.ty * ct + from.ny * st;

    const double t_eps = 1e-10 * t.perimeter_d();
    double best_t = -1;
    std::size_t best_j = 0;
    double best_w = 0;
    for (std::size_t j = 0; j < t.side_count(); ++j) {
        if (t.convex() && j == i) continue;
        const auto& sj = t.side(j);
        double ex = sj.bx - sj.ax, ey = sj.by - sj.ay;
        double denom = dx * ey - dy * ex;
        if (std::fabs(denom) < 1e-300) continue;
        double rx = sj.ax - fx, ry = sj.ay - fy;
        double tt = (rx * ey - ry * ex) / denom;
        double ww = (rx * dy - ry * dx) / denom;
        if (tt <= t_eps) continue;
        if (ww < -1e-12 || ww > 1 + 1e-12) continue;
        if (best_t < 0 || tt < best_t) {
            best_t = tt;
            best_j = j;
            best_w = ww;
        }
    }

    Bounce out;
    if (best_t < 0) {  // numerically grazing; treat as a singular hit
        out.status = Bounce::Status::VertexHit;
        return out;
    }
    const auto& to = t.side(best_j);
    out.side = best_j;
    out.path_length = best_t;

    // Error propagation: ds' = (sin(theta) ds + t dtheta)/sin(theta'),
    // dtheta' = dtheta for flat walls; add a machine-epsilon floor.
    double rdx = dx - 2 * (dx * to.nx + dy * to.ny) * to.nx;
    double rdy = dy - 2 * (dx * to.nx + dy * to.ny) * to.ny;
    double theta2 = std::atan2(rdx * to.nx + rdy * to.ny, rdx * to.tx + rdy * to.ty);
    double st2 = std::sin(theta2);
    const double meps = 2.2e-16;
    double err_s_next =
        (st * p.err_s + best_t * p.err_theta) / std::max(st2, 1e-12) + 32 * meps * t.perimeter_d();
    double err_theta_next = p.err_theta + 16 * meps;

    double hit_dist_a = best_w * to.len;
    double hit_dist_b = (1 - best_w) * to.len;
    double effective_tol = t.vertex_tolerance() + err_s_next;
    if (hit_dist_a < effective_tol || hit_dist_b < effective_tol || theta2 <= 0 ||
        theta2 >= M_PI) {
        out.status = Bounce::Status::VertexHit;
        return out;
    }
    out.next = PhasePoint{to.offset + best_w * to.len, theta2, err_s_next, err_theta_next};
    return out;
}

// Backward map via the time-reversal involution (s,theta) -> (s, pi-theta).
inline Bounce billiard_map_backward(const BilliardTable& t, const PhasePoint& p) {
    Bounce b = billiard_map(t, reverse_phase(p));
    if (b.status == Bounce::Status::Ok) b.next = reverse_phase(b.next);
    return b;
}

// ---------------------------------------------------------------------------
// Finsler length |dm| = |ds| sin(theta) + |dtheta|, trapezoidal in sin(theta).

inline double finsler_length(const std::vector<PhasePoint>& polyline) {
    double total = 0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        double ds = std::fabs(polyline[i].s - polyline[i - 1].s);
        double dth = std::fabs(polyline[i].theta - polyline[i - 1].theta);
        total += ds * (std::sin(polyline[i - 1].theta) + std::sin(polyline[i].theta)) / 2 + dth;
    }
    return total;
}

inline double finsler_gap(const PhasePoint& a, const PhasePoint& b) {
    double ds = std::fabs(a.s - b.s);
    double dth = std::fabs(a.theta - b.theta);
    return ds * (std::sin(a.theta) + std::sin(b.theta)) / 2 + dth;
}

// ---------------------------------------------------------------------------
// First-return singularity partition: for each side, the curves of phase
// points aimed at a visible vertex; the atoms are the bands between curves,
// labeled by the side hit first.

struct VertexCurve {
    std::size_t side = 0;
    std::size_t vertex = 0;              // aimed-at vertex index
    std::vector<PhasePoint> samples;     // (s, theta_v(s)), increasing s
};

struct FirstReturnPartition {
    std::vector<VertexCurve> curves;
    std::size_t atom_count = 0;            // m(m-1) for convex tables
    std::vector<std::size_t> bands_per_side;
};

// Aim angle from footpoint (side i at parameter u) toward vertex v.
inline double aim_angle(const BilliardTable& t, std::size_t i, double u, std::size_t v) {
    const auto& sd = t.side(i);
    double fx = sd.ax + u * (sd.bx - sd.ax);
    double fy = sd.ay + u * (sd.by - sd.ay);
    double wx = to_double(t.vertices()[v].x) - fx;
    double wy = to_double(t.vertices()[v].y) - fy;
    return std::atan2(wx * sd.nx + wy * sd.ny, wx * sd.tx + wy * sd.ty);
}

inline FirstReturnPartition first_return_partition(const BilliardTable& t,
                                                   std::size_t samples_per_curve = 65) {
    if (!t.convex())
        throw std::invalid_argument("first-return curve list requires a convex table");
    FirstReturnPartition out;
    const std::size_t m = t.side_count();
    const double u_eps = 1e-9;
    for (std::size_t i = 0; i < m; ++i) {
        // Non-endpoint vertices in ccw order seen from side i.
        for (std::size_t k = 2; k < m; ++k) {
            std::size_t v = (i + k) % m;
            VertexCurve curve;
            curve.side = i;
            curve.vertex = v;
            for (std::size_t j = 0; j < samples_per_curve; ++j) {
                double u = static_cast<double>(j) / static_cast<double>(samples_per_curve - 1);
                u = std::min(std::max(u, u_eps), 1 - u_eps);
                double theta = aim_angle(t, i, u, v);
                curve.samples.push_back(
                    {t.side(i).offset + u * t.side(i).len, theta, 0, 0});
            }
            out.curves.push_back(std::move(curve));
        }
        out.bands_per_side.push_back(m - 1);
    }
    out.atom_count = m * (m - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Singular set of T^n: generations k = 0..n-1 of backward images of the
// first-return curves, adaptively split where the backward itinerary changes.

struct SingularCurvePiece {
    std::size_t generation = 0;
    std::size_t side = 0;    // base curve's side
    std::size_t vertex = 0;  // base curve's aimed vertex
    std::vector<PhasePoint> samples;
};

struct SingularSetOptions {
    std::size_t base_samples = 33;
    std::size_t max_nodes_per_curve = 4096;
    double gap_tolerance = 0.05;  // Finsler gap between adjacent samples
    double u_tolerance = 1e-7;    // parameter resolution near splits
    bool forward = false;         // iterate forward instead of backward
};

struct SingularSetResult {
    std::vector<SingularCurvePiece> pieces;
    std::vector<double> per_generation;  // k = 0..n-1
    std::vector<double> cumulative;      // level n = sum of generations < n
    bool lower_bound_flag = false;       // refinement budget was exhausted
    std::size_t unresolved_gaps = 0;
};

namespace detail {

struct CurveNode {
    double u;
    bool alive = false;
    std::vector<std::uint16_t> labels;
    PhasePoint image;
};

inline CurveNode eval_curve_node(const BilliardTable& t, std::size_t side, std::size_t vertex,
                                 double u, std::size_t generation, bool forward) {
    CurveNode node;
    node.u = u;
    double theta = aim_angle(t, side, u, vertex);
    PhasePoint p{t.side(side).offset + u * t.side(side).len, theta, 0, 0};
    if (forward) p = reverse_phase(p);  // outgoing copies of the vertex curves
    for (std::size_t k = 0; k < generation; ++k) {
        Bounce b = forward ? billiard_map(t, p) : billiard_map_backward(t, p);
        if (b.status != Bounce::Status::Ok) return node;  // dead
        node.labels.push_back(static_cast<std::uint16_t>(b.side));
        p = b.next;
    }
    node.alive = true;
    node.image = p;
    return node;
}

} // namespace detail

inline SingularSetResult singular_set(const BilliardTable& t, std::size_t n,
                                      const SingularSetOptions& opts = {}) {
    if (n < 1) throw std::invalid_argument("singular_set needs n >= 1");
    FirstReturnPartition base = first_return_partition(t, 5);
    SingularSetResult out;
    out.per_generation.assign(n, 0.0);

    for (std::size_t gen = 0; gen < n; ++gen) {
        for (const VertexCurve& curve : base.curves) {
            std::vector<detail::CurveNode> nodes;
            const double u_eps = 1e-9;
            for (std::size_t j = 0; j < opts.base_samples; ++j) {
                double u = static_cast<double>(j) / static_cast<double>(opts.base_samples - 1);
                u = std::min(std::max(u, u_eps), 1 - u_eps);
                nodes.push_back(
                    detail::eval_curve_node(t, curve.side, curve.vertex, u, gen, opts.forward));
            }
            // Bisect until adjacent alive nodes agree on itinerary and are
            // close in the Finsler metric; budget exhaustion leaves a gap.
            bool budget_hit = false;
            for (std::size_t idx = 0; idx + 1 < nodes.size();) {
                const auto& a = nodes[idx];
                const auto& b = nodes[idx + 1];
                bool needs_split = false;
                if (b.u - a.u > opts.u_tolerance) {
                    if (a.alive != b.alive) needs_split = true;
                    else if (a.alive && b.alive) {
                        if (a.labels != b.labels) needs_split = true;
                        else if (finsler_gap(a.image, b.image) > opts.gap_tolerance)
                            needs_split = true;
                    }
                }
                if (!needs_split) {
                    ++idx;
                    continue;
                }
                if (nodes.size() >= opts.max_nodes_per_curve) {
                    budget_hit = true;
                    break;
                }
                double mid = (a.u + b.u) / 2;
                nodes.insert(nodes.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                             detail::eval_curve_node(t, curve.side, curve.vertex, mid, gen,
                                                     opts.forward));
            }

            // Emit maximal alive runs with identical itineraries.
            std::size_t run_start = 0;
            while (run_start < nodes.size()) {
                if (!nodes[run_start].alive) {
                    ++run_start;
                    continue;
                }
                std::size_t run_end = run_start;
                while (run_end + 1 < nodes.size() && nodes[run_end + 1].alive &&
                       nodes[run_end + 1].labels == nodes[run_start].labels)
                    ++run_end;
                if (run_end > run_start) {
                    SingularCurvePiece piece;
                    piece.generation = gen;
                    piece.side = curve.side;
                    piece.vertex = curve.vertex;
                    for (std::size_t q = run_start; q <= run_end; ++q)
                        piece.samples.push_back(nodes[q].image);
                    out.per_generation[gen] += finsler_length(piece.samples);
                    out.pieces.push_back(std::move(piece));
                }
                run_start = run_end + 1;
            }
            if (budget_hit) {
                out.lower_bound_flag = true;
                ++out.unresolved_gaps;
            }
        }
    }
    out.cumulative.resize(n);
    double acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += out.per_generation[k];
        out.cumulative[k] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Table file I/O:  "table 1", "vertices <m>", m lines "x y" (exact rationals).

inline BilliardTable parse_table(std::istream& in) {
    std::string tok;
    auto next = [&in, &tok](const char* what) -> std::string& {
        if (!(in >> tok)) throw std::runtime_error(std::string("table file ends before ") + what);
        return tok;
    };
    if (next("header") != "table") throw std::runtime_error("not a table file");
    if (next("version") != "1") throw std::runtime_error("unsupported table format version");
    if (next("vertices keyword") != "vertices") throw std::runtime_error("expected 'vertices'");
    std::size_t m = std::stoul(next("vertex count"));
    std::vector<Point> verts;
    for (std::size_t i = 0; i < m; ++i) {
        Rational x = parse_rational(next("vertex x"));
        Rational y = parse_rational(next("vertex y"));
        verts.emplace_back(std::move(x), std::move(y));
    }
    return BilliardTable::from_polygon(std::move(verts));
}

inline BilliardTable parse_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table file: " + path);
    return parse_table(in);
}

inline void print_table(std::ostream& os, const BilliardTable& t) {
    os << "table 1\n";
    os << "vertices " << t.vertices().size() << "\n";
    for (const Point& p : t.vertices())
        os << rational_to_string(p.x) << " " << rational_to_string(p.y) << "\n";
}

} // namespace gpe

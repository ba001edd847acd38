#pragma once

// Relative-entropy estimation, Lyapunov exponents along exact orbits, and
// empirical checkers for the h <= theta and sup-lambda bounds.  All finite-N
// estimates are labeled as such; the uniformity check over regular points is
// evidence from a sample, never a verification.

#include "gpelab/growth.hpp"
#include "gpelab/join.hpp"

#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace gpe {

inline constexpr const char* kFinslerNormChoice = "euclidean-operator";

// ---------------------------------------------------------------------------
// Lyapunov exponents.  DT^k along a regular orbit is the product of the
// piece-map linear parts; the norm is the Euclidean operator norm (our fixed
// Finsler choice, recorded in every report).

struct Matrix2 {
    Rational a, b, c, d;  // [a b; c d]

    static Matrix2 identity() { return {Rational(1), Rational(0), Rational(0), Rational(1)}; }
    static Matrix2 of(const AffineMap& m) {
        return {m.linear[0], m.linear[1], m.linear[2], m.linear[3]};
    }
    Matrix2 mul(const Matrix2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    bool gram_is_identity() const {
        return a * a + c * c == 1 && b * b + d * d == 1 && a * b + c * d == 0;
    }
};

// log of the Euclidean operator norm, exact zero for orthogonal matrices and
// overflow-safe for entries of any bit length.
inline double log_operator_norm(const Matrix2& m) {
    if (m.gram_is_identity()) return 0.0;
    Rational S = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;  // tr(M^T M)
    Rational det = m.a * m.d - m.b * m.c;
    Rational D = det * det;                                      // det(M^T M)
    // mu_max = (S/2)(1 + sqrt(1 - 4D/S^2)); r = 4D/S^2 is in [0,1].
    double r = to_double(Rational(4 * D / (S * S)));
    if (r > 1) r = 1;
    double mu_factor = (1.0 + std::sqrt(1.0 - r)) / 2.0;
    return 0.5 * (log_rational(S) + std::log(mu_factor));
}

// lambda_k(x)/k for k = 1..n; throws if the orbit hits the boundary first.
inline std::vector<double> lyapunov(const GpeSystem& g, const Point& x, std::size_t n) {
    OrbitResult orbit = evaluate(g, x, n);
    if (!orbit.regular())
        throw std::domain_error("point is singular at step " +
                                std::to_string(*orbit.singular_step));
    std::vector<double> normalized;
    normalized.reserve(n);
    Matrix2 product = Matrix2::identity();
    for (std::size_t k = 0; k < n; ++k) {
        product = Matrix2::of(g.piece_maps()[orbit.itinerary[k]]).mul(product);
        normalized.push_back(log_operator_norm(product) / static_cast<double>(k + 1));
    }
    return normalized;
}

// Deterministic regular-point sample: grid points (2i+1)/(2m) of the space
// bounding box, visited in a seeded shuffle order, singular hits discarded.
inline std::vector<Point> draw_regular_samples(const GpeSystem& g, std::size_t count,
                                               std::size_t depth, std::uint64_t seed,
                                               std::size_t grid = 64) {
    Rational xmin, ymin, xmax, ymax;
    g.space().bounding_box(xmin, ymin, xmax, ymax);
    std::vector<std::size_t> order(grid * grid);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Point> sample;
    Rational w = xmax - xmin, h = ymax - ymin;
    for (std::size_t idx : order) {
        if (sample.size() >= count) break;
        std::size_t i = idx % grid, j = idx / grid;
        Point p{xmin + Rational(2 * static_cast<long>(i) + 1) * w / Rational(2 * static_cast<long>(grid)),
                ymin + Rational(2 * static_cast<long>(j) + 1) * h / Rational(2 * static_cast<long>(grid))};
        if (!g.space().contains(p)) continue;
        OrbitResult orbit = evaluate(g, p, depth);
        if (orbit.regular()) sample.push_back(std::move(p));
    }
    return sample;
}

// ---------------------------------------------------------------------------

// h(T,R) proxy from the atom-count series of the join sequence.
struct EntropyEstimate {
    GrowthEstimate estimate;
    std::vector<double> series;   // |R_n| as doubles
    std::optional<CapHit> cap;
};

inline EntropyEstimate relative_entropy(const GpeSystem& g, std::size_t max_level,
                                        double window = 0.25, JoinOptions opts = {}) {
    opts.with_skeleton = false;
    JoinRun run = join_sequence(g, max_level, opts);
    EntropyEstimate out;
    out.cap = run.cap;
    for (const auto& level : run.levels)
        out.series.push_back(static_cast<double>(level.stats.atom_count));
    out.estimate = growth_rate({out.series, window});
    return out;
}

// ---------------------------------------------------------------------------

struct BoundReport {
    std::string system_name;
    std::size_t levels = 0;
    double window = 0.25;
    double tolerance = 1e-6;

    GrowthEstimate h;            // from |R_n|
    GrowthEstimate theta;        // from skeleton lengths l(R_n)
    GrowthEstimate b_growth;     // from multiplicities b(R_n)
    std::uint64_t b_max = 0;

    double lyapunov_sup = 0;     // sup over sample of lambda_N/N
    std::size_t sample_size = 0;
    std::size_t uniformity_N = 0;         // smallest N' with lambda_n/n <= theta+tol beyond it
    bool uniformity_within_horizon = false;

    double margin_h_le_theta = 0;         // theta_tail - h_tail
    bool bound_violated = false;          // hard failure: would indicate a bug
    bool b_growth_le_theta = true;

    bool cells_convex = true;             // convex by construction; recorded, not tested
    double last_max_diameter = 0;
    bool diameters_decreasing = false;    // generating-partition evidence
    std::optional<CapHit> cap;

    std::vector<double> count_series, skeleton_series, b_series;
};

inline BoundReport check_bounds(const GpeSystem& g, std::size_t max_level,
                                const std::vector<Point>& sample, double window = 0.25,
                                double tolerance = 1e-6, JoinOptions opts = {}) {
    if (sample.empty()) throw std::invalid_argument("empty regular-point sample");
    opts.with_skeleton = true;
    JoinRun run = join_sequence(g, max_level, opts);
    if (run.levels.size() < 4)
        throw std::runtime_error("too few completed join levels for bound checking: " +
                                 std::string(run.cap ? run.cap->describe() : "N too small"));

    BoundReport report;
    report.levels = run.levels.size();
    report.window = window;
    report.tolerance = tolerance;
    report.cap = run.cap;

    std::vector<double> diam;
    for (const auto& level : run.levels) {
        report.count_series.push_back(static_cast<double>(level.stats.atom_count));
        report.skeleton_series.push_back(level.stats.skeleton_length.mid_d());
        report.b_series.push_back(static_cast<double>(level.stats.multiplicity));
        report.b_max = std::max(report.b_max, level.stats.multiplicity);
        diam.push_back(level.stats.max_diameter.mid_d());
    }
    report.h = growth_rate({report.count_series, window});
    report.theta = growth_rate({report.skeleton_series, window});
    report.b_growth = growth_rate({report.b_series, window});

    const std::size_t horizon = run.levels.size();
    double sup = 0;
    std::size_t uniform_from = 1;
    for (const Point& x : sample) {
        std::vector<double> lam = lyapunov(g, x, horizon);
        sup = std::max(sup, lam.back());
        for (std::size_t k = lam.size(); k-- > 0;) {
            if (lam[k] > report.theta.theta_tail + tolerance) {
                uniform_from = std::max(uniform_from, k + 2);
                break;
            }
        }
    }
    report.lyapunov_sup = sup;
    report.sample_size = sample.size();
    report.uniformity_N = uniform_from;
    report.uniformity_within_horizon = uniform_from <= horizon;

    double slack = tolerance + 3 * (report.h.slope_residual + report.theta.slope_residual);
    report.margin_h_le_theta = report.theta.theta_tail - report.h.theta_tail;
    report.bound_violated = report.margin_h_le_theta < -slack;
    report.b_growth_le_theta =
        report.b_growth.theta_tail <= report.theta.theta_tail + slack;

    report.last_max_diameter = diam.back();
    report.diameters_decreasing = true;
    for (std::size_t i = 1; i < diam.size(); ++i)
        if (diam[i] > diam[i - 1] + 1e-15) report.diameters_decreasing = false;
    return report;
}

// Flat key-value block; keys are stable and documented in the README.
inline std::string bound_report_text(const BoundReport& r) {
    std::ostringstream os;
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    os << "system " << r.system_name << "\n";
    os << "levels " << r.levels << "\n";
    os << "window " << num(r.window) << "\n";
    os << "tolerance " << num(r.tolerance) << "\n";
    os << "finsler_norm " << kFinslerNormChoice << "\n";
    os << "h_tail " << num(r.h.theta_tail) << "\n";
    os << "h_slope " << num(r.h.theta_slope) << "\n";
    os << "h_subexponential " << (r.h.subexponential ? 1 : 0) << "\n";
    os << "theta_tail " << num(r.theta.theta_tail) << "\n";
    os << "theta_slope " << num(r.theta.theta_slope) << "\n";
    os << "theta_subexponential " << (r.theta.subexponential ? 1 : 0) << "\n";
    os << "b_max " << r.b_max << "\n";
    os << "b_growth_tail " << num(r.b_growth.theta_tail) << "\n";
    os << "lyapunov_sup " << num(r.lyapunov_sup) << "\n";
    os << "sample_size " << r.sample_size << "\n";
    os << "margin_h_le_theta " << num(r.margin_h_le_theta) << "\n";
    os << "bound_violated " << (r.bound_violated ? 1 : 0) << "\n";
    os << "thm4_b_growth_le_theta " << (r.b_growth_le_theta ? 1 : 0) << "\n";
    os << "thm6_uniformity_evidence_N " << r.uniformity_N << "\n";
    os << "thm6_uniformity_within_horizon " << (r.uniformity_within_horizon ? 1 : 0) << "\n";
    os << "cells_convex " << (r.cells_convex ? 1 : 0) << "\n";
    os << "last_max_diameter " << num(r.last_max_diameter) << "\n";
    os << "generating_evidence " << (r.diameters_decreasing ? 1 : 0) << "\n";
    os << "cap_hit " << (r.cap ? r.cap->describe() : std::string("none")) << "\n";
    return os.str();
}

// Same content as CSV key,value rows.
inline std::string bound_report_csv(const BoundReport& r) {
    std::string text = bound_report_text(r);
    std::string out = "key,value\n";
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto space = line.find(' ');
        out += line.substr(0, space) + "," + line.substr(space + 1) + "\n";
    }
    return out;
}

} // namespace gpe

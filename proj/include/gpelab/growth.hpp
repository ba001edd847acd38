#pragma once

// Growth-rate estimation for positive sequences.  The limsup log(a_n)/n of
// the definitions cannot be computed from finite data, so two estimators are
// always reported together: the tail maximum of log(a_n)/n (the reported
// proxy) and the least-squares slope of log a_n over the tail (cross-check),
// plus a polynomial-model comparison used to flag subexponential series.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gpe {

struct GrowthSeries {
    std::vector<double> values;   // a_1..a_N, all > 0
    double window = 0.25;         // tail fraction used for estimation

    std::size_t size() const { return values.size(); }
};

struct GrowthEstimate {
    double theta_tail = 0;      // max over tail of log(a_n)/n
    double theta_slope = 0;     // least-squares slope of log a_n vs n over tail
    double slope_residual = 0;  // RMS residual of the exponential model
    double poly_degree = 0;     // least-squares slope of log a_n vs log n
    double poly_residual = 0;   // RMS residual of the polynomial model
    bool subexponential = false;
    bool monotone = true;
    std::size_t tail_start = 1;  // first n in the window (1-based)
};

namespace detail {

struct LineFit {
    double slope = 0, intercept = 0, rms = 0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    LineFit fit;
    if (denom == 0) {
        fit.slope = 0;
        fit.intercept = sy / static_cast<double>(n);
    } else {
        fit.slope = (n * sxy - sx * sy) / denom;
        fit.intercept = (sy - fit.slope * sx) / static_cast<double>(n);
    }
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

} // namespace detail

inline GrowthEstimate growth_rate(const GrowthSeries& s) {
    const std::size_t n = s.size();
    if (n < 4) throw std::invalid_argument("series too short for growth estimation");
    for (double v : s.values)
        if (!(v > 0)) throw std::invalid_argument("growth series values must be positive");
    if (!(s.window > 0) || s.window > 1) throw std::invalid_argument("window must be in (0,1]");

    std::size_t tail = static_cast<std::size_t>(std::ceil(s.window * static_cast<double>(n)));
    tail = std::max<std::size_t>(3, std::min(tail, n));
    const std::size_t start = n - tail;  // 0-based index of first tail element

    GrowthEstimate est;
    est.tail_start = start + 1;
    std::vector<double> ns, logns, logs;
    for (std::size_t i = start; i < n; ++i) {
        double nn = static_cast<double>(i + 1);
        double la = std::log(s.values[i]);
        est.theta_tail = std::max(i == start ? -1e300 : est.theta_tail, la / nn);
        ns.push_back(nn);
        logns.push_back(std::log(nn));
        logs.push_back(la);
    }
    auto exp_fit = detail::fit_line(ns, logs);
    auto poly_fit = detail::fit_line(logns, logs);
    est.theta_slope = exp_fit.slope;
    est.slope_residual = exp_fit.rms;
    est.poly_degree = poly_fit.slope;
    est.poly_residual = poly_fit.rms;
    est.subexponential = poly_fit.rms <= exp_fit.rms + 1e-12;
    for (std::size_t i = 1; i < n; ++i)
        if (s.values[i] < s.values[i - 1]) est.monotone = false;
    return est;
}

} // namespace gpe

#pragma once

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace nomasec {

struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

namespace quad_detail {

// Gauss 7 / Kronrod 15 abscissae and weights (positive half, QUADPACK values).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gk15(F& f, double a, double b)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_mid = f(mid);
    double k15 = kWgk[7] * f_mid;
    double g7 = kWg[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double s = f(mid + dx) + f(mid - dx);
        k15 += kWgk[i] * s;
        if (i % 2 == 1)
            g7 += kWg[i / 2] * s;
    }
    k15 *= half;
    g7 *= half;
    return {k15, std::fabs(k15 - g7)};
}

struct Segment {
    double a, b, value, err;
};

} // namespace quad_detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b]: the segment
// with the largest error estimate is bisected until
//   sum(err) <= max(abs_tol, rel_tol * |sum(value)|).
// Throws ConvergenceError when the segment budget runs out first.
// Fully deterministic: refinement order depends only on (err, a) comparisons.
template <class F>
double integrate(F&& f, double a, double b, const QuadOptions& opt = {})
{
    if (!(b > a))
        return 0.0;

    std::vector<quad_detail::Segment> segs;
    segs.reserve(64);
    // Seed with a handful of panels so boundary layers are visible to the
    // error estimator from the start.
    constexpr int kSeedPanels = 8;
    double value = 0.0;
    double err = 0.0;
    for (int i = 0; i < kSeedPanels; ++i) {
        const double sa = a + (b - a) * i / kSeedPanels;
        const double sb = a + (b - a) * (i + 1) / kSeedPanels;
        auto [v, e] = quad_detail::gk15(f, sa, sb);
        segs.push_back({sa, sb, v, e});
        value += v;
        err += e;
    }

    auto worse = [](const quad_detail::Segment& lhs, const quad_detail::Segment& rhs) {
        if (lhs.err != rhs.err)
            return lhs.err < rhs.err;
        return lhs.a > rhs.a; // deterministic tie break
    };

    while (err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(value))) {
        if (static_cast<int>(segs.size()) >= opt.max_intervals)
            throw ConvergenceError("adaptive quadrature: interval budget exhausted (err=" +
                                   std::to_string(err) + ", value=" + std::to_string(value) + ")");
        auto it = std::max_element(segs.begin(), segs.end(), worse);
        const quad_detail::Segment s = *it;
        const double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b))
            break; // interval at floating-point resolution; accept estimate
        auto [vl, el] = quad_detail::gk15(f, s.a, m);
        auto [vr, er] = quad_detail::gk15(f, m, s.b);
        value += vl + vr - s.value;
        err += el + er - s.err;
        *it = {s.a, m, vl, el};
        segs.push_back({m, s.b, vr, er});
    }

    // Re-accumulate in segment order to shed the incremental-update noise.
    std::sort(segs.begin(), segs.end(),
              [](const auto& l, const auto& r) { return l.a < r.a; });
    double total = 0.0;
    for (const auto& s : segs)
        total += s.value;
    return total;
}

} // namespace nomasec

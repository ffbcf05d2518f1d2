#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "searcheq/errors.hpp"

namespace searcheq::numerics {

struct RootOptions {
    double x_tol = 1e-12;
    int max_iter = 300;
};

// Bracketed bisection/secant hybrid. Requires f(lo) and f(hi) of opposite
// sign (or one of them zero). Secant steps use the Illinois rule on the
// bracket ends; a bisection step is forced whenever two consecutive steps
// failed to halve the bracket, so convergence is never slower than bisection.
template <class F>
double find_root(F&& f, double lo, double hi, RootOptions opt = {}) {
    if (!(lo <= hi)) {
        throw SolveFailure("find_root: invalid bracket");
    }
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0) == (fhi > 0)) {
        throw SolveFailure("find_root: root not bracketed on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    }
    double glo = flo; // Illinois-scaled end values
    double ghi = fhi;
    int last_side = 0;
    double width_before = hi - lo;
    int slow_steps = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        double width = hi - lo;
        double scale = std::max(std::abs(lo), std::abs(hi));
        if (width <= opt.x_tol || width <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
            break;
        }
        double x = lo - glo * (hi - lo) / (ghi - glo);
        if (slow_steps >= 2 || !(x > lo && x < hi)) {
            x = 0.5 * (lo + hi);
            slow_steps = 0;
        }
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = glo = fx;
            if (last_side == -1) ghi *= 0.5;
            last_side = -1;
        } else {
            hi = x;
            fhi = ghi = fx;
            if (last_side == 1) glo *= 0.5;
            last_side = 1;
        }
        double new_width = hi - lo;
        slow_steps = new_width > 0.5 * width_before ? slow_steps + 1 : 0;
        width_before = new_width;
    }
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

// Pure bisection on [lo, hi] to the given argument tolerance.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol, int max_iter = 200) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_depth = 60;
};

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    // Past round-off level the error estimate is noise; refining further
    // cannot meet a tolerance that keeps halving.
    double noise = 1e-14 * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, noise) || !(lm > a && rm < b)) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson with Richardson correction.
template <class F>
double integrate_adaptive(F&& f, double a, double b, QuadratureOptions opt = {}) {
    if (a == b) return 0.0;
    if (a > b) return -integrate_adaptive(f, b, a, opt);
    double m = 0.5 * (a + b);
    double fa = f(a);
    double fb = f(b);
    double fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, opt.abs_tol, opt.max_depth);
}

// Adaptive Simpson with the interval split at b - split_fraction * (b - a).
// Used for integrands with an infinite slope at the upper limit.
template <class F>
double integrate_adaptive_split_upper(F&& f, double a, double b, double split_fraction = 1e-8,
                                      QuadratureOptions opt = {}) {
    if (a == b) return 0.0;
    double c = b - split_fraction * (b - a);
    QuadratureOptions half = opt;
    half.abs_tol = 0.5 * opt.abs_tol;
    return integrate_adaptive(f, a, c, half) + integrate_adaptive(f, c, b, half);
}

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 10> kGaussNodes = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
    -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
    0.8650633666889845,  0.9739065285171717};
inline constexpr std::array<double, 10> kGaussWeights = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
    0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
    0.1494513491505806, 0.0666713443086881};

template <class F>
double gauss_panel(F& f, double a, double b) {
    double half = 0.5 * (b - a);
    double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
        sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
    }
    return half * sum;
}

// Composite 10-point Gauss-Legendre on equal panels.
template <class F>
double integrate_gauss(F&& f, double a, double b, int panels = 64) {
    double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        sum += gauss_panel(f, a + i * h, a + (i + 1) * h);
    }
    return sum;
}

// Composite Gauss-Legendre on panels graded geometrically toward both ends
// (ratio 1/2, `levels` halvings each side), with `inner` equal panels in the
// middle. Handles integrable endpoint singularities in f and its derivatives.
template <class F>
double integrate_gauss_graded(F&& f, double a, double b, int inner = 32, int levels = 56) {
    if (a == b) return 0.0;
    double w = b - a;
    double edge = 0.125 * w;
    double sum = integrate_gauss(f, a + edge, b - edge, inner);
    double len = edge;
    for (int k = 0; k < levels; ++k) {
        double next = 0.5 * len;
        sum += gauss_panel(f, a + next, a + len);
        sum += gauss_panel(f, b - len, b - next);
        len = next;
    }
    sum += gauss_panel(f, a, a + len);
    sum += gauss_panel(f, b - len, b);
    return sum;
}

} // namespace searcheq::numerics

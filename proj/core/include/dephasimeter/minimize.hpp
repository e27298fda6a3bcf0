// minimize.hpp — golden-section line search with a coarse bracketing scan

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace dephasimeter {

struct MinResult {
    double x = 0.0;
    double f = 0.0;
    bool at_lower = false;  // optimum pinned to the bracket edge
    bool at_upper = false;
};

// Scans [lo, hi] on `coarse` points (log-spaced when log_axis), brackets the
// best sample, then refines with golden-section to relative tolerance rel_tol
// in x. Unimodality is assumed inside the bracketed triple.
inline MinResult golden_min(const std::function<double(double)>& f, double lo, double hi,
                            double rel_tol = 1e-7, int coarse = 64, bool log_axis = false) {
    if (!(hi > lo)) throw std::invalid_argument("golden_min requires hi > lo");
    const auto coord = [&](int i) {
        const double w = static_cast<double>(i) / (coarse - 1);
        return log_axis ? lo * std::pow(hi / lo, w) : lo + (hi - lo) * w;
    };
    int best = 0;
    double best_f = f(coord(0));
    for (int i = 1; i < coarse; ++i) {
        const double fi = f(coord(i));
        if (fi < best_f) {
            best_f = fi;
            best = i;
        }
    }
    double a = coord(best > 0 ? best - 1 : 0);
    double b = coord(best < coarse - 1 ? best + 1 : coarse - 1);
    if (log_axis) {
        a = std::log(a);
        b = std::log(b);
    }
    const auto eval = [&](double x) { return f(log_axis ? std::exp(x) : x); };
    const double gr = 0.61803398874989484820458683436564;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    const double scale = std::max(std::abs(a), std::abs(b)) + 1e-300;
    while (std::abs(b - a) > rel_tol * scale) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = eval(x2);
        }
    }
    MinResult out;
    const double xm = 0.5 * (a + b);
    out.x = log_axis ? std::exp(xm) : xm;
    out.f = eval(xm);
    out.at_lower = best == 0;
    out.at_upper = best == coarse - 1;
    return out;
}

}  // namespace dephasimeter

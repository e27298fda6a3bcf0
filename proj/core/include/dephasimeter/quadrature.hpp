// quadrature.hpp — adaptive Gauss-Kronrod panel integration

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace dephasimeter {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;  // estimated absolute error
    int panels = 0;          // panels in the final partition
};

// Thrown when the error estimate stays above tolerance after the panel budget
// is exhausted. Carries the best estimate so callers can report it.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double estimate, double abs_error)
        : std::runtime_error(msg), estimate(estimate), abs_error(abs_error) {}
    double estimate;
    double abs_error;
};

// Adaptive 7-15 Gauss-Kronrod subdivision on [a, b]. Splits the worst panel
// until abs_tol or rel_tol is met.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    double abs_tol = 1e-12,
                                    double rel_tol = 1e-10,
                                    int max_panels = 50000);

// Sine integral Si(x) = int_0^x sin(u)/u du, accurate to ~1e-13. Used for the
// analytic tail of slowly decaying spectral integrands.
double sine_integral(double x);

}  // namespace dephasimeter

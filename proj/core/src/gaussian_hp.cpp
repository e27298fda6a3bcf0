#include "dephasimeter/gaussian_hp.hpp"

#include <cmath>
#include <vector>

#include "dephasimeter/minimize.hpp"

namespace dephasimeter::hp {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

double sq(double x) { return x * x; }

// Linear coefficient of the p-center on x: p_center = -slope_const - slope_x * x.
double shear_slope(const GaussianState& gs) {
    return 2.0 * gs.eta + 2.0 * gs.phase * sq(std::sin(gs.theta));
}

double p_center_const(const GaussianState& gs) {
    return 2.0 * gs.phase * std::sin(gs.theta) * gs.J * std::cos(gs.theta);
}

}  // namespace

GaussianState from_oats(double mu, double beta, double J, double theta, double kappa_t) {
    if (mu < 0.0) throw std::domain_error("from_oats requires mu >= 0");
    if (kappa_t < 0.0) throw std::domain_error("from_oats requires kappa >= 0");
    const double band = 1.0 / std::sqrt(2.0 * J);
    if (mu > 2.0 * band)
        throw std::domain_error("squeezing angle mu exceeds twice the properly squeezed band");
    GaussianState gs;
    gs.J = J;
    gs.theta = theta;
    gs.delta = sq(std::cos(beta)) + (1.0 + 4.0 * J * J * mu * mu) * sq(std::sin(beta)) +
               2.0 * J * mu * std::sin(2.0 * beta);
    gs.eta = 2.0 * mu * (std::cos(2.0 * beta) + J * mu * std::sin(2.0 * beta)) /
             (2.0 * gs.delta);
    gs.Q = 4.0 * J * gs.delta * kappa_t * sq(std::sin(theta)) + 1.0;
    gs.phase = 0.0;
    return gs;
}

ValidityReport validity(const GaussianState& gs, double kappa_t) {
    ValidityReport v;
    v.excitations = 0.25 * (1.0 / gs.delta + gs.delta * (1.0 + 4.0 * sq(gs.J * gs.eta)) +
                            4.0 * gs.J * kappa_t);
    v.ratio = v.excitations / gs.J;
    v.level = v.ratio < 0.25 ? ValidityReport::Level::Valid
              : v.ratio <= 0.5 ? ValidityReport::Level::Warn
                               : ValidityReport::Level::Invalid;
    return v;
}

double wigner(const GaussianState& gs, double x, double p) {
    const double u = 2.0 * std::sin(gs.theta) * (gs.J * std::cos(gs.theta) +
                                                 x * std::sin(gs.theta));
    const double v = p + 2.0 * gs.eta * x + gs.phase * u;
    const double arg = -x * x / (gs.J * gs.delta) - (gs.J * gs.delta / gs.Q) * v * v;
    return std::exp(arg) / std::sqrt(kPi * kPi * gs.Q);
}

GaussianMoments moments(const GaussianState& gs) {
    GaussianMoments m;
    const double slope = shear_slope(gs);
    m.mean_x = 0.0;
    m.mean_p = -p_center_const(gs);
    m.var_x = 0.5 * gs.J * gs.delta;
    m.cov_xp = -slope * m.var_x;
    m.var_p = sq(slope) * m.var_x + gs.Q / (2.0 * gs.J * gs.delta);
    return m;
}

double expect(const GaussianState& gs, const QuadForm& o) {
    const GaussianMoments m = moments(gs);
    return o.c0 + o.cx * m.mean_x + o.cp * m.mean_p +
           o.cxx * (m.var_x + sq(m.mean_x)) + o.cpp * (m.var_p + sq(m.mean_p)) +
           o.cxp * (m.cov_xp + m.mean_x * m.mean_p);
}

double variance_op(const GaussianState& gs, const QuadForm& o) {
    const GaussianMoments m = moments(gs);
    // z = (x, p) ~ N(mu, Sigma); f = c0 + l.z + z^T C z with C symmetric.
    const double cxx = o.cxx, cpp = o.cpp, cxp2 = 0.5 * o.cxp;
    const double lx = o.cx, lp = o.cp;
    const double sxx = m.var_x, spp = m.var_p, sxp = m.cov_xp;
    // g = l + 2 C mu
    const double gx = lx + 2.0 * (cxx * m.mean_x + cxp2 * m.mean_p);
    const double gp = lp + 2.0 * (cxp2 * m.mean_x + cpp * m.mean_p);
    const double lin = gx * gx * sxx + 2.0 * gx * gp * sxp + gp * gp * spp;
    // CS = C * Sigma; quad = 2 tr((C Sigma)^2)
    const double a = cxx * sxx + cxp2 * sxp;
    const double b = cxx * sxp + cxp2 * spp;
    const double c = cxp2 * sxx + cpp * sxp;
    const double d = cxp2 * sxp + cpp * spp;
    const double quad = 2.0 * (a * a + 2.0 * b * c + d * d);
    // Weyl-ordering constant lifts the symbol variance to the operator variance.
    return lin + quad - o.cxx * o.cpp + 0.25 * sq(o.cxp);
}

double expect_b_derivative(const GaussianState& gs, const QuadForm& o, double t) {
    const GaussianMoments m = moments(gs);
    const double s = std::sin(gs.theta), c = std::cos(gs.theta);
    const double d_mean_p = -2.0 * t * s * c * gs.J;
    const double slope = shear_slope(gs);
    const double d_slope = 2.0 * t * s * s;
    const double d_cov = -d_slope * m.var_x;
    const double d_var_p = 2.0 * slope * d_slope * m.var_x;
    return o.cp * d_mean_p + o.cpp * (d_var_p + 2.0 * m.mean_p * d_mean_p) +
           o.cxp * (d_cov + m.mean_x * d_mean_p);
}

SldPair sld(const GaussianState& gs, double t) {
    const double s = std::sin(gs.theta), c = std::cos(gs.theta);
    const double pre = -4.0 * t * s;
    SldPair out;
    const double a_coef = pre * gs.delta * gs.J * gs.J * c / gs.Q;
    out.la.cp = a_coef;
    out.la.cx = 2.0 * gs.eta * a_coef;
    const double b_coef = pre * gs.delta * gs.J * s / (gs.Q + 1.0);
    out.lb.cxp = b_coef;
    out.lb.cxx = 2.0 * gs.eta * b_coef;
    out.total.cx = out.la.cx;
    out.total.cp = out.la.cp;
    out.total.cxp = out.lb.cxp;
    out.total.cxx = out.lb.cxx;
    return out;
}

QfiShares qfi(const GaussianState& gs, double t, double T) {
    if (!(t > 0.0)) throw std::invalid_argument("qfi requires t > 0");
    const double s2 = sq(std::sin(gs.theta));
    const double c2 = sq(std::cos(gs.theta));
    QfiShares f;
    const double base = 2.0 * gs.delta * sq(gs.J) * t * T * s2;
    f.fa = base * 4.0 * gs.J * c2 / gs.Q;
    f.fb = base * 2.0 * gs.delta * s2 / (gs.Q + 1.0);
    f.total = f.fa + f.fb;
    f.per_shot = f.total * t / T;
    f.leading_order = 2.0 * gs.delta * gs.J * sq(gs.J) * t * T * sq(std::sin(2.0 * gs.theta)) /
                      gs.Q;
    return f;
}

double readout_precision(const GaussianState& gs, double t, double T, double eta_prime) {
    QuadForm o;
    o.cp = gs.J;
    o.cx = 2.0 * gs.J * eta_prime;
    return readout_precision_quadform(gs, t, T, o);
}

double readout_precision_quadform(const GaussianState& gs, double t, double T,
                                  const QuadForm& o) {
    const double slope = expect_b_derivative(gs, o, t);
    if (std::abs(slope) < 1e-300)
        throw ZeroSignalError("readout signal derivative vanishes at this geometry");
    const double nu = T / t;
    return std::sqrt(variance_op(gs, o) / (nu * sq(slope)));
}

FpResidual fokker_planck_residual(double mu, double beta, double J, double theta, double b,
                                  const noise::DecayCoefficient& noise, double t, int grid,
                                  double dt_fd, FpOperator op, bool halving_check,
                                  double rel_floor) {
    const auto state_at = [&](double time) {
        GaussianState g = from_oats(mu, beta, J, theta, noise.at(time));
        return g.with_phase(b * time);
    };
    const GaussianState gs = state_at(t);
    const GaussianMoments m = moments(gs);
    const double sx = std::sqrt(m.var_x);
    const double sp = std::sqrt(m.var_p);

    const auto eval = [&](int n) {
        const double x_lo = -8.0 * sx, x_hi = 8.0 * sx;
        const double p_lo = m.mean_p - 8.0 * sp, p_hi = m.mean_p + 8.0 * sp;
        const double dx = (x_hi - x_lo) / (n - 1);
        const double dp = (p_hi - p_lo) / (n - 1);
        const GaussianState gm2 = state_at(t - 2.0 * dt_fd), gm1 = state_at(t - dt_fd);
        const GaussianState gp1 = state_at(t + dt_fd), gp2 = state_at(t + 2.0 * dt_fd);
        const double kdot = noise.rate(t);
        const double s = std::sin(theta), c = std::cos(theta);
        double max_res = 0.0, max_dtw = 0.0, max_w = 0.0;
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double x = x_lo + i * dx;
            for (int j = 0; j < n; ++j) col[j] = wigner(gs, x, p_lo + j * dp);
            for (int j = 2; j < n - 2; ++j) {
                const double p = p_lo + j * dp;
                // 4th-order central differences in p
                const double w_p =
                    (-col[j + 2] + 8.0 * col[j + 1] - 8.0 * col[j - 1] + col[j - 2]) /
                    (12.0 * dp);
                const double w_pp = (-col[j + 2] + 16.0 * col[j + 1] - 30.0 * col[j] +
                                     16.0 * col[j - 1] - col[j - 2]) /
                                    (12.0 * dp * dp);
                const double w_t = (-wigner(gp2, x, p) + 8.0 * wigner(gp1, x, p) -
                                    8.0 * wigner(gm1, x, p) + wigner(gm2, x, p)) /
                                   (12.0 * dt_fd);
                double drift, diff;
                if (op == FpOperator::Corrected) {
                    drift = 2.0 * b * s * (J * c + x * s);
                    diff = kdot * s * s;
                } else {
                    drift = b * s * (2.0 * s * x - J * c);
                    diff = kdot;
                }
                const double res = w_t - drift * w_p - diff * w_pp;
                max_res = std::max(max_res, std::abs(res));
                max_dtw = std::max(max_dtw, std::abs(w_t));
                max_w = std::max(max_w, col[j]);
            }
        }
        FpResidual r;
        r.max_dt_w = max_dtw;
        // The roundoff floor keeps stationary families (dW/dt identically 0)
        // from dividing stencil noise by stencil noise.
        const double floor = 1e-9 * max_w / dt_fd;
        r.rel_residual = max_res / std::max(max_dtw, floor);
        r.grid = n;
        return r;
    };

    FpResidual full = eval(grid);
    if (halving_check && full.rel_residual > rel_floor) {
        const FpResidual half = eval(grid / 2);
        // Discretization error drops ~16x at 4th order; a large drop means the
        // residual is resolution-limited rather than a real operator mismatch.
        if (half.rel_residual > 4.0 * full.rel_residual) {
            throw GridResolutionError("Fokker-Planck residual is discretization-dominated");
        }
    }
    return full;
}

double sld_equation_residual(const GaussianState& gs, double t, int grid) {
    const SldPair l = sld(gs, t);
    const GaussianMoments m = moments(gs);
    const double sx = std::sqrt(m.var_x);
    const double sp = std::sqrt(m.var_p);
    const double db = 1e-5 / (std::max(1.0, gs.J) * t);  // small b step for the FD
    const GaussianState g_plus = gs.with_phase(gs.phase + db * t);
    const GaussianState g_minus = gs.with_phase(gs.phase - db * t);

    double max_res = 0.0, max_lhs = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double x = -6.0 * sx + 12.0 * sx * i / (grid - 1);
        for (int j = 0; j < grid; ++j) {
            const double p = m.mean_p - 6.0 * sp + 12.0 * sp * j / (grid - 1);
            const double lhs = 2.0 * (wigner(g_plus, x, p) - wigner(g_minus, x, p)) /
                               (2.0 * db);
            // f_{{L, rho}} = 2 f_L W - (1/2)(cxx d_pp - cxp d_xp + cpp d_xx) W with
            // analytic Gaussian derivatives of W.
            const double w = wigner(gs, x, p);
            const double u = 2.0 * std::sin(gs.theta) *
                             (gs.J * std::cos(gs.theta) + x * std::sin(gs.theta));
            const double v = p + 2.0 * gs.eta * x + gs.phase * u;
            const double jd_q = gs.J * gs.delta / gs.Q;
            const double dv_dx = 2.0 * gs.eta + 2.0 * gs.phase * sq(std::sin(gs.theta));
            const double ax = -2.0 * x / (gs.J * gs.delta) - 2.0 * jd_q * v * dv_dx;
            const double w_pp = (-2.0 * jd_q + sq(2.0 * jd_q * v)) * w;
            const double w_xx = (ax * ax - 2.0 / (gs.J * gs.delta) - 2.0 * jd_q * sq(dv_dx)) * w;
            const double w_xp = (-2.0 * jd_q * dv_dx + (-2.0 * jd_q * v) * ax) * w;
            const double f_l = l.total.c0 + l.total.cx * x + l.total.cp * p +
                               l.total.cxx * x * x + l.total.cpp * p * p +
                               l.total.cxp * x * p;
            const double rhs = 2.0 * f_l * w -
                               0.5 * (l.total.cxx * w_pp - l.total.cxp * w_xp +
                                      l.total.cpp * w_xx);
            const double res = lhs - rhs;
            max_res = std::max(max_res, std::abs(res));
            max_lhs = std::max(max_lhs, std::abs(lhs));
        }
    }
    return max_lhs > 0.0 ? max_res / max_lhs : max_res;
}

ProtocolOptimum optimal_protocol_zeno(double mu, double beta, double J, double T,
                                      double kappa0, double omega_c) {
    const double theta = std::acos(std::sqrt(2.0 / 3.0));
    const GaussianState probe = from_oats(mu, beta, J, theta, 0.0);
    const double tau = 0.5 / (kappa0 * omega_c * std::sin(theta) *
                              std::sqrt(J * probe.delta));
    const double kap = sq(kappa0 * omega_c * tau);
    const GaussianState gs = from_oats(mu, beta, J, theta, kap);
    ProtocolOptimum out;
    out.tau = tau;
    out.theta = theta;
    out.db = 1.0 / std::sqrt(qfi(gs, tau, T).total);
    out.validity = validity(gs, kap);
    return out;
}

ProtocolOptimum optimal_protocol_numeric(double mu, double beta, double J, double T,
                                         const noise::DecayCoefficient& noise_in) {
    const GaussianState probe = from_oats(mu, beta, J, 0.3, 0.0);
    double tau_char;
    if (noise_in.mode == noise::DecayCoefficient::Mode::ZenoQuadratic) {
        tau_char = 1.0 / (noise_in.kappa0 * noise_in.omega_c * std::sqrt(J * probe.delta));
    } else if (noise_in.mode == noise::DecayCoefficient::Mode::MarkovianLinear) {
        tau_char = 1.0 / (noise_in.gamma * J * probe.delta);
    } else {
        tau_char = 1.0;
    }
    const double tau_lo = 1e-4 * tau_char;
    const double tau_hi = (noise_in.mode == noise::DecayCoefficient::Mode::MarkovianLinear
                               ? 2000.0
                               : 10.0) *
                          tau_char;
    bool boundary = false;
    const auto db_at = [&](double theta, double tau) {
        const GaussianState gs = from_oats(mu, beta, J, theta, noise_in.at(tau));
        return 1.0 / std::sqrt(qfi(gs, tau, T).total);
    };
    const auto best_tau = [&](double theta) {
        return golden_min([&](double tau) { return db_at(theta, tau); }, tau_lo, tau_hi,
                          1e-7, 64, true);
    };
    const auto outer = golden_min(
        [&](double theta) { return best_tau(theta).f; }, 1e-3, 0.5 * kPi - 1e-3, 1e-7, 64);
    const auto inner = best_tau(outer.x);
    boundary = inner.at_lower || inner.at_upper;
    ProtocolOptimum out;
    out.theta = outer.x;
    out.tau = inner.x;
    out.db = inner.f;
    const double kap = noise_in.at(out.tau);
    out.validity = validity(from_oats(mu, beta, J, out.theta, kap), kap);
    out.boundary = boundary;
    return out;
}

}  // namespace dephasimeter::hp

#include "dephasimeter/closed_form.hpp"

#include <cmath>

namespace dephasimeter::closed_form {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

double sq(double x) { return x * x; }

}  // namespace

MomentKernel moment_kernel(double theta, double phi, double bt, double n_qubits) {
    const double n = n_qubits;
    MomentKernel k;

    // z = e^{+i bt} sin^2(th/2) + e^{-i bt} cos^2(th/2) = cos(bt) - i cos(th) sin(bt)
    const std::complex<double> z(std::cos(bt), -std::cos(theta) * std::sin(bt));
    const std::complex<double> z2(std::cos(2.0 * bt), -std::cos(theta) * std::sin(2.0 * bt));
    k.zeta = std::exp(kI * phi) * std::pow(z, n - 1.0);
    k.theta_big = std::exp(2.0 * kI * phi) * std::pow(z2, n - 2.0);
    k.zeta_plus = 2.0 * k.zeta.real();
    k.zeta_minus_over_i = 2.0 * k.zeta.imag();
    k.theta_plus = 2.0 * k.theta_big.real();

    // Trigonometric route: zeta = r^{N-1} e^{i((N-1) alpha + phi)} with
    // T_n(cos a) = cos(n a), sin(a) U_{n-1}(cos a) = sin(n a) evaluated as
    // angle multiples; powers go through exp((N-1) log r) to stay finite at
    // large N.
    const double r2 = sq(std::cos(bt)) + sq(std::cos(theta)) * sq(std::sin(bt));
    const double alpha = std::atan2(-std::cos(theta) * std::sin(bt), std::cos(bt));
    const double mag = std::exp(0.5 * (n - 1.0) * std::log(r2));
    k.cheb_zeta_plus = 2.0 * mag * std::cos((n - 1.0) * alpha + phi);
    k.cheb_zeta_minus_over_i = 2.0 * mag * std::sin((n - 1.0) * alpha + phi);
    const double r2q = sq(std::cos(2.0 * bt)) + sq(std::cos(theta)) * sq(std::sin(2.0 * bt));
    const double alpha_q =
        std::atan2(-std::cos(theta) * std::sin(2.0 * bt), std::cos(2.0 * bt));
    const double mag_q = std::exp(0.5 * (n - 2.0) * std::log(r2q));
    k.cheb_theta_plus = 2.0 * mag_q * std::cos((n - 2.0) * alpha_q + 2.0 * phi);
    return k;
}

CssMoments css_moments(double theta, double phi, double b, double t, double kappa,
                       double n_qubits) {
    if (n_qubits < 2) throw std::invalid_argument("css_moments requires N >= 2");
    if (kappa < 0.0) throw std::domain_error("css_moments requires kappa >= 0");
    const double n = n_qubits;
    const double J = 0.5 * n;
    const MomentKernel k = moment_kernel(theta, phi, b * t, n);
    CssMoments m;
    const double pre = 0.25 * n * std::exp(-kappa) * std::sin(theta);
    m.jx = pre * k.cheb_zeta_plus;
    m.jy = pre * k.cheb_zeta_minus_over_i;
    const double common = J * ((1.0 - 2.0 * J) * std::cos(2.0 * theta) + 2.0 * J + 3.0);
    const double osc = J * (2.0 * J - 1.0) * std::exp(-4.0 * kappa) * sq(std::sin(theta)) *
                       k.cheb_theta_plus;
    m.jx2 = 0.125 * (common + osc);
    m.jy2 = 0.125 * (common - osc);
    return m;
}

double css_jy_slope(double theta, double b0, double t, double kappa, double n_qubits) {
    // d<Jy>/db via the kernel: d zeta/db = (N-1) t dz/db z^{N-2} with
    // dz/db = t(-sin(bt) - i cos(th) cos(bt)).
    const double n = n_qubits;
    const double bt = b0 * t;
    const std::complex<double> z(std::cos(bt), -std::cos(theta) * std::sin(bt));
    const std::complex<double> dz(-std::sin(bt), -std::cos(theta) * std::cos(bt));
    const std::complex<double> dzeta = (n - 1.0) * t * dz * std::pow(z, n - 2.0);
    return 0.25 * n * std::exp(-kappa) * std::sin(theta) * 2.0 * dzeta.imag();
}

CssQfiNoiseless css_qfi_noiseless(double theta, double n_qubits, double tau, double T) {
    const double J = 0.5 * n_qubits;
    const double bracket = 4.0 * J - 1.0 + (4.0 * J - 3.0) * std::cos(2.0 * theta);
    const double base = 0.5 * T * tau * J * (2.0 * J - 1.0) * bracket;
    CssQfiNoiseless q;
    q.printed = base * std::sin(theta);
    q.corrected = base * sq(std::sin(theta));
    return q;
}

CssUncertainty css_noisy_uncertainty(double theta, double tau, double kappa,
                                     double n_qubits, double T) {
    if (!(tau > 0.0)) throw std::invalid_argument("css_noisy_uncertainty requires tau > 0");
    const double s2 = sq(std::sin(theta));
    const double c2 = sq(std::cos(theta));
    if (s2 < 1e-300 || c2 < 1e-300)
        throw SingularGeometryError("theta in {0, pi/2} has zero moment-method signal");
    const double J = 0.5 * n_qubits;
    const double twojm1 = 2.0 * J - 1.0;
    CssUncertainty u;
    const double num = std::exp(2.0 * kappa) *
                       (2.0 + twojm1 * s2 * (1.0 - std::exp(-4.0 * kappa)));
    u.db = std::sqrt(num / (4.0 * T * tau * J * sq(twojm1) * s2 * c2));
    const double num_printed =
        std::exp(2.0 * kappa) + 2.0 * J - s2 * std::sinh(2.0 * kappa);
    u.db_printed = std::sqrt(num_printed / (8.0 * J * J * J * T * tau * c2 * s2));
    return u;
}

PhiUncertainty phi_uncertainty(double tau, double kappa, double J, double T, double b0) {
    if (std::abs(J - std::round(J)) > 1e-12)
        throw std::invalid_argument("phi_uncertainty requires integer J");
    PhiUncertainty u;
    const double j2 = J * J;
    u.qcrb = std::exp(j2 * kappa) / (std::sqrt(T * tau) * j2);
    const double phase = j2 * b0 * tau;
    const double s = std::sin(phase);
    if (std::abs(s) < 1e-300)
        throw SingularGeometryError("survival readout has zero signal at this operating point");
    const double var = std::exp(2.0 * j2 * kappa) - sq(std::cos(phase));
    u.survival_db = std::sqrt(var / (T * tau * sq(j2) * sq(s)));
    return u;
}

AsymptoticProtocol css_markovian_theta_fixed(double gamma, double T, double J) {
    AsymptoticProtocol p;
    p.theta_opt = 0.25 * 3.1415926535897932384626433832795;
    p.tau_opt = std::cbrt(3.0) / (2.0 * gamma * std::cbrt(J));
    p.db_opt = std::sqrt(gamma / T) / J;
    return p;
}

AsymptoticProtocol css_markovian_theta_opt(double gamma, double T, double J) {
    AsymptoticProtocol p;
    p.theta_opt = std::pow(2.0, -0.2) * std::pow(3.0, -0.1) * std::pow(J, -0.2);
    p.tau_opt = (std::pow(3.0, 0.4) / std::pow(2.0, 1.2)) * std::pow(J, -0.2) / gamma;
    p.db_opt = std::sqrt(gamma / T) / (std::sqrt(2.0) * J);
    return p;
}

AsymptoticProtocol css_zeno_theta_fixed(double kappa0, double omega_c, double T, double J) {
    AsymptoticProtocol p;
    p.theta_opt = 0.25 * 3.1415926535897932384626433832795;
    p.tau_opt = 1.0 / (std::sqrt(2.0) * kappa0 * omega_c * std::sqrt(J));
    p.db_opt = std::pow(2.0, 0.25) * std::sqrt(kappa0 * omega_c / T) * std::pow(J, -1.25);
    return p;
}

AsymptoticProtocol css_zeno_theta_opt(double kappa0, double omega_c, double T, double J) {
    AsymptoticProtocol p;
    p.theta_opt = std::acos(std::sqrt(2.0 / 3.0));
    p.tau_opt = 0.5 * std::sqrt(3.0) / (kappa0 * omega_c * std::sqrt(J));
    p.db_opt = 0.5 * std::pow(3.0, 0.75) * std::sqrt(kappa0 * omega_c / T) * std::pow(J, -1.25);
    return p;
}

AsymptoticProtocol phi_markovian_opt(double gamma, double T, double J) {
    AsymptoticProtocol p;
    p.tau_opt = 1.0 / (2.0 * gamma * J * J);
    p.db_opt = std::sqrt(2.0 * std::exp(1.0) * gamma / T) / J;
    return p;
}

AsymptoticProtocol phi_zeno_opt(double kappa0, double omega_c, double T, double J) {
    AsymptoticProtocol p;
    p.tau_opt = 0.5 / (kappa0 * omega_c * J);
    p.db_opt = std::sqrt(2.0) * std::exp(0.25) * std::sqrt(kappa0 * omega_c / T) *
               std::pow(J, -1.5);
    return p;
}

}  // namespace dephasimeter::closed_form

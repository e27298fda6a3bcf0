// closed_form.hpp — analytic CSS / Phi moments, QFI, and noisy uncertainties

#pragma once

#include <complex>
#include <stdexcept>

namespace dephasimeter::closed_form {

// zeta / Theta kernels entering the CSS first and second moments, evaluated
// both through complex powers and through the trigonometric (Chebyshev) route.
// The phase convention matches the engine propagator
// e^{+i b t (m^2 - m'^2)}: zeta = e^{+i phi} [e^{+i b t} sin^2(th/2) +
// e^{-i b t} cos^2(th/2)]^(N-1).
struct MomentKernel {
    std::complex<double> zeta;
    std::complex<double> theta_big;
    // complex-route real combinations
    double zeta_plus = 0.0;          // zeta + zeta*
    double zeta_minus_over_i = 0.0;  // (zeta - zeta*) / i
    double theta_plus = 0.0;         // Theta + Theta*
    // trigonometric/Chebyshev-route combinations (log-polar, stable at large N)
    double cheb_zeta_plus = 0.0;
    double cheb_zeta_minus_over_i = 0.0;
    double cheb_theta_plus = 0.0;
};

MomentKernel moment_kernel(double theta, double phi, double bt, double n_qubits);

struct CssMoments {
    double jx = 0.0;
    double jy = 0.0;
    double jx2 = 0.0;
    double jy2 = 0.0;
};

// Exact noisy CSS moments for quadratic encoding; equal to the Dicke engine
// values for every N >= 2.
CssMoments css_moments(double theta, double phi, double b, double t, double kappa,
                       double n_qubits);

// d<Jy>/db at the operating point (analytic), needed for moment-method
// uncertainties. Negative for theta in (0, pi/2) under this phase convention.
double css_jy_slope(double theta, double b0, double t, double kappa, double n_qubits);

struct CssQfiNoiseless {
    double printed = 0.0;    // (T tau J / 2)(2J-1) sin(theta) [4J-1+(4J-3)cos 2theta]
    double corrected = 0.0;  // same with sin^2(theta); equals 4 T tau Var(Jz^2)
};

// Total noiseless CSS QFI over the T budget at encoding time tau. The printed
// form and the oracle-consistent corrected form are both returned; they differ
// by one power of sin(theta).
CssQfiNoiseless css_qfi_noiseless(double theta, double n_qubits, double tau, double T);

struct SingularGeometryError : std::domain_error {
    using std::domain_error::domain_error;
};

struct CssUncertainty {
    double db = 0.0;          // exact moment-method uncertainty (Jy readout, b0 = 0)
    double db_printed = 0.0;  // verbatim printed closed form, kept for comparison
};

// Moment-method uncertainty of the Jy readout at b0 = 0 under decay kappa
// accumulated over tau:
//   db^2 = e^{2k}[2 + (2J-1) sin^2(th)(1 - e^{-4k})] /
//          [4 T tau J (2J-1)^2 sin^2(th) cos^2(th)].
// Exact at all N (derived from the closed-form moments); reduces to the
// noiseless formula at kappa = 0. db_printed carries the literature form
// [e^{2k} + 2J - sin^2(th) sinh 2k] / [8 J^3 T tau cos^2 th sin^2 th] whose
// kappa -> 0 limit disagrees with the noiseless result; see the discrepancy
// report emitted by the optimizer.
CssUncertainty css_noisy_uncertainty(double theta, double tau, double kappa,
                                     double n_qubits, double T);

struct PhiUncertainty {
    double qcrb = 0.0;         // e^{J^2 kappa} / (sqrt(T tau) J^2)
    double survival_db = 0.0;  // error propagation of the survival readout at b0
};

PhiUncertainty phi_uncertainty(double tau, double kappa, double J, double T, double b0);

// Asymptotic optimal-protocol constants used for cross-checks and Table-1
// reference values. All in J units with the physical decay coefficient.
struct AsymptoticProtocol {
    double tau_opt = 0.0;
    double theta_opt = 0.0;
    double db_opt = 0.0;
};

AsymptoticProtocol css_markovian_theta_fixed(double gamma, double T, double J);
AsymptoticProtocol css_markovian_theta_opt(double gamma, double T, double J);
AsymptoticProtocol css_zeno_theta_fixed(double kappa0, double omega_c, double T, double J);
AsymptoticProtocol css_zeno_theta_opt(double kappa0, double omega_c, double T, double J);
AsymptoticProtocol phi_markovian_opt(double gamma, double T, double J);   // exact at all J
AsymptoticProtocol phi_zeno_opt(double kappa0, double omega_c, double T, double J);  // exact

}  // namespace dephasimeter::closed_form

// gaussian_hp.hpp — Holstein-Primakoff phase-space engine for squeezed states

#pragma once

#include <stdexcept>

#include "dephasimeter/noise_model.hpp"

namespace dephasimeter::hp {

// Effective Gaussian description of a properly squeezed one-axis-twisted state
// evolving under quadratic encoding with collective dephasing.
//   W(x, p) = (pi^2 Q)^{-1/2} exp[-x^2/(J delta)
//             - (J delta / Q)(p + 2 eta x + phase * u(x))^2],
//   u(x) = 2 sin(theta) (J cos(theta) + x sin(theta)),
//   Q = 4 J delta kappa sin^2(theta) + 1.
struct GaussianState {
    double J = 1.0;
    double delta = 1.0;  // quadrature squeezing
    double eta = 0.0;    // shear / effective displacement strength
    double theta = 0.0;  // signal angle
    double phase = 0.0;  // b * t
    double Q = 1.0;      // diffusion factor

    GaussianState with_phase(double ph) const {
        GaussianState g = *this;
        g.phase = ph;
        return g;
    }
};

struct ValidityReport {
    enum class Level { Valid, Warn, Invalid };
    double excitations = 0.0;  // (1/4)[1/delta + delta(1 + 4 J^2 eta^2) + 4 J kappa]
    double ratio = 0.0;        // excitations / J
    Level level = Level::Valid;
    bool valid() const { return level == Level::Valid; }
};

// Builds the Gaussian state from OATS parameters:
//   delta = cos^2 b + (1 + 4 J^2 mu^2) sin^2 b + 2 J mu sin 2b,
//   eta   = 2 mu [cos 2b + J mu sin 2b] / (2 delta).
// Throws std::domain_error when mu exceeds twice the properly squeezed band
// (2J)^{-1/2}; inside [band, 2*band] the validity report carries the flag.
GaussianState from_oats(double mu, double beta, double J, double theta, double kappa_t);

ValidityReport validity(const GaussianState& gs, double kappa_t);

double wigner(const GaussianState& gs, double x, double p);

// Phase-space observable up to quadratic order:
//   f(x, p) = c0 + cx x + cp p + cxx x^2 + cpp p^2 + cxp xp,
// where cxp is the Weyl symbol coefficient of (x p + p x)/2.
struct QuadForm {
    double c0 = 0.0, cx = 0.0, cp = 0.0, cxx = 0.0, cpp = 0.0, cxp = 0.0;
};

struct GaussianMoments {
    double mean_x = 0.0, mean_p = 0.0;
    double var_x = 0.0, var_p = 0.0, cov_xp = 0.0;
};

GaussianMoments moments(const GaussianState& gs);

// <O> and Var(O) of the quadratic-form operator under the state. The variance
// includes the Weyl-ordering constant (- cxx cpp + cxp^2 / 4) so it is the
// operator variance, not the symbol variance.
double expect(const GaussianState& gs, const QuadForm& o);
double variance_op(const GaussianState& gs, const QuadForm& o);

// d<O>/db at the state's operating point (phase = b0 * t).
double expect_b_derivative(const GaussianState& gs, const QuadForm& o, double t);

struct SldPair {
    QuadForm la;  // -4 t sin(th) [delta J^2 cos(th) / Q] (p + 2 eta x)
    QuadForm lb;  // -4 t sin(th) [delta J sin(th) / (Q+1)] ({x,p}/2 + 2 eta x^2)
    QuadForm total;
};

SldPair sld(const GaussianState& gs, double t);

struct QfiShares {
    double per_shot = 0.0;
    double total = 0.0;          // per_shot * (T / t)
    double fa = 0.0;             // total, A share
    double fb = 0.0;             // total, B share
    double leading_order = 0.0;  // 2 delta J^3 t T sin^2(2 theta) / Q
};

QfiShares qfi(const GaussianState& gs, double t, double T);

struct ZeroSignalError : std::domain_error {
    using std::domain_error::domain_error;
};

// Moment-method precision of the linear readout O = J p + 2 J eta' x.
double readout_precision(const GaussianState& gs, double t, double T, double eta_prime);

// Moment-method precision of an arbitrary quadratic-form readout; applied to
// the full SLD this saturates the QCRB identically.
double readout_precision_quadform(const GaussianState& gs, double t, double T,
                                  const QuadForm& o);

enum class FpOperator {
    Printed,    // dW/dt = b sin(th)(2 sin(th) x - J cos(th)) dW/dp + kdot d2W/dp2
    Corrected,  // dW/dt = 2 b sin(th)(J cos(th) + x sin(th)) dW/dp + kdot sin^2(th) d2W/dp2
};

struct FpResidual {
    double rel_residual = 0.0;  // max |lhs - rhs| / max |dW/dt|
    double max_dt_w = 0.0;
    int grid = 0;
};

struct GridResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Residual of the time-evolved Wigner family against the chosen transport
// operator, by central finite differences (4th order in p, 2nd order in t).
// halving_check reruns at half resolution and throws GridResolutionError if
// the residual is discretization-dominated yet above rel_floor.
FpResidual fokker_planck_residual(double mu, double beta, double J, double theta, double b,
                                  const noise::DecayCoefficient& noise, double t, int grid,
                                  double dt_fd, FpOperator op, bool halving_check = false,
                                  double rel_floor = 1e-4);

// Residual of the phase-space SLD equation 2 dW/db = f_{{L, rho}} on a grid;
// the b-derivative is taken by central finite difference so the check is
// independent of the analytic derivative identities.
double sld_equation_residual(const GaussianState& gs, double t, int grid);

struct ProtocolOptimum {
    double tau = 0.0;
    double theta = 0.0;
    double db = 0.0;
    ValidityReport validity;
    bool boundary = false;  // optimum pinned at the tau bracket edge
};

// Closed-form Zeno protocol: theta* = arccos sqrt(2/3),
// tau* = (1/2 kappa0 w_c) |csc theta*| (J delta)^{-1/2}; the reported db is
// the full QCRB (A + B shares) at those parameters.
ProtocolOptimum optimal_protocol_zeno(double mu, double beta, double J, double T,
                                      double kappa0, double omega_c);

// Free numeric optimization of the full QCRB over (tau, theta).
ProtocolOptimum optimal_protocol_numeric(double mu, double beta, double J, double T,
                                         const noise::DecayCoefficient& noise);

}  // namespace dephasimeter::hp

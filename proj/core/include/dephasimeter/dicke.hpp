// dicke.hpp — exact collective-spin simulator in the Dicke basis

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dephasimeter/noise_model.hpp"

namespace dephasimeter::dicke {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Initial-state description. theta is the polar angle between the state
// direction and the z quantization axis (the signal axis).
struct StateSpec {
    enum class Kind { Css, Oats, Phi, PhiPrime };

    Kind kind = Kind::Css;
    int n_qubits = 2;
    double theta = 0.0;  // polar angle
    double phi = 0.0;    // azimuthal angle (CSS only)
    double mu = 0.0;     // OATS squeezing angle
    double beta = 0.0;   // OATS rotation angle

    static StateSpec css(int n, double theta, double phi = 0.0);
    static StateSpec oats(int n, double mu, double beta, double theta);
    static StateSpec phi_state(int n);
    static StateSpec phi_prime_state(int n);

    double J() const { return 0.5 * n_qubits; }
    int dim() const { return n_qubits + 1; }
};

// Density matrix in the Dicke basis, rows/columns indexed by m = J..-J.
struct DickeDensity {
    double J = 0.0;
    Matrix mat;

    int dim() const { return static_cast<int>(mat.rows()); }
    double m_of(int row) const { return J - row; }

    // Hermiticity / trace / positivity check; throws std::runtime_error on
    // violation beyond the stated tolerances.
    void validate(double herm_tol = 1e-12, double trace_tol = 1e-12,
                  double psd_tol = 1e-10) const;
};

// Signal encoding b Jz^k applied for time t around operating point b0.
struct EncodingSpec {
    int k = 2;          // nonlinearity order, k >= 1
    double b = 0.0;     // true parameter
    double b0 = 0.0;    // operating point
    double t = 0.0;     // encoding time

    double detuning() const { return b - b0; }
};

// Collective spin-operator matrices for total spin J.
Matrix jx_matrix(double J);
Matrix jy_matrix(double J);
Matrix jz_matrix(double J);

DickeDensity build_initial(const StateSpec& spec);

// Elementwise noise-averaged propagator:
//   rho_{mm'}(t) = e^{i b t (m^k - m'^k)} e^{-kappa (m-m')^2} rho_{mm'}(0).
DickeDensity propagate(const DickeDensity& rho0, const EncodingSpec& enc, double kappa);

struct Obs {
    enum class Kind { Jx, Jy, Jz, Jx2, Jy2, Jz2, Jz4, SurvivalPhi, SurvivalPhiPrime,
                      NonlinearReadout };
    Kind kind = Kind::Jz;
    double eta = 0.0;  // NonlinearReadout strength

    static Obs jx() { return {Kind::Jx, 0.0}; }
    static Obs jy() { return {Kind::Jy, 0.0}; }
    static Obs jz() { return {Kind::Jz, 0.0}; }
    static Obs jx2() { return {Kind::Jx2, 0.0}; }
    static Obs jy2() { return {Kind::Jy2, 0.0}; }
    static Obs jz2() { return {Kind::Jz2, 0.0}; }
    static Obs jz4() { return {Kind::Jz4, 0.0}; }
    static Obs survival_phi() { return {Kind::SurvivalPhi, 0.0}; }
    static Obs survival_phi_prime() { return {Kind::SurvivalPhiPrime, 0.0}; }
    static Obs nonlinear_readout(double eta) { return {Kind::NonlinearReadout, eta}; }
};

// Observable matrix for total spin J (dense; NonlinearReadout by conjugation).
Matrix observable_matrix(const Obs& obs, double J);

double expect(const DickeDensity& rho, const Obs& obs);

struct QfiResult {
    double per_shot = 0.0;  // Tr[rho L^2]
    Matrix sld;             // symmetric logarithmic derivative at b0
};

// Exact QFI of b -> propagate(rho0, {k, b, ., t}, kappa) at b = b0, using the
// analytic derivative d rho_{mm'} = i t (m^k - m'^k) rho_{mm'} and the spectral
// decomposition of rho. Zero-probability pairs are dropped at
// eps = 1e-12 * max eigenvalue.
QfiResult qfi_exact(const DickeDensity& rho0, const EncodingSpec& enc, double kappa);

struct TrajectoryAverage {
    DickeDensity mean;
    Eigen::MatrixXd se_real;  // per-element standard errors
    Eigen::MatrixXd se_imag;
};

// Ensemble average of U_xi rho U_xi^dagger over sampled noise trajectories,
// including the deterministic encoding phase. Deterministic given (seed, M),
// independent of the worker count.
TrajectoryAverage trajectory_average(const DickeDensity& rho0, const EncodingSpec& enc,
                                     const noise::NoiseSpectrum& spec, int trajectories,
                                     std::uint64_t seed, double dt, int workers = 1);

// Debug-oriented JSON form {"J": .., "re": [[..]], "im": [[..]]}.
std::string to_json(const DickeDensity& rho);
DickeDensity density_from_json(const std::string& text);

}  // namespace dephasimeter::dicke

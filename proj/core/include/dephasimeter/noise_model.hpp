// noise_model.hpp — dephasing-noise spectra, decay coefficient, trajectories

#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dephasimeter::noise {

// Bridge between the spectral-overlap decay coefficient (1/32pi convention)
// and the coherence decay law e^{-kappa(t) (m-m')^2}. Fixed analytically from
// the Wiener-Khinchin relation Var[int_0^t xi] = 64 * kappa_overlap(t) and
// pinned by the Monte Carlo closure test on a two-qubit Dicke coherence.
inline constexpr double kKappaNorm = 32.0;

struct ResolutionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Stationary zero-mean Gaussian dephasing noise described by its symmetric
// spectrum S(omega) >= 0.
struct NoiseSpectrum {
    enum class Kind { Flat, Lorentzian, HardCutoff };

    Kind kind = Kind::Flat;
    double level = 0.0;      // S0 for Flat / HardCutoff
    double variance = 0.0;   // g^2 for Lorentzian (equals C(0))
    double corr_rate = 0.0;  // gamma_c for Lorentzian
    double cutoff = 0.0;     // omega_c for HardCutoff

    static NoiseSpectrum flat(double s0);
    static NoiseSpectrum lorentzian(double g2, double gamma_c);
    static NoiseSpectrum hard_cutoff(double s0, double omega_c);

    double at(double omega) const;     // S(omega)
    double total_integral() const;     // int_-inf^inf S(omega) d omega
};

// kappa(t) = (1/32pi) int dw sin^2(w t/2)/w^2 S(w), adaptive quadrature with
// analytic tail corrections per spectrum kind. Throws QuadratureError when the
// error estimate cannot be brought under tolerance.
double kappa_overlap(const NoiseSpectrum& spec, double t);

// Decay coefficient entering rho_{mm'}(t) ~ e^{-kappa(t)(m-m')^2}.
// ExactQuadrature applies kKappaNorm to the spectral overlap so that all three
// modes share the same decay-law normalization.
struct DecayCoefficient {
    enum class Mode { ExactQuadrature, MarkovianLinear, ZenoQuadratic };

    Mode mode = Mode::MarkovianLinear;
    double gamma = 0.0;                    // MarkovianLinear: kappa = gamma t
    double kappa0 = 0.0;                   // ZenoQuadratic: kappa = kappa0^2 (w_c t)^2
    double omega_c = 0.0;
    NoiseSpectrum spectrum;                // ExactQuadrature source
    std::vector<std::pair<double, double>> table;  // sorted (t, kappa) cache

    static DecayCoefficient markovian(double gamma);
    static DecayCoefficient zeno(double kappa0, double omega_c);
    static DecayCoefficient exact(const NoiseSpectrum& spec);

    // Returns a copy with the (t, kappa) table filled on the given grid.
    DecayCoefficient tabulated(const std::vector<double>& times) const;

    double at(double t) const;
    double rate(double t) const;  // d kappa / dt
};

// One realization xi(i*dt), i = 0..n. The Lorentzian kind uses the exact
// Ornstein-Uhlenbeck update; other kinds use harmonic synthesis on
// [band_min, band_max] with 4096 modes and Gaussian mode amplitudes.
struct Trajectory {
    double dt = 0.0;
    std::vector<double> xi;
    double band_min = 0.0;  // 0 for the OU path
    double band_max = 0.0;

    double horizon() const { return xi.empty() ? 0.0 : dt * static_cast<double>(xi.size() - 1); }
};

Trajectory sample_trajectory(const NoiseSpectrum& spec, double horizon, double dt,
                             std::uint64_t seed);

// int_0^t xi(s) ds by the trapezoid rule over stored samples; exact for
// constant xi. Throws std::out_of_range when t exceeds the horizon.
double integrated_phase(const Trajectory& traj, double t);

// C(0) restricted to the synthesized band, (1/pi) int_{band} S(w) dw; for the
// OU path this is the full C(0) = g^2.
double band_variance(const NoiseSpectrum& spec, const Trajectory& traj);

// kappa_overlap restricted to [band_min, band_max]; reference for Monte Carlo
// closure tests against band-limited synthesized noise.
double kappa_overlap_banded(const NoiseSpectrum& spec, double t, double band_min,
                            double band_max);

}  // namespace dephasimeter::noise

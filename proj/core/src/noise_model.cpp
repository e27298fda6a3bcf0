#include "dephasimeter/noise_model.hpp"

#include <algorithm>
#include <cmath>

#include "dephasimeter/quadrature.hpp"
#include "dephasimeter/rng.hpp"

namespace dephasimeter::noise {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr int kSynthesisModes = 4096;

// sin^2(w t / 2) / w^2 with the removable singularity replaced by its limit.
double filter_kernel(double omega, double t) {
    const double x = omega * t;
    if (std::abs(x) < 1e-6) {
        return (t * t / 4.0) * (1.0 - x * x / 12.0);
    }
    const double s = std::sin(0.5 * x);
    return s * s / (omega * omega);
}

}  // namespace

NoiseSpectrum NoiseSpectrum::flat(double s0) {
    if (!(s0 > 0.0)) throw std::invalid_argument("flat spectrum requires S0 > 0");
    NoiseSpectrum s;
    s.kind = Kind::Flat;
    s.level = s0;
    return s;
}

NoiseSpectrum NoiseSpectrum::lorentzian(double g2, double gamma_c) {
    if (!(g2 > 0.0) || !(gamma_c > 0.0))
        throw std::invalid_argument("lorentzian spectrum requires g^2 > 0 and gamma_c > 0");
    NoiseSpectrum s;
    s.kind = Kind::Lorentzian;
    s.variance = g2;
    s.corr_rate = gamma_c;
    return s;
}

NoiseSpectrum NoiseSpectrum::hard_cutoff(double s0, double omega_c) {
    if (!(s0 > 0.0) || !(omega_c > 0.0))
        throw std::invalid_argument("hard-cutoff spectrum requires S0 > 0 and omega_c > 0");
    NoiseSpectrum s;
    s.kind = Kind::HardCutoff;
    s.level = s0;
    s.cutoff = omega_c;
    return s;
}

double NoiseSpectrum::at(double omega) const {
    switch (kind) {
        case Kind::Flat:
            return level;
        case Kind::Lorentzian:
            return 2.0 * variance * corr_rate / (corr_rate * corr_rate + omega * omega);
        case Kind::HardCutoff:
            return std::abs(omega) <= cutoff ? level : 0.0;
    }
    return 0.0;
}

double NoiseSpectrum::total_integral() const {
    switch (kind) {
        case Kind::Flat:
            throw std::domain_error("flat spectrum has no finite integral");
        case Kind::Lorentzian:
            return 2.0 * kPi * variance;
        case Kind::HardCutoff:
            return 2.0 * level * cutoff;
    }
    return 0.0;
}

double kappa_overlap(const NoiseSpectrum& spec, double t) {
    if (t < 0.0) throw std::invalid_argument("kappa requires t >= 0");
    if (t == 0.0) return 0.0;

    const auto integrand = [&spec, t](double w) { return filter_kernel(w, t) * spec.at(w); };
    double half_line = 0.0;  // int_0^inf

    switch (spec.kind) {
        case NoiseSpectrum::Kind::HardCutoff: {
            half_line = integrate_adaptive(integrand, 0.0, spec.cutoff).value;
            break;
        }
        case NoiseSpectrum::Kind::Flat: {
            // Finite window plus the exact tail of S0 sin^2(w t/2)/w^2:
            //   tail = S0 [ (1 - cos(W t)) / (2W) + (t/2)(pi/2 - Si(W t)) ]
            const double window = 60.0 / t;
            half_line = integrate_adaptive(integrand, 0.0, window).value;
            const double wt = window * t;
            half_line += spec.level * ((1.0 - std::cos(wt)) / (2.0 * window) +
                                       0.5 * t * (0.5 * kPi - sine_integral(wt)));
            break;
        }
        case NoiseSpectrum::Kind::Lorentzian: {
            // Beyond W the spectrum is C/w^2 with C = 2 g^2 gamma_c; integrate the
            // window and add the leading analytic tail terms.
            const double c_tail = 2.0 * spec.variance * spec.corr_rate;
            double window = std::max({50.0 / t, 50.0 * spec.corr_rate, 1.0});
            const double target = 1e-13 * std::max(1.0, spec.variance * t / spec.corr_rate);
            while (2.0 * c_tail / (t * t * std::pow(window, 5)) > target && window < 1e9) {
                window *= 2.0;
            }
            half_line = integrate_adaptive(integrand, 0.0, window).value;
            const double w3 = window * window * window;
            half_line += c_tail / (6.0 * w3) +
                         c_tail * std::sin(window * t) / (2.0 * t * w3 * window);
            break;
        }
    }
    return half_line / (16.0 * kPi);
}

double kappa_overlap_banded(const NoiseSpectrum& spec, double t, double band_min,
                            double band_max) {
    if (t == 0.0) return 0.0;
    const auto integrand = [&spec, t](double w) { return filter_kernel(w, t) * spec.at(w); };
    return integrate_adaptive(integrand, band_min, band_max).value / (16.0 * kPi);
}

DecayCoefficient DecayCoefficient::markovian(double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("markovian decay requires gamma >= 0");
    DecayCoefficient d;
    d.mode = Mode::MarkovianLinear;
    d.gamma = gamma;
    return d;
}

DecayCoefficient DecayCoefficient::zeno(double kappa0, double omega_c) {
    if (!(kappa0 >= 0.0) || !(omega_c > 0.0))
        throw std::invalid_argument("zeno decay requires kappa0 >= 0 and omega_c > 0");
    DecayCoefficient d;
    d.mode = Mode::ZenoQuadratic;
    d.kappa0 = kappa0;
    d.omega_c = omega_c;
    return d;
}

DecayCoefficient DecayCoefficient::exact(const NoiseSpectrum& spec) {
    DecayCoefficient d;
    d.mode = Mode::ExactQuadrature;
    d.spectrum = spec;
    return d;
}

DecayCoefficient DecayCoefficient::tabulated(const std::vector<double>& times) const {
    DecayCoefficient out = *this;
    out.table.clear();
    out.table.reserve(times.size());
    for (double t : times) out.table.emplace_back(t, at(t));
    std::sort(out.table.begin(), out.table.end());
    return out;
}

double DecayCoefficient::at(double t) const {
    if (t < 0.0) throw std::invalid_argument("decay coefficient requires t >= 0");
    switch (mode) {
        case Mode::MarkovianLinear:
            return gamma * t;
        case Mode::ZenoQuadratic: {
            const double x = kappa0 * omega_c * t;
            return x * x;
        }
        case Mode::ExactQuadrature: {
            if (table.size() >= 2 && t >= table.front().first && t <= table.back().first) {
                auto hi = std::lower_bound(table.begin(), table.end(), std::make_pair(t, -1.0));
                if (hi->first == t) return hi->second;
                auto lo = hi - 1;
                const double w = (t - lo->first) / (hi->first - lo->first);
                return lo->second + w * (hi->second - lo->second);
            }
            return kKappaNorm * kappa_overlap(spectrum, t);
        }
    }
    return 0.0;
}

double DecayCoefficient::rate(double t) const {
    switch (mode) {
        case Mode::MarkovianLinear:
            return gamma;
        case Mode::ZenoQuadratic:
            return 2.0 * kappa0 * kappa0 * omega_c * omega_c * t;
        case Mode::ExactQuadrature: {
            const double h = std::max(1e-6, 1e-4 * std::max(t, 1e-6));
            const double tm = std::max(0.0, t - h);
            return (at(t + h) - at(tm)) / (t + h - tm);
        }
    }
    return 0.0;
}

Trajectory sample_trajectory(const NoiseSpectrum& spec, double horizon, double dt,
                             std::uint64_t seed) {
    if (!(dt > 0.0) || horizon < dt)
        throw std::invalid_argument("sample_trajectory requires dt > 0 and horizon >= dt");
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
    Trajectory traj;
    traj.dt = dt;
    traj.xi.resize(n_steps + 1);
    CounterRng rng(seed, 0);

    if (spec.kind == NoiseSpectrum::Kind::Lorentzian) {
        if (dt * spec.corr_rate > 0.1)
            throw ResolutionError("dt too coarse for the Lorentzian correlation rate");
        // Exact stationary OU update.
        const double a = std::exp(-spec.corr_rate * dt);
        const double sigma = std::sqrt(spec.variance);
        const double step_sd = sigma * std::sqrt(1.0 - a * a);
        double x = sigma * rng.next_normal();
        traj.xi[0] = x;
        for (std::size_t i = 1; i <= n_steps; ++i) {
            x = a * x + step_sd * rng.next_normal();
            traj.xi[i] = x;
        }
        return traj;
    }

    if (spec.kind == NoiseSpectrum::Kind::HardCutoff && dt * spec.cutoff > 0.1)
        throw ResolutionError("dt too coarse for the spectrum cutoff");

    // Harmonic synthesis: xi(t) = sum_k a_k cos(w_k t) + b_k sin(w_k t),
    // a_k, b_k ~ N(0, S(w_k) dw / pi). Gaussian amplitudes make the process
    // exactly Gaussian at any mode count.
    traj.band_min = 2.0 * kPi / (100.0 * horizon);
    traj.band_max = spec.kind == NoiseSpectrum::Kind::HardCutoff
                        ? spec.cutoff
                        : 2.0 / dt;  // flat spectrum: resolve up to the sampling band
    const double dw = (traj.band_max - traj.band_min) / kSynthesisModes;
    std::vector<double> amp_c(kSynthesisModes), amp_s(kSynthesisModes);
    std::vector<double> cos_w(kSynthesisModes), sin_w(kSynthesisModes);
    std::vector<double> cos_cur(kSynthesisModes, 1.0), sin_cur(kSynthesisModes, 0.0);
    for (int k = 0; k < kSynthesisModes; ++k) {
        const double w = traj.band_min + (k + 0.5) * dw;
        const double sd = std::sqrt(spec.at(w) * dw / kPi);
        amp_c[k] = sd * rng.next_normal();
        amp_s[k] = sd * rng.next_normal();
        cos_w[k] = std::cos(w * dt);
        sin_w[k] = std::sin(w * dt);
    }
    for (std::size_t i = 0; i <= n_steps; ++i) {
        double acc = 0.0;
        for (int k = 0; k < kSynthesisModes; ++k) {
            acc += amp_c[k] * cos_cur[k] + amp_s[k] * sin_cur[k];
            const double c = cos_cur[k] * cos_w[k] - sin_cur[k] * sin_w[k];
            sin_cur[k] = sin_cur[k] * cos_w[k] + cos_cur[k] * sin_w[k];
            cos_cur[k] = c;
        }
        traj.xi[i] = acc;
    }
    return traj;
}

double integrated_phase(const Trajectory& traj, double t) {
    if (t < 0.0 || t > traj.horizon() * (1.0 + 1e-12))
        throw std::out_of_range("integrated_phase: t outside the trajectory horizon");
    const double pos = std::min(t / traj.dt, static_cast<double>(traj.xi.size() - 1));
    const auto full = static_cast<std::size_t>(pos);
    double acc = 0.0;
    for (std::size_t i = 0; i < full; ++i) acc += 0.5 * (traj.xi[i] + traj.xi[i + 1]);
    acc *= traj.dt;
    const double frac = pos - static_cast<double>(full);
    if (frac > 0.0) {
        const double x_end = traj.xi[full] + frac * (traj.xi[full + 1] - traj.xi[full]);
        acc += 0.5 * (traj.xi[full] + x_end) * frac * traj.dt;
    }
    return acc;
}

double band_variance(const NoiseSpectrum& spec, const Trajectory& traj) {
    if (spec.kind == NoiseSpectrum::Kind::Lorentzian) return spec.variance;
    const auto integrand = [&spec](double w) { return spec.at(w); };
    return integrate_adaptive(integrand, traj.band_min, traj.band_max).value / kPi;
}

}  // namespace dephasimeter::noise

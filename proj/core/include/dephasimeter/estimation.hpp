// estimation.hpp — shot sampling, moment-method and ratio estimators

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dephasimeter/dicke.hpp"
#include "dephasimeter/rng.hpp"
#include "dephasimeter/noise_model.hpp"

namespace dephasimeter::est {

struct ProtocolSpec {
    int n_qubits = 2;
    double b_true = 0.0;
    double b0 = 0.0;
    double tau = 1.0;      // encoding period
    double T_total = 1.0;  // total interrogation time per observable
    dicke::Obs readout = dicke::Obs::jy();
    noise::DecayCoefficient noise;

    long nu() const { return static_cast<long>(T_total / tau); }
    // Local-regime check |b_true - b0| tau << 1; returns the smallness value.
    double detuning_phase() const { return std::abs(b_true - b0) * tau; }
};

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;  // population variance of the drawn outcomes
    long n = 0;
};

// Projective-readout sampler: outcomes are eigenvalues of the observable with
// Born probabilities. Survival observables collapse to the two-outcome +-1
// Bernoulli form; spin observables sample the full (2J+1)-outcome law.
class BornSampler {
public:
    BornSampler(const dicke::DickeDensity& rho, const dicke::Obs& obs);

    double draw(CounterRng& rng) const;
    SampleStats sample(long nu, CounterRng& rng) const;
    double mean() const { return mean_; }
    double variance() const { return variance_; }

private:
    std::vector<double> values_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

SampleStats sample_shots(const dicke::DickeDensity& rho, const dicke::Obs& obs, long nu,
                         std::uint64_t seed);

struct EstimatorResult {
    double estimate = 0.0;  // mean estimate over replications
    double bias = 0.0;      // estimate - b_true
    double bias_se = 0.0;   // Monte Carlo standard error of the bias
    double std_dev = 0.0;   // per-replication standard deviation
    double std_se = 0.0;    // standard error of std_dev
    double analytic_db = 0.0;  // error-propagation prediction, when available
    long nu = 0;            // shots per observable
    long total_shots = 0;   // 2 nu for ratio protocols
    double total_time = 0.0;  // 2 T for ratio protocols
    long replications = 0;
    long failures = 0;      // inversion-domain / indeterminate-ratio counts

    std::string to_json() const;
};

// Method-of-moments estimator that inverts the noiseless <Jy>(b) relation,
// deliberately ignoring the decay factor; biased whenever kappa > 0.
EstimatorResult naive_estimator_css(const ProtocolSpec& spec, double theta, long replications,
                                    std::uint64_t seed, int workers = 1);

// b_R = 4 (N^2 tau)^{-1} arctan(<O'>/<O>) from the Phi / Phi' survival pair;
// 2 nu shots over 2 T total.
EstimatorResult ratio_estimator_phi(const ProtocolSpec& spec, long replications,
                                    std::uint64_t seed, int workers = 1);

// CSS ratio estimator from the Jx / Jy pair at b0 = 0. The sign convention
// follows the e^{+i b t (m^2 - m'^2)} propagator:
//   b_R = -[(N-1) cos(theta) tau]^{-1} arctan(<Jy>/<Jx>).
EstimatorResult ratio_estimator_css(const ProtocolSpec& spec, double theta,
                                    long replications, std::uint64_t seed, int workers = 1);

// Eq.-style analytic uncertainties evaluated from exact means/variances.
double analytic_ratio_phi_db(const ProtocolSpec& spec);
double analytic_ratio_css_db(const ProtocolSpec& spec, double theta);

struct MomentPair {
    double mean = 0.0;
    double second_moment = 0.0;
};

// Single-observable error propagation db^2 = Var(O) / (nu (d<O>/db)^2);
// sensitivity is d<O>/db at the operating point.
double error_propagation(const MomentPair& m, double sensitivity, long nu);

// Multi-observable variant: db^2 = nu^{-1} sum_i (d bhat / d<O_i>)^2 Var(O_i).
double error_propagation_multi(const std::vector<double>& destimator_dmean,
                               const std::vector<double>& variances, long nu);

}  // namespace dephasimeter::est

#include "dephasimeter/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dephasimeter/closed_form.hpp"
#include "dephasimeter/parallel.hpp"
#include "dephasimeter/rng.hpp"
#include "json.hpp"

namespace dephasimeter::est {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct ReplicationSummary {
    double mean = 0.0;
    double sd = 0.0;
    long failures = 0;
    long used = 0;
};

ReplicationSummary summarize(const std::vector<double>& estimates) {
    ReplicationSummary s;
    double sum = 0.0;
    for (double e : estimates) {
        if (std::isnan(e)) {
            ++s.failures;
        } else {
            sum += e;
            ++s.used;
        }
    }
    if (s.used == 0) return s;
    s.mean = sum / static_cast<double>(s.used);
    double ss = 0.0;
    for (double e : estimates) {
        if (!std::isnan(e)) ss += (e - s.mean) * (e - s.mean);
    }
    s.sd = s.used > 1 ? std::sqrt(ss / static_cast<double>(s.used - 1)) : 0.0;
    return s;
}

EstimatorResult assemble(const std::vector<double>& estimates, const ProtocolSpec& spec,
                         int observables) {
    const ReplicationSummary s = summarize(estimates);
    EstimatorResult r;
    r.estimate = s.mean;
    r.bias = s.mean - spec.b_true;
    r.bias_se = s.used > 0 ? s.sd / std::sqrt(static_cast<double>(s.used)) : 0.0;
    r.std_dev = s.sd;
    r.std_se = s.used > 1 ? s.sd / std::sqrt(2.0 * static_cast<double>(s.used - 1)) : 0.0;
    r.nu = spec.nu();
    r.total_shots = static_cast<long>(observables) * spec.nu();
    r.total_time = static_cast<double>(observables) * spec.T_total;
    r.replications = static_cast<long>(estimates.size());
    r.failures = s.failures;
    return r;
}

}  // namespace

BornSampler::BornSampler(const dicke::DickeDensity& rho, const dicke::Obs& obs) {
    using Kind = dicke::Obs::Kind;
    if (obs.kind == Kind::SurvivalPhi || obs.kind == Kind::SurvivalPhiPrime) {
        // Two-outcome Bernoulli on the survival eigenvalues +-1.
        const double mean_o = dicke::expect(rho, obs);
        const double p_plus = std::clamp(0.5 * (1.0 + mean_o), 0.0, 1.0);
        values_ = {1.0, -1.0};
        cdf_ = {p_plus, 1.0};
        mean_ = 2.0 * p_plus - 1.0;
        variance_ = std::max(0.0, 1.0 - mean_ * mean_);
        return;
    }
    const dicke::Matrix o = dicke::observable_matrix(obs, rho.J);
    if (o.rows() != rho.mat.rows())
        throw std::invalid_argument("readout dimension does not match the state");
    if ((o - o.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::runtime_error("readout matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<dicke::Matrix> es(o);
    const int dim = static_cast<int>(o.rows());
    values_.resize(dim);
    cdf_.resize(dim);
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
        values_[i] = es.eigenvalues()(i);
        double p = (es.eigenvectors().col(i).adjoint() * rho.mat *
                    es.eigenvectors().col(i)).value().real();
        p = std::max(0.0, p);
        acc += p;
        cdf_[i] = acc;
        mean_ += p * values_[i];
        variance_ += p * values_[i] * values_[i];
    }
    for (double& c : cdf_) c /= acc;
    mean_ /= acc;
    variance_ = std::max(0.0, variance_ / acc - mean_ * mean_);
}

double BornSampler::draw(CounterRng& rng) const {
    const double u = rng.next_unit();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
    return values_[std::min(idx, values_.size() - 1)];
}

SampleStats BornSampler::sample(long nu, CounterRng& rng) const {
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < nu; ++i) {
        const double v = draw(rng);
        sum += v;
        sumsq += v * v;
    }
    SampleStats s;
    s.n = nu;
    s.mean = sum / static_cast<double>(nu);
    s.variance = std::max(0.0, sumsq / static_cast<double>(nu) - s.mean * s.mean);
    return s;
}

SampleStats sample_shots(const dicke::DickeDensity& rho, const dicke::Obs& obs, long nu,
                         std::uint64_t seed) {
    const BornSampler sampler(rho, obs);
    CounterRng rng(seed, 1);
    return sampler.sample(nu, rng);
}

EstimatorResult naive_estimator_css(const ProtocolSpec& spec, double theta,
                                    long replications, std::uint64_t seed, int workers) {
    const int n = spec.n_qubits;
    const double tau = spec.tau;
    const double kappa = spec.noise.at(tau);
    const auto rho0 = dicke::build_initial(dicke::StateSpec::css(n, theta, 0.0));
    dicke::EncodingSpec enc;
    enc.k = 2;
    enc.b = spec.b_true;
    enc.b0 = spec.b0;
    enc.t = tau;
    const auto rho = dicke::propagate(rho0, enc, kappa);
    const BornSampler sampler(rho, dicke::Obs::jy());

    // Monotone inversion window of the noiseless <Jy>(b) relation: the branch
    // condition |b tau (N-1) cos(theta)| < pi/2 shrunk by a safety margin.
    const double alpha_max = 0.98 * 1.5707963267948966 / (n - 1.0);
    const double b_max = std::min(std::atan(std::tan(alpha_max) / std::cos(theta)) / tau,
                                  0.98 * 1.5707963267948966 / tau);
    const auto f_noiseless = [&](double b) {
        return closed_form::css_moments(theta, 0.0, b, tau, 0.0, n).jy;
    };
    const double f_lo = f_noiseless(-b_max);
    const double f_hi = f_noiseless(b_max);

    const long nu = spec.nu();
    std::vector<double> estimates(static_cast<std::size_t>(replications), kNan);
    parallel_for(static_cast<std::size_t>(replications), workers, [&](std::size_t r) {
        CounterRng rng(seed, r);
        const SampleStats s = sampler.sample(nu, rng);
        // f is decreasing in b on the window; reject means outside its range.
        if (s.mean > f_lo || s.mean < f_hi) return;
        double lo = -b_max, hi = b_max;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (f_noiseless(mid) > s.mean) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        estimates[r] = 0.5 * (lo + hi);
    });
    EstimatorResult out = assemble(estimates, spec, 1);
    const double slope0 = closed_form::css_jy_slope(theta, spec.b0, tau, 0.0, n);
    const auto noisy = closed_form::css_moments(theta, 0.0, spec.b_true, tau, kappa, n);
    out.analytic_db = std::sqrt((noisy.jy2 - noisy.jy * noisy.jy) /
                                (static_cast<double>(nu) * slope0 * slope0));
    return out;
}

EstimatorResult ratio_estimator_phi(const ProtocolSpec& spec, long replications,
                                    std::uint64_t seed, int workers) {
    const int n = spec.n_qubits;
    if (n % 2 != 0) throw std::invalid_argument("phi ratio estimator requires even N");
    const double tau = spec.tau;
    const double kappa = spec.noise.at(tau);
    dicke::EncodingSpec enc;
    enc.k = 2;
    enc.b = spec.b_true;
    enc.b0 = spec.b0;
    enc.t = tau;
    const auto rho =
        dicke::propagate(dicke::build_initial(dicke::StateSpec::phi_state(n)), enc, kappa);
    const BornSampler samp_o(rho, dicke::Obs::survival_phi());
    const BornSampler samp_op(rho, dicke::Obs::survival_phi_prime());

    const long nu = spec.nu();
    const double n2tau = static_cast<double>(n) * n * tau;
    std::vector<double> estimates(static_cast<std::size_t>(replications), kNan);
    parallel_for(static_cast<std::size_t>(replications), workers, [&](std::size_t r) {
        CounterRng rng_o(seed, 2 * r);
        CounterRng rng_op(seed, 2 * r + 1);
        const SampleStats so = samp_o.sample(nu, rng_o);
        const SampleStats sop = samp_op.sample(nu, rng_op);
        // Indeterminate phase: both means buried in shot noise.
        if ((so.mean * so.mean + sop.mean * sop.mean) * static_cast<double>(nu) < 9.0)
            return;
        estimates[r] = 4.0 / n2tau * std::atan(sop.mean / so.mean);
    });
    EstimatorResult out = assemble(estimates, spec, 2);
    out.analytic_db = analytic_ratio_phi_db(spec);
    return out;
}

EstimatorResult ratio_estimator_css(const ProtocolSpec& spec, double theta,
                                    long replications, std::uint64_t seed, int workers) {
    const int n = spec.n_qubits;
    const double tau = spec.tau;
    const double kappa = spec.noise.at(tau);
    const auto rho0 = dicke::build_initial(dicke::StateSpec::css(n, theta, 0.0));
    dicke::EncodingSpec enc;
    enc.k = 2;
    enc.b = spec.b_true;
    enc.b0 = spec.b0;
    enc.t = tau;
    const auto rho = dicke::propagate(rho0, enc, kappa);
    const BornSampler samp_x(rho, dicke::Obs::jx());
    const BornSampler samp_y(rho, dicke::Obs::jy());

    const long nu = spec.nu();
    const double norm = (n - 1.0) * std::cos(theta) * tau;
    std::vector<double> estimates(static_cast<std::size_t>(replications), kNan);
    parallel_for(static_cast<std::size_t>(replications), workers, [&](std::size_t r) {
        CounterRng rng_x(seed, 2 * r);
        CounterRng rng_y(seed, 2 * r + 1);
        const SampleStats sx = samp_x.sample(nu, rng_x);
        const SampleStats sy = samp_y.sample(nu, rng_y);
        // Indeterminate ratio: <Jx> consistent with zero.
        if (sx.mean * sx.mean * static_cast<double>(nu) < 9.0 * sx.variance) return;
        // Sign bridge for the e^{+i b t (m^2 - m'^2)} propagator convention.
        estimates[r] = -std::atan(sy.mean / sx.mean) / norm;
    });
    EstimatorResult out = assemble(estimates, spec, 2);
    out.analytic_db = analytic_ratio_css_db(spec, theta);
    return out;
}

double analytic_ratio_phi_db(const ProtocolSpec& spec) {
    const double n = spec.n_qubits;
    const double J = 0.5 * n;
    const double kappa = spec.noise.at(spec.tau);
    const double phase = J * J * spec.b_true * spec.tau;
    const double decay = std::exp(-J * J * kappa);
    const double u1 = decay * std::cos(phase);
    const double u2 = decay * std::sin(phase);
    const double denom = u1 * u1 + u2 * u2;
    const double pre = 4.0 / (n * n * spec.tau);
    const std::vector<double> d = {-pre * u2 / denom, pre * u1 / denom};
    const std::vector<double> v = {1.0 - u1 * u1, 1.0 - u2 * u2};
    return error_propagation_multi(d, v, spec.nu());
}

double analytic_ratio_css_db(const ProtocolSpec& spec, double theta) {
    const double n = spec.n_qubits;
    const double kappa = spec.noise.at(spec.tau);
    const auto m =
        closed_form::css_moments(theta, 0.0, spec.b_true, spec.tau, kappa, n);
    const double denom = m.jx * m.jx + m.jy * m.jy;
    const double pre = 1.0 / ((n - 1.0) * std::cos(theta) * spec.tau);
    const std::vector<double> d = {pre * m.jy / denom, -pre * m.jx / denom};
    const std::vector<double> v = {m.jx2 - m.jx * m.jx, m.jy2 - m.jy * m.jy};
    return error_propagation_multi(d, v, spec.nu());
}

double error_propagation(const MomentPair& m, double sensitivity, long nu) {
    if (std::abs(sensitivity) < 1e-300)
        throw std::domain_error("error propagation with zero sensitivity");
    const double var = m.second_moment - m.mean * m.mean;
    return std::sqrt(std::max(0.0, var) /
                     (static_cast<double>(nu) * sensitivity * sensitivity));
}

double error_propagation_multi(const std::vector<double>& destimator_dmean,
                               const std::vector<double>& variances, long nu) {
    if (destimator_dmean.size() != variances.size())
        throw std::invalid_argument("error_propagation_multi: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < variances.size(); ++i) {
        acc += destimator_dmean[i] * destimator_dmean[i] * variances[i];
    }
    return std::sqrt(acc / static_cast<double>(nu));
}

std::string EstimatorResult::to_json() const {
    nlohmann::json j;
    j["estimate"] = estimate;
    j["bias"] = bias;
    j["bias_se"] = bias_se;
    j["std"] = std_dev;
    j["std_se"] = std_se;
    j["analytic_db"] = analytic_db;
    j["nu"] = nu;
    j["total_shots"] = total_shots;
    j["total_time"] = total_time;
    j["replications"] = replications;
    j["failures"] = failures;
    return j.dump();
}

}  // namespace dephasimeter::est

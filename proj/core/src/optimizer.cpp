#include "dephasimeter/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dephasimeter/closed_form.hpp"
#include "dephasimeter/dicke.hpp"
#include "dephasimeter/minimize.hpp"
#include "json.hpp"

namespace dephasimeter::opt {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kThetaMargin = 1e-3;

double sq(double x) { return x * x; }

noise::DecayCoefficient decay_for(NoiseRegime regime, const NoiseParams& p) {
    switch (regime) {
        case NoiseRegime::Noiseless:
            return noise::DecayCoefficient::markovian(0.0);
        case NoiseRegime::Markovian:
            return noise::DecayCoefficient::markovian(p.gamma);
        case NoiseRegime::Zeno:
            return noise::DecayCoefficient::zeno(p.kappa0, p.omega_c);
    }
    throw std::logic_error("unreachable regime");
}

// Moment-method CSS uncertainty at (tau, theta) through the exact closed form.
double css_db(double theta, double tau, double n, double T,
              const noise::DecayCoefficient& dec) {
    return closed_form::css_noisy_uncertainty(theta, tau, dec.at(tau), n, T).db;
}

// Same quantity evaluated entirely through the Dicke engine (moments and the
// analytic b-derivative of <Jy>), used by the ExactDicke path.
double css_db_engine(double theta, double tau, int n, double T,
                     const noise::DecayCoefficient& dec) {
    const double kappa = dec.at(tau);
    const auto rho0 = dicke::build_initial(dicke::StateSpec::css(n, theta, 0.0));
    dicke::EncodingSpec enc;
    enc.k = 2;
    enc.b = 0.0;
    enc.b0 = 0.0;
    enc.t = tau;
    const auto rho = dicke::propagate(rho0, enc, kappa);
    const double var = dicke::expect(rho, dicke::Obs::jy2()) -
                       sq(dicke::expect(rho, dicke::Obs::jy()));
    // d<Jy>/db from the analytic propagator derivative i t (m^2 - m'^2) rho.
    const dicke::Matrix jy = dicke::jy_matrix(rho.J);
    const int dim = rho.dim();
    std::complex<double> acc{0.0, 0.0};
    for (int r = 0; r < dim; ++r) {
        const double mr = rho.J - r;
        for (int c = 0; c < dim; ++c) {
            const double mc = rho.J - c;
            const std::complex<double> drho =
                std::complex<double>(0.0, tau * (mr * mr - mc * mc)) * rho.mat(r, c);
            acc += drho * jy(c, r);
        }
    }
    const double slope = acc.real();
    const double nu = T / tau;
    return std::sqrt(var / (nu * sq(slope)));
}

ProtocolPoint optimize_css_moment(double n, double T, const noise::DecayCoefficient& dec,
                                  NoiseRegime regime, const NoiseParams& np, bool engine) {
    const double J = 0.5 * n;
    double tau_lo, tau_hi;
    if (regime == NoiseRegime::Markovian) {
        tau_lo = 1e-4 / (np.gamma * J);
        tau_hi = 10.0 / np.gamma;
    } else {
        const double c = np.kappa0 * np.omega_c;
        tau_lo = 1e-4 / (c * std::sqrt(J));
        tau_hi = 2e3 / (c * std::sqrt(J));
    }
    const auto db_at = [&](double theta, double tau) {
        return engine ? css_db_engine(theta, tau, static_cast<int>(std::lround(n)), T, dec)
                      : css_db(theta, tau, n, T, dec);
    };
    const auto best_tau = [&](double theta) {
        return golden_min([&](double tau) { return db_at(theta, tau); }, tau_lo, tau_hi,
                          1e-8, 64, true);
    };
    const auto outer = golden_min([&](double theta) { return best_tau(theta).f; },
                                  kThetaMargin, 0.5 * kPi - kThetaMargin, 1e-7, 64);
    const auto inner = best_tau(outer.x);
    ProtocolPoint pt;
    pt.n = n;
    pt.theta_opt = outer.x;
    pt.tau_opt = inner.x;
    pt.db_opt = inner.f;
    pt.boundary = inner.at_lower || inner.at_upper;
    return pt;
}

ProtocolPoint optimize_phi(double n, double T, NoiseRegime regime, const NoiseParams& np) {
    const double J = 0.5 * n;
    const auto dec = decay_for(regime, np);
    const auto db_at = [&](double tau) {
        return closed_form::phi_uncertainty(tau, dec.at(tau), J, T,
                                            0.5 * kPi / (J * J * tau))
            .qcrb;
    };
    double tau_lo, tau_hi;
    if (regime == NoiseRegime::Markovian) {
        tau_lo = 1e-3 / (np.gamma * J * J);
        tau_hi = 1e3 / (np.gamma * J * J);
    } else {
        const double c = np.kappa0 * np.omega_c;
        tau_lo = 1e-3 / (c * J);
        tau_hi = 1e3 / (c * J);
    }
    const auto best = golden_min(db_at, tau_lo, tau_hi, 1e-8, 64, true);
    ProtocolPoint pt;
    pt.n = n;
    pt.tau_opt = best.x;
    pt.db_opt = best.f;
    pt.boundary = best.at_lower || best.at_upper;
    return pt;
}

ProtocolPoint oats_gaussian_point(StateFamily family, double n, double T,
                                  NoiseRegime regime, const NoiseParams& np,
                                  double tau_ref) {
    const double J = 0.5 * n;
    const auto op = oats_params(family, J);
    ProtocolPoint pt;
    pt.n = n;
    switch (regime) {
        case NoiseRegime::Zeno: {
            const auto res = hp::optimal_protocol_zeno(op.mu, op.beta, J, T, np.kappa0,
                                                       np.omega_c);
            pt.tau_opt = res.tau;
            pt.theta_opt = res.theta;
            pt.db_opt = res.db;
            pt.valid = res.validity.level != hp::ValidityReport::Level::Invalid;
            break;
        }
        case NoiseRegime::Markovian: {
            const auto res = hp::optimal_protocol_numeric(
                op.mu, op.beta, J, T, noise::DecayCoefficient::markovian(np.gamma));
            pt.tau_opt = res.tau;
            pt.theta_opt = res.theta;
            pt.db_opt = res.db;
            pt.valid = res.validity.level != hp::ValidityReport::Level::Invalid;
            pt.boundary = res.boundary;
            break;
        }
        case NoiseRegime::Noiseless: {
            const double theta = 0.25 * kPi;
            const auto gs = hp::from_oats(op.mu, op.beta, J, theta, 0.0);
            pt.tau_opt = tau_ref;
            pt.theta_opt = theta;
            pt.db_opt = 1.0 / std::sqrt(hp::qfi(gs, tau_ref, T).total);
            pt.valid = hp::validity(gs, 0.0).level != hp::ValidityReport::Level::Invalid;
            break;
        }
    }
    return pt;
}

}  // namespace

std::string to_string(StateFamily s) {
    switch (s) {
        case StateFamily::Css: return "css";
        case StateFamily::KuOats: return "ku_oats";
        case StateFamily::PeOats: return "pe_oats";
        case StateFamily::Phi: return "phi";
    }
    return "?";
}

std::string to_string(NoiseRegime r) {
    switch (r) {
        case NoiseRegime::Noiseless: return "noiseless";
        case NoiseRegime::Markovian: return "markovian";
        case NoiseRegime::Zeno: return "zeno";
    }
    return "?";
}

std::string to_string(Path p) {
    switch (p) {
        case Path::ClosedForm: return "closed_form";
        case Path::GaussianHP: return "gaussian_hp";
        case Path::ExactDicke: return "exact_dicke";
    }
    return "?";
}

OatsParams oats_params(StateFamily family, double J) {
    OatsParams p;
    switch (family) {
        case StateFamily::Css:
            p.mu = 0.0;
            p.beta = 0.0;
            break;
        case StateFamily::KuOats:
            p.mu = std::pow(12.0, 1.0 / 6.0) * std::pow(J, -2.0 / 3.0);
            p.beta = 0.5 * kPi - std::pow(3.0, -1.0 / 6.0) * std::pow(2.0, -1.0 / 3.0) *
                                     std::pow(J, -1.0 / 3.0);
            break;
        case StateFamily::PeOats:
            p.mu = 1.0 / std::sqrt(2.0 * J);
            p.beta = -0.5 * kPi;
            break;
        case StateFamily::Phi:
            throw std::invalid_argument("Phi state has no OATS parameters");
    }
    return p;
}

void SweepPlan::validate() const {
    if (n_values.size() < 2) throw std::invalid_argument("sweep needs at least two N values");
    for (std::size_t i = 1; i < n_values.size(); ++i) {
        if (!(n_values[i] > n_values[i - 1]))
            throw std::invalid_argument("N grid must be strictly increasing");
    }
    if (!(T > 0.0) || !(tau_ref > 0.0))
        throw std::invalid_argument("sweep bounds must be positive");
    if (path == Path::ExactDicke && n_values.back() > 512.0)
        throw std::invalid_argument("ExactDicke path is capped at N <= 512");
    if (state == StateFamily::Phi && path != Path::ClosedForm)
        throw std::invalid_argument("Phi protocols use the ClosedForm path");
    if ((state == StateFamily::KuOats || state == StateFamily::PeOats) &&
        path == Path::ClosedForm)
        throw std::invalid_argument("OATS protocols use GaussianHP or ExactDicke");
}

ProtocolPoint optimize_protocol(StateFamily state, NoiseRegime regime, double n_qubits,
                                double T, Path path, const NoiseParams& np, double tau_ref) {
    const auto dec = decay_for(regime, np);
    switch (state) {
        case StateFamily::Css: {
            if (path == Path::GaussianHP) {
                const auto res =
                    regime == NoiseRegime::Zeno
                        ? hp::optimal_protocol_zeno(0.0, 0.0, 0.5 * n_qubits, T, np.kappa0,
                                                    np.omega_c)
                        : hp::optimal_protocol_numeric(0.0, 0.0, 0.5 * n_qubits, T, dec);
                ProtocolPoint pt;
                pt.n = n_qubits;
                pt.tau_opt = res.tau;
                pt.theta_opt = res.theta;
                pt.db_opt = res.db;
                pt.valid = res.validity.level != hp::ValidityReport::Level::Invalid;
                pt.boundary = res.boundary;
                return pt;
            }
            if (regime == NoiseRegime::Noiseless) {
                // Moment-method optimum sits at theta = pi/4 for every N; no
                // finite optimal time, so report at tau_ref.
                ProtocolPoint pt;
                pt.n = n_qubits;
                pt.theta_opt = 0.25 * kPi;
                pt.tau_opt = tau_ref;
                pt.db_opt = path == Path::ExactDicke
                                ? css_db_engine(pt.theta_opt, tau_ref,
                                                static_cast<int>(std::lround(n_qubits)), T, dec)
                                : css_db(pt.theta_opt, tau_ref, n_qubits, T, dec);
                return pt;
            }
            return optimize_css_moment(n_qubits, T, dec, regime, np,
                                       path == Path::ExactDicke);
        }
        case StateFamily::Phi: {
            if (path != Path::ClosedForm)
                throw std::invalid_argument("Phi protocols use the ClosedForm path");
            if (regime == NoiseRegime::Noiseless) {
                ProtocolPoint pt;
                pt.n = n_qubits;
                pt.tau_opt = tau_ref;
                const double J = 0.5 * n_qubits;
                pt.db_opt = 1.0 / (std::sqrt(T * tau_ref) * J * J);
                return pt;
            }
            return optimize_phi(n_qubits, T, regime, np);
        }
        case StateFamily::KuOats:
        case StateFamily::PeOats: {
            if (path == Path::ClosedForm)
                throw std::invalid_argument("OATS protocols use GaussianHP or ExactDicke");
            if (path == Path::ExactDicke)
                throw std::invalid_argument(
                    "ExactDicke OATS optimization is exposed through the test oracles only");
            return oats_gaussian_point(state, n_qubits, T, regime, np, tau_ref);
        }
    }
    throw std::logic_error("unreachable state family");
}

ProtocolPoint optimize_protocol_theta_fixed(StateFamily state, NoiseRegime regime,
                                            double n_qubits, double T, Path path,
                                            const NoiseParams& np, double theta,
                                            double tau_ref) {
    const auto dec = decay_for(regime, np);
    const double J = 0.5 * n_qubits;
    ProtocolPoint pt;
    pt.n = n_qubits;
    pt.theta_opt = theta;
    if (state == StateFamily::Css && path != Path::GaussianHP) {
        if (regime == NoiseRegime::Noiseless) {
            pt.tau_opt = tau_ref;
            pt.db_opt = css_db(theta, tau_ref, n_qubits, T, dec);
            return pt;
        }
        double tau_lo, tau_hi;
        if (regime == NoiseRegime::Markovian) {
            tau_lo = 1e-4 / (np.gamma * J);
            tau_hi = 10.0 / np.gamma;
        } else {
            const double c = np.kappa0 * np.omega_c;
            tau_lo = 1e-4 / (c * std::sqrt(J));
            tau_hi = 2e3 / (c * std::sqrt(J));
        }
        const auto best = golden_min(
            [&](double tau) { return css_db(theta, tau, n_qubits, T, dec); }, tau_lo, tau_hi,
            1e-8, 64, true);
        pt.tau_opt = best.x;
        pt.db_opt = best.f;
        pt.boundary = best.at_lower || best.at_upper;
        return pt;
    }
    // Gaussian path at fixed angle (any OATS family incl. CSS).
    const auto op = state == StateFamily::Css ? OatsParams{0.0, 0.0}
                                              : oats_params(state, J);
    if (regime == NoiseRegime::Noiseless) {
        const auto gs = hp::from_oats(op.mu, op.beta, J, theta, 0.0);
        pt.tau_opt = tau_ref;
        pt.db_opt = 1.0 / std::sqrt(hp::qfi(gs, tau_ref, T).total);
        pt.valid = hp::validity(gs, 0.0).level != hp::ValidityReport::Level::Invalid;
        return pt;
    }
    const auto probe = hp::from_oats(op.mu, op.beta, J, theta, 0.0);
    double tau_lo, tau_hi;
    if (regime == NoiseRegime::Markovian) {
        tau_lo = 1e-6 / (np.gamma * J * probe.delta);
        tau_hi = 2000.0 / (np.gamma * J * probe.delta);
    } else {
        const double c = np.kappa0 * np.omega_c;
        tau_lo = 1e-4 / (c * std::sqrt(J * probe.delta));
        tau_hi = 10.0 / (c * std::sqrt(J * probe.delta));
    }
    const auto best = golden_min(
        [&](double tau) {
            const auto gs = hp::from_oats(op.mu, op.beta, J, theta, dec.at(tau));
            return 1.0 / std::sqrt(hp::qfi(gs, tau, T).total);
        },
        tau_lo, tau_hi, 1e-8, 64, true);
    pt.tau_opt = best.x;
    pt.db_opt = best.f;
    pt.boundary = best.at_lower || best.at_upper;
    const double kap = dec.at(pt.tau_opt);
    pt.valid = hp::validity(hp::from_oats(op.mu, op.beta, J, theta, kap), kap).level !=
               hp::ValidityReport::Level::Invalid;
    return pt;
}

std::vector<ProtocolPoint> run_sweep(const SweepPlan& plan) {
    plan.validate();
    std::vector<ProtocolPoint> out;
    out.reserve(plan.n_values.size());
    for (double n : plan.n_values) {
        out.push_back(optimize_protocol(plan.state, plan.regime, n, plan.T, plan.path,
                                        plan.noise, plan.tau_ref));
    }
    return out;
}

ScalingFit fit_scaling(const std::vector<ProtocolPoint>& points, const FitPolicy& policy) {
    std::vector<std::pair<double, double>> kept;
    double n_min = 1e300;
    for (const auto& p : points) n_min = std::min(n_min, p.n);
    for (const auto& p : points) {
        if (policy.exclude_smallest_decade && p.n < 10.0 * n_min) continue;
        kept.emplace_back(std::log(p.n), std::log(p.db_opt));
    }
    if (static_cast<int>(kept.size()) < policy.min_points) {
        throw FitSpanError("scaling fit needs at least " + std::to_string(policy.min_points) +
                           " points after excluding the smallest decade; got " +
                           std::to_string(kept.size()));
    }
    const double span =
        (kept.back().first - kept.front().first) / std::log(10.0);
    if (span < policy.min_decades) {
        throw FitSpanError("scaling fit needs at least " + std::to_string(policy.min_decades) +
                           " decades of N; got " + std::to_string(span));
    }
    const auto k = static_cast<double>(kept.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : kept) {
        sx += x;
        sy += y;
    }
    const double mx = sx / k, my = sy / k;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : kept) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    ScalingFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : kept) {
        const double r = y - (intercept + fit.exponent * x);
        ss_res += r * r;
    }
    const double sigma2 = kept.size() > 2 ? ss_res / (k - 2.0) : 0.0;
    fit.exponent_se = std::sqrt(sigma2 / sxx);
    fit.points_used = static_cast<int>(kept.size());
    fit.n_min_used = std::exp(kept.front().first);
    fit.n_max_used = std::exp(kept.back().first);
    const double x_max = kept.back().first;
    fit.prefactor = std::exp(kept.back().second - fit.exponent * x_max);
    const double var_pred = sigma2 * (1.0 / k + sq(x_max - mx) / sxx);
    fit.prefactor_se = fit.prefactor * std::sqrt(var_pred);
    for (const auto& [x, y] : kept) {
        const double model = intercept + fit.exponent * x;
        fit.max_rel_residual =
            std::max(fit.max_rel_residual, std::abs(std::expm1(y - model)));
    }
    return fit;
}

namespace {

struct PaperRef {
    double exponent;
    double prefactor;
};

// Printed asymptotic constants in N units per regime unit
// ((kappa0 w_c / T)^(1/2), (gamma / T)^(1/2), (1 / tau T)^(1/2)).
PaperRef paper_ref(StateFamily s, NoiseRegime r) {
    const double e14 = std::exp(0.25);
    switch (r) {
        case NoiseRegime::Zeno:
            switch (s) {
                case StateFamily::Css: return {-1.25, std::sqrt(6.0 * std::sqrt(3.0))};
                case StateFamily::KuOats:
                    return {-17.0 / 12.0, std::pow(2.0, -0.25) * std::pow(3.0, 2.0 / 3.0)};
                case StateFamily::PeOats:
                    return {-1.5, std::pow(3.0, 1.25) / std::pow(2.0, 0.75)};
                case StateFamily::Phi: return {-1.5, 4.0 * e14};
            }
            break;
        case NoiseRegime::Markovian:
            if (s == StateFamily::Phi) return {-1.0, 2.0 * std::sqrt(2.0 * std::exp(1.0))};
            return {-1.0, 2.0};
        case NoiseRegime::Noiseless:
            switch (s) {
                case StateFamily::Css: return {-1.5, 2.0};
                case StateFamily::PeOats: return {-2.0, 4.0};
                case StateFamily::Phi: return {-2.0, 4.0};
                case StateFamily::KuOats: return {0.0, 0.0};
            }
            break;
    }
    return {0.0, 0.0};
}

double regime_unit(NoiseRegime r, double T, double kappa0, double omega_c, double gamma,
                   double tau_ref) {
    switch (r) {
        case NoiseRegime::Zeno: return std::sqrt(kappa0 * omega_c / T);
        case NoiseRegime::Markovian: return std::sqrt(gamma / T);
        case NoiseRegime::Noiseless: return std::sqrt(1.0 / (tau_ref * T));
    }
    return 1.0;
}

}  // namespace

Table1 table1(double T, double kappa0, double omega_c, double gamma) {
    Table1 tab;
    tab.T = T;
    tab.kappa0 = kappa0;
    tab.omega_c = omega_c;
    tab.gamma = gamma;
    NoiseParams np;
    np.gamma = gamma;
    np.kappa0 = kappa0;
    np.omega_c = omega_c;
    const double tau_ref = 1.0;

    std::vector<double> grid;
    for (int e = 6; e <= 16; ++e) grid.push_back(std::pow(2.0, e));
    const double n_ref = tab.n_reference;

    const StateFamily states[] = {StateFamily::Css, StateFamily::KuOats,
                                  StateFamily::PeOats, StateFamily::Phi};
    const NoiseRegime regimes[] = {NoiseRegime::Zeno, NoiseRegime::Markovian,
                                   NoiseRegime::Noiseless};
    for (const auto s : states) {
        for (const auto r : regimes) {
            Table1Cell cell;
            cell.state = to_string(s);
            cell.regime = to_string(r);
            if (s == StateFamily::KuOats && r == NoiseRegime::Noiseless) {
                cell.available = false;
                tab.cells.push_back(cell);
                continue;
            }
            const Path path = (s == StateFamily::KuOats || s == StateFamily::PeOats)
                                  ? Path::GaussianHP
                                  : Path::ClosedForm;
            SweepPlan plan;
            plan.n_values = grid;
            plan.state = s;
            plan.regime = r;
            plan.path = path;
            plan.T = T;
            plan.tau_ref = tau_ref;
            plan.noise = np;

            std::vector<ProtocolPoint> pts;
            const bool markov_oats =
                r == NoiseRegime::Markovian &&
                (s == StateFamily::KuOats || s == StateFamily::PeOats);
            for (double n : grid) {
                // Markovian OATS rows: theta fixed at pi/4 (see the open point on
                // Table-1's Markovian convention; the theta-optimized variant is
                // reported in the cell note).
                pts.push_back(markov_oats
                                  ? optimize_protocol_theta_fixed(s, r, n, T, path, np,
                                                                  0.25 * kPi, tau_ref)
                                  : optimize_protocol(s, r, n, T, path, np, tau_ref));
            }
            const ScalingFit fit = fit_scaling(pts);
            const PaperRef ref = paper_ref(s, r);
            cell.exponent_fit = fit.exponent;
            cell.exponent_se = fit.exponent_se;
            ProtocolPoint at_ref =
                markov_oats ? optimize_protocol_theta_fixed(s, r, n_ref, T, path, np,
                                                            0.25 * kPi, tau_ref)
                            : optimize_protocol(s, r, n_ref, T, path, np, tau_ref);
            const double unit = regime_unit(r, T, kappa0, omega_c, gamma, tau_ref);
            cell.prefactor_fit =
                at_ref.db_opt / (unit * std::pow(n_ref, ref.exponent));
            cell.paper_exponent = ref.exponent;
            cell.paper_prefactor = ref.prefactor;
            cell.agreement = cell.prefactor_fit / ref.prefactor;
            cell.flagged = std::abs(cell.agreement - 1.0) > 0.10;
            if (s == StateFamily::Css && r == NoiseRegime::Markovian) {
                const auto fixed = optimize_protocol_theta_fixed(
                    s, r, n_ref, T, Path::ClosedForm, np, 0.25 * kPi, tau_ref);
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "theta-fixed pi/4 prefactor %.4f; theta-optimized %.4f",
                              fixed.db_opt / (unit * std::pow(n_ref, ref.exponent)),
                              cell.prefactor_fit);
                cell.note = buf;
                // The printed 2 N^-1 matches the theta-fixed protocol; score the
                // cell against that convention and keep both values visible.
                cell.prefactor_fit = fixed.db_opt / (unit * std::pow(n_ref, ref.exponent));
                cell.agreement = cell.prefactor_fit / ref.prefactor;
                cell.flagged = std::abs(cell.agreement - 1.0) > 0.10;
            }
            if (markov_oats) {
                const auto free_opt = optimize_protocol(s, r, n_ref, T, path, np, tau_ref);
                char buf[120];
                std::snprintf(buf, sizeof(buf), "theta-optimized variant: prefactor %.4f",
                              free_opt.db_opt / (unit * std::pow(n_ref, ref.exponent)));
                cell.note = buf;
            }
            tab.cells.push_back(cell);
        }
    }

    // Known printed-constant tensions, emitted as data.
    const double J_ref = 0.5 * n_ref;
    tab.discrepancies.push_back(
        {"css_zeno_prefactor",
         "Zeno CSS constant: table prints (6 sqrt 3)^(1/2) = 108^(1/4) N^(-5/4) while the "
         "time-and-angle-optimized closed form gives (3^(3/4)/2) J^(-5/4) = 54^(1/4) "
         "N^(-5/4); numerics side with the latter",
         std::sqrt(6.0 * std::sqrt(3.0)), std::pow(54.0, 0.25)});
    tab.discrepancies.push_back(
        {"css_markovian_theta_convention",
         "Markovian CSS: 2 N^(-1) corresponds to theta fixed at pi/4; free-angle "
         "optimization reaches (1/sqrt2)(gamma/T)^(1/2) J^(-1) = sqrt(2) N^(-1)",
         2.0, std::sqrt(2.0)});
    {
        const auto u = closed_form::css_noisy_uncertainty(0.6, 1.0, 0.2, 64.0, 1.0);
        tab.discrepancies.push_back(
            {"css_noisy_uncertainty_printed",
             "printed general-angle Jy uncertainty disagrees with the moment-derived form "
             "(its kappa->0 limit misses the noiseless result); values at theta=0.6, "
             "kappa=0.2, N=64, T=tau=1",
             u.db_printed, u.db});
    }
    {
        const auto q = closed_form::css_qfi_noiseless(0.6, 16.0, 1.0, 1.0);
        tab.discrepancies.push_back(
            {"css_qfi_noiseless_sin_power",
             "printed noiseless CSS QFI carries sin(theta); the variance oracle requires "
             "sin^2(theta); values at theta=0.6, N=16, T=tau=1",
             q.printed, q.corrected});
    }
    {
        const auto pe = optimize_protocol_theta_fixed(StateFamily::PeOats,
                                                      NoiseRegime::Noiseless, n_ref, T,
                                                      Path::GaussianHP, np, 0.25 * kPi,
                                                      tau_ref);
        const double unit = regime_unit(NoiseRegime::Noiseless, T, kappa0, omega_c, gamma,
                                        tau_ref);
        tab.discrepancies.push_back(
            {"pe_noiseless_prefactor",
             "noiseless PE entry 4 N^(-2) is not reproduced by the Gaussian QFI at any "
             "natural angle (value below evaluated at theta = pi/4)",
             4.0, pe.db_opt / (unit * std::pow(n_ref, -2.0))});
    }
    tab.discrepancies.push_back(
        {"phi_ratio_variance_constant",
         "ratio-estimator variance for Phi: error propagation gives 16 e^(N^2 k/2) + "
         "4 cos(N^2 b0 tau) - 4 over N^4 T tau; the text prints -1 for the last term "
         "(identical at the operating point cos = 1)",
         -1.0, -4.0});
    tab.discrepancies.push_back(
        {"zeno_oats_prefactor_units",
         "the optimal-OATS bound (3 sqrt3/4)^(1/2) (k0 wc/T)^(1/2) delta^(-1/4) is an "
         "N^(-5/4) formula only in J units; CSS check: printed constant vs the same "
         "constant times 2^(5/4)",
         std::sqrt(3.0 * std::sqrt(3.0) / 4.0),
         std::sqrt(3.0 * std::sqrt(3.0) / 4.0) * std::pow(2.0, 1.25)});
    (void)J_ref;
    return tab;
}

std::string table1_json(const Table1& t) {
    nlohmann::json j;
    j["T"] = t.T;
    j["kappa0"] = t.kappa0;
    j["omega_c"] = t.omega_c;
    j["gamma"] = t.gamma;
    j["n_reference"] = t.n_reference;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : t.cells) {
        nlohmann::json jc;
        jc["state"] = c.state;
        jc["regime"] = c.regime;
        jc["available"] = c.available;
        if (c.available) {
            jc["exponent_fit"] = c.exponent_fit;
            jc["exponent_se"] = c.exponent_se;
            jc["prefactor_fit"] = c.prefactor_fit;
            jc["paper_exponent"] = c.paper_exponent;
            jc["paper_prefactor"] = c.paper_prefactor;
            jc["agreement"] = c.agreement;
            jc["flagged"] = c.flagged;
            if (!c.note.empty()) jc["note"] = c.note;
        }
        j["cells"].push_back(jc);
    }
    j["discrepancies"] = nlohmann::json::array();
    for (const auto& d : t.discrepancies) {
        nlohmann::json jd;
        jd["id"] = d.id;
        jd["description"] = d.description;
        jd["printed"] = d.printed;
        jd["computed"] = d.computed;
        j["discrepancies"].push_back(jd);
    }
    return j.dump(2);
}

std::string table1_csv(const Table1& t) {
    std::string out =
        "state,regime,available,exponent_fit,exponent_se,prefactor_fit,paper_exponent,"
        "paper_prefactor,agreement,flagged\n";
    char buf[512];
    for (const auto& c : t.cells) {
        if (!c.available) {
            std::snprintf(buf, sizeof(buf), "%s,%s,0,,,,,,,\n", c.state.c_str(),
                          c.regime.c_str());
            out += buf;
            continue;
        }
        std::snprintf(buf, sizeof(buf), "%s,%s,1,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      c.state.c_str(), c.regime.c_str(), c.exponent_fit, c.exponent_se,
                      c.prefactor_fit, c.paper_exponent, c.paper_prefactor, c.agreement,
                      c.flagged ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace dephasimeter::opt

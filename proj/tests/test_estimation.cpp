#include <cmath>

#include "dephasimeter/closed_form.hpp"
#include "dephasimeter/estimation.hpp"
#include "doctest.h"

using namespace dephasimeter;
namespace est = dephasimeter::est;
namespace cf = dephasimeter::closed_form;

namespace {

constexpr double kPi = 3.14159265358979323846;

est::ProtocolSpec base_spec(int n, double b_true, double tau, long nu, double kappa) {
    est::ProtocolSpec s;
    s.n_qubits = n;
    s.b_true = b_true;
    s.b0 = 0.0;
    s.tau = tau;
    s.T_total = tau * static_cast<double>(nu);
    // constant-kappa protocols enter through a Markovian coefficient
    s.noise = noise::DecayCoefficient::markovian(kappa / tau);
    return s;
}

}  // namespace

TEST_CASE("sampling an eigenstate of the readout has zero variance") {
    const auto rho = dicke::build_initial(dicke::StateSpec::css(6, 0.0, 0.0));
    const auto stats = est::sample_shots(rho, dicke::Obs::jz(), 500, 7);
    CHECK(stats.mean == doctest::Approx(3.0));
    CHECK(stats.variance == doctest::Approx(0.0));
}

TEST_CASE("shot sampling is deterministic in the seed") {
    const auto rho = dicke::build_initial(dicke::StateSpec::css(8, 0.6, 0.0));
    const auto a = est::sample_shots(rho, dicke::Obs::jy(), 1000, 5);
    const auto b = est::sample_shots(rho, dicke::Obs::jy(), 1000, 5);
    const auto c = est::sample_shots(rho, dicke::Obs::jy(), 1000, 6);
    CHECK(a.mean == b.mean);
    CHECK(a.mean != c.mean);
}

TEST_CASE("survival sampling converges to the Born expectation") {
    const int n = 8;
    const double J = 4.0, b = 0.02, tau = 1.0, kappa = 0.05;
    const auto rho = dicke::propagate(dicke::build_initial(dicke::StateSpec::phi_state(n)),
                                      {2, b, 0.0, tau}, kappa);
    const auto stats = est::sample_shots(rho, dicke::Obs::survival_phi(), 1'000'000, 11);
    const double expected = std::exp(-J * J * kappa) * std::cos(J * J * b * tau);
    const double se = std::sqrt(stats.variance / static_cast<double>(stats.n));
    CHECK(std::abs(stats.mean - expected) < 4.0 * se);
}

TEST_CASE("Jy sample variance matches the closed-form moments") {
    const int n = 8;
    const double theta = 0.25 * kPi, b = 0.01, tau = 1.0, kappa = 0.1;
    const auto rho = dicke::propagate(
        dicke::build_initial(dicke::StateSpec::css(n, theta, 0.0)), {2, b, 0.0, tau}, kappa);
    const auto stats = est::sample_shots(rho, dicke::Obs::jy(), 100'000, 3);
    const auto m = cf::css_moments(theta, 0.0, b, tau, kappa, n);
    CHECK(std::abs(stats.variance - (m.jy2 - m.jy * m.jy)) / (m.jy2 - m.jy * m.jy) < 0.05);
}

TEST_CASE("naive moment-method estimator") {
    SUBCASE("unbiased without noise") {
        auto spec = base_spec(8, 0.02, 1.0, 4000, 0.0);
        const auto res = est::naive_estimator_css(spec, 0.25 * kPi, 300, 21);
        CHECK(res.failures == 0);
        CHECK(std::abs(res.bias) < 3.0 * res.bias_se);
    }
    SUBCASE("detects the dephasing-induced bias") {
        auto spec = base_spec(8, 0.02, 1.0, 10000, 0.1);
        const auto res = est::naive_estimator_css(spec, 0.25 * kPi, 300, 22);
        CHECK(std::abs(res.bias) > 5.0 * res.bias_se);
        // leading-order bias is (e^{-kappa} - 1) b_true
        CHECK(res.bias < 0.0);
        CHECK(res.bias ==
              doctest::Approx((std::exp(-0.1) - 1.0) * spec.b_true).epsilon(0.25));
    }
    SUBCASE("bias shrinks monotonically as kappa -> 0") {
        double prev = 1e300;
        for (const double kappa : {0.2, 0.1, 0.05, 0.0}) {
            auto spec = base_spec(8, 0.02, 1.0, 20000, kappa);
            const auto res = est::naive_estimator_css(spec, 0.25 * kPi, 200, 23);
            CHECK(std::abs(res.bias) < prev + 2.0 * res.bias_se);
            prev = std::abs(res.bias);
        }
    }
}

TEST_CASE("phi ratio estimator") {
    SUBCASE("exact means invert exactly") {
        const int n = 6;
        const double J = 3.0, b = 0.004, tau = 1.0, kappa = 0.3;
        const double decay = std::exp(-J * J * kappa);
        const double mo = decay * std::cos(J * J * b * tau);
        const double mop = decay * std::sin(J * J * b * tau);
        const double bhat = 4.0 / (n * n * tau) * std::atan(mop / mo);
        CHECK(bhat == doctest::Approx(b).epsilon(1e-14));
    }
    SUBCASE("asymptotically unbiased under dephasing") {
        auto spec = base_spec(4, 1e-3, 1.0, 10000, 0.2);
        const auto res = est::ratio_estimator_phi(spec, 400, 31);
        CHECK(res.failures == 0);
        CHECK(std::abs(res.bias) < 3.0 * res.bias_se);
        CHECK(res.total_shots == 2 * res.nu);
        CHECK(res.total_time == doctest::Approx(2.0 * spec.T_total));
    }
    SUBCASE("empirical spread matches the error-propagation variance") {
        auto spec = base_spec(8, 1e-3, 1.0, 10000, 0.1);
        const auto res = est::ratio_estimator_phi(spec, 600, 32);
        CHECK(std::abs(res.std_dev - res.analytic_db) / res.analytic_db < 0.05);
        // at b0 = 0 the operating point is optimal and the analytic variance
        // reduces to 16 e^{N^2 kappa / 2} / (N^4 T tau)
        const double n4 = std::pow(8.0, 4);
        const double printed = std::sqrt(
            16.0 * std::exp(64.0 * 0.1 / 2.0) / (n4 * spec.T_total * spec.tau));
        CHECK(res.analytic_db == doctest::Approx(printed).epsilon(1e-10));
    }
}

TEST_CASE("css ratio estimator") {
    SUBCASE("exact means recover the detuning in the linear regime") {
        const int n = 16;
        const double theta = 0.25 * kPi, tau = 1.0, kappa = 0.1, db = 0.01;
        const auto m = cf::css_moments(theta, 0.0, db, tau, kappa, n);
        const double bhat = -std::atan(m.jy / m.jx) / ((n - 1.0) * std::cos(theta) * tau);
        CHECK(bhat == doctest::Approx(db).epsilon(1e-4));
    }
    SUBCASE("unbiased under dephasing and matches the analytic spread") {
        auto spec = base_spec(8, 2e-3, 1.0, 10000, 0.1);
        const auto res = est::ratio_estimator_css(spec, 0.25 * kPi, 500, 41);
        CHECK(res.failures == 0);
        CHECK(std::abs(res.bias) < 3.0 * res.bias_se);
        CHECK(std::abs(res.std_dev - res.analytic_db) / res.analytic_db < 0.05);
    }
    SUBCASE("ratio spread is bounded by the Jy moment-method uncertainty") {
        // at b0 = 0 the two uncertainties coincide analytically
        auto spec = base_spec(12, 0.0, 0.8, 5000, 0.15);
        const double db_ratio = est::analytic_ratio_css_db(spec, 0.6);
        const double db_jy =
            cf::css_noisy_uncertainty(0.6, spec.tau, 0.15, 12, spec.T_total).db;
        CHECK(db_ratio == doctest::Approx(db_jy).epsilon(1e-10));
    }
}

TEST_CASE("estimator spread scales as nu^{-1/2}") {
    const double tau = 1.0;
    std::vector<double> lnu, lsd;
    for (const long nu : {1000L, 10000L, 100000L}) {
        auto spec = base_spec(8, 1e-3, tau, nu, 0.1);
        const auto res = est::ratio_estimator_css(spec, 0.25 * kPi, 200, 55);
        lnu.push_back(std::log(static_cast<double>(nu)));
        lsd.push_back(std::log(res.std_dev));
    }
    const double slope = (lsd.back() - lsd.front()) / (lnu.back() - lnu.front());
    CHECK(std::abs(slope + 0.5) < 0.05);
}

TEST_CASE("error propagation helpers") {
    CHECK(est::error_propagation({2.0, 4.0}, 3.0, 100) == doctest::Approx(0.0));
    CHECK_THROWS_AS(est::error_propagation({0.0, 1.0}, 0.0, 10), std::domain_error);
    // CSS theta = pi/4 noiseless: sqrt(2) / (sqrt(T tau) sqrt(J) (2J - 1))
    const int n = 10;
    const double J = 5.0, tau = 1.0;
    const long nu = 400;
    const double T = tau * static_cast<double>(nu);
    const auto m = cf::css_moments(0.25 * kPi, 0.0, 0.0, tau, 0.0, n);
    const double slope = cf::css_jy_slope(0.25 * kPi, 0.0, tau, 0.0, n);
    const double db = est::error_propagation({m.jy, m.jy2}, slope, nu);
    CHECK(db == doctest::Approx(std::sqrt(2.0) /
                                (std::sqrt(T * tau) * std::sqrt(J) * (2.0 * J - 1.0)))
                    .epsilon(1e-12));
}

TEST_CASE("estimator results serialize to JSON") {
    auto spec = base_spec(4, 1e-3, 1.0, 500, 0.05);
    const auto res = est::ratio_estimator_phi(spec, 50, 3);
    const auto text = res.to_json();
    CHECK(text.find("\"estimate\"") != std::string::npos);
    CHECK(text.find("\"failures\"") != std::string::npos);
}

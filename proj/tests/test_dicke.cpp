#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "dephasimeter/dicke.hpp"
#include "dephasimeter/rng.hpp"
#include "doctest.h"

using namespace dephasimeter;
using dicke::Complex;
using dicke::DickeDensity;
using dicke::EncodingSpec;
using dicke::Matrix;
using dicke::Obs;
using dicke::StateSpec;
using dicke::Vector;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent tensor-product oracle: N qubits in |theta, phi> projected onto
// the symmetric Dicke basis; valid for small N.
Vector css_tensor_oracle(int n, double theta, double phi) {
    const std::size_t dim_full = std::size_t{1} << n;
    std::vector<Complex> prod(dim_full, Complex(1.0, 0.0));
    const Complex up(std::cos(0.5 * theta), 0.0);
    const Complex down = std::exp(Complex(0.0, phi)) * std::sin(0.5 * theta);
    for (std::size_t s = 0; s < dim_full; ++s) {
        Complex amp(1.0, 0.0);
        for (int q = 0; q < n; ++q) amp *= ((s >> q) & 1u) ? down : up;
        prod[s] = amp;
    }
    Vector out(n + 1);
    for (int k = 0; k <= n; ++k) {  // k down-spins -> m = J - k, row index k
        Complex acc(0.0, 0.0);
        double count = 0.0;
        for (std::size_t s = 0; s < dim_full; ++s) {
            if (std::popcount(s) == k) {
                acc += prod[s];
                count += 1.0;
            }
        }
        out(k) = acc / std::sqrt(count);
    }
    return out;
}

DickeDensity random_density(int n, std::uint64_t seed) {
    CounterRng rng(seed, 0);
    const int dim = n + 1;
    Matrix g(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            g(r, c) = Complex(rng.next_normal(), rng.next_normal());
        }
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    DickeDensity d;
    d.J = 0.5 * n;
    d.mat = rho;
    return d;
}

// Var(Jz^k); the generator is diagonal in the Dicke basis, so diagonal sums
// give the exact traces.
double var_of_generator(const DickeDensity& rho, int k) {
    const int dim = rho.dim();
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double g = std::pow(rho.J - i, k);
        const double p = rho.mat(i, i).real();
        m1 += p * g;
        m2 += p * g * g;
    }
    return m2 - m1 * m1;
}

}  // namespace

TEST_CASE("north-pole CSS occupies the m = J corner") {
    const auto rho = dicke::build_initial(StateSpec::css(6, 0.0, 0.0));
    CHECK(rho.mat(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rho.mat.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Phi state at N = 4 has half weight on the four corner entries") {
    const auto rho = dicke::build_initial(StateSpec::phi_state(4));
    const int m0 = 2;  // row of m = 0 for J = 2
    CHECK(rho.mat(0, 0).real() == doctest::Approx(0.5));
    CHECK(rho.mat(0, m0).real() == doctest::Approx(0.5));
    CHECK(rho.mat(m0, 0).real() == doctest::Approx(0.5));
    CHECK(rho.mat(m0, m0).real() == doctest::Approx(0.5));
    CHECK_THROWS_AS(dicke::build_initial(StateSpec::phi_state(5)), std::invalid_argument);
}

TEST_CASE("CSS amplitudes match the qubit tensor-product oracle") {
    CounterRng rng(11, 0);
    for (int n : {2, 3, 5}) {
        for (int trial = 0; trial < 6; ++trial) {
            const double theta = kPi * rng.next_unit();
            const double phi = 2.0 * kPi * rng.next_unit();
            const auto rho = dicke::build_initial(StateSpec::css(n, theta, phi));
            const Vector oracle = css_tensor_oracle(n, theta, phi);
            const Matrix expected = oracle * oracle.adjoint();
            CHECK((rho.mat - expected).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("OATS with mu = beta = 0 reduces to the rotated CSS") {
    const auto a = dicke::build_initial(StateSpec::oats(8, 0.0, 0.0, 0.7));
    const auto b = dicke::build_initial(StateSpec::css(8, 0.7, 0.0));
    CHECK((a.mat - b.mat).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("propagate leaves the state unchanged at b = 0, kappa = 0") {
    const auto rho = random_density(9, 3);
    EncodingSpec enc;
    enc.k = 2;
    enc.b = 0.0;
    enc.t = 1.3;
    const auto out = dicke::propagate(rho, enc, 0.0);
    CHECK((out.mat - rho.mat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Phi coherence picks up e^{i b t J^2} e^{-kappa J^2}") {
    const int n = 6;
    const double J = 3.0;
    const auto rho0 = dicke::build_initial(StateSpec::phi_state(n));
    EncodingSpec enc;
    enc.k = 2;
    enc.b = 0.8;
    enc.t = 0.9;
    const double kappa = 0.07;
    const auto rho = dicke::propagate(rho0, enc, kappa);
    const Complex expected = 0.5 * std::exp(Complex(-kappa * J * J, enc.b * enc.t * J * J));
    const int m0 = 3;
    CHECK(std::abs(rho.mat(0, m0) - expected) < 1e-14);
}

TEST_CASE("propagate preserves trace, hermiticity, positivity, and the diagonal") {
    for (int n : {4, 9, 16}) {
        const auto rho = random_density(n, 100 + n);
        EncodingSpec enc;
        enc.k = 2;
        enc.b = 0.4;
        enc.t = 1.7;
        const auto out = dicke::propagate(rho, enc, 0.23);
        out.validate();
        for (int i = 0; i < out.dim(); ++i) {
            CHECK(std::abs(out.mat(i, i) - rho.mat(i, i)) == 0.0);
        }
    }
    CHECK_THROWS_AS(dicke::propagate(random_density(4, 7), EncodingSpec{}, -0.1),
                    std::domain_error);
}

TEST_CASE("expectation values: eigenstates and closed-form Jz moments") {
    const auto north = dicke::build_initial(StateSpec::css(10, 0.0, 0.0));
    CHECK(dicke::expect(north, Obs::jz()) == doctest::Approx(5.0).epsilon(1e-13));

    for (const double theta : {0.3, 0.25 * kPi, 2.0}) {
        for (const int n : {4, 11, 16}) {
            const double J = 0.5 * n;
            const auto rho = dicke::build_initial(StateSpec::css(n, theta, 0.9));
            const double jz2 = dicke::expect(rho, Obs::jz2());
            const double jz4 = dicke::expect(rho, Obs::jz4());
            const double f2 = J / 4.0 * (1.0 + 2.0 * J + (2.0 * J - 1.0) * std::cos(2 * theta));
            const double f4 =
                J / 32.0 *
                (J - 1.0 + 12.0 * J * J * (J + 1.0) +
                 4.0 * (2.0 * J - 1.0) * (2.0 * J - 1.0) * (J + 1.0) * std::cos(2 * theta) +
                 (J - 1.0) * (2.0 * J - 3.0) * (2.0 * J - 1.0) * std::cos(4 * theta));
            CHECK(jz2 == doctest::Approx(f2).epsilon(1e-12));
            CHECK(jz4 == doctest::Approx(f4).epsilon(1e-12));
        }
    }
}

TEST_CASE("survival observables follow the two-level closed forms") {
    const int n = 8;
    const double J = 4.0;
    const auto rho0 = dicke::build_initial(StateSpec::phi_state(n));
    EncodingSpec enc;
    enc.k = 2;
    enc.b = 0.05;
    enc.t = 1.0;
    const double kappa = 0.04;
    const auto rho = dicke::propagate(rho0, enc, kappa);
    const double decay = std::exp(-J * J * kappa);
    CHECK(dicke::expect(rho, Obs::survival_phi()) ==
          doctest::Approx(decay * std::cos(J * J * enc.b * enc.t)).epsilon(1e-12));
    CHECK(dicke::expect(rho, Obs::survival_phi_prime()) ==
          doctest::Approx(decay * std::sin(J * J * enc.b * enc.t)).epsilon(1e-12));
    CHECK_THROWS_AS(dicke::expect(dicke::build_initial(StateSpec::css(5, 0.3, 0.0)),
                                  Obs::survival_phi()),
                    std::invalid_argument);
}

TEST_CASE("nonlinear readout reduces to Jy at zero strength") {
    const Matrix a = dicke::observable_matrix(Obs::nonlinear_readout(0.0), 3.0);
    const Matrix b = dicke::jy_matrix(3.0);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("k = 1 linear Ramsey law matches the product-state oracle") {
    for (const int n : {2, 5, 8}) {
        const auto rho0 = dicke::build_initial(StateSpec::css(n, 0.5 * kPi, 0.0));
        EncodingSpec enc;
        enc.k = 1;
        enc.b = 0.9;
        enc.t = 0.7;
        const double kappa = 0.2;
        const auto rho = dicke::propagate(rho0, enc, kappa);
        // Collective dephasing damps every single-qubit coherence by e^{-kappa}:
        // <Jx(t)> = (N/2) e^{-kappa} cos(b t).
        const double oracle = 0.5 * n * std::exp(-kappa) * std::cos(enc.b * enc.t);
        CHECK(dicke::expect(rho, Obs::jx()) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("pure-state QFI equals 4 t^2 Var(Jz^k)") {
    for (const int k : {1, 2, 3}) {
        for (const int n : {4, 7}) {
            const auto rho0 = dicke::build_initial(StateSpec::css(n, 0.8, 0.4));
            EncodingSpec enc;
            enc.k = k;
            enc.b0 = 0.3;
            enc.t = 1.1;
            const auto res = dicke::qfi_exact(rho0, enc, 0.0);
            const double expected = 4.0 * enc.t * enc.t * var_of_generator(rho0, k);
            CHECK(res.per_shot == doctest::Approx(expected).epsilon(1e-10));
        }
    }
    // Phi: Var(Jz^2) = J^4 / 4, so the noiseless per-shot QFI is t^2 J^4.
    const auto phi = dicke::build_initial(StateSpec::phi_state(8));
    EncodingSpec enc;
    enc.k = 2;
    enc.t = 0.6;
    CHECK(dicke::qfi_exact(phi, enc, 0.0).per_shot ==
          doctest::Approx(enc.t * enc.t * 256.0).epsilon(1e-12));
}

TEST_CASE("Phi QFI under dephasing: t^2 J^4 e^{-2 J^2 kappa}") {
    for (const double J : {2.0, 4.0, 8.0}) {
        const int n = static_cast<int>(2 * J);
        const auto rho0 = dicke::build_initial(StateSpec::phi_state(n));
        EncodingSpec enc;
        enc.k = 2;
        enc.b0 = 0.13;
        enc.t = 0.8;
        const double kappa = 0.3 / (J * J);
        const auto res = dicke::qfi_exact(rho0, enc, kappa);
        const double expected =
            enc.t * enc.t * std::pow(J, 4) * std::exp(-2.0 * J * J * kappa);
        CHECK(res.per_shot == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("QFI identity against engine moments for the noiseless CSS") {
    const auto rho0 = dicke::build_initial(StateSpec::css(4, 0.25 * kPi, 0.0));
    EncodingSpec enc;
    enc.k = 2;
    enc.t = 1.0;
    const double jz2 = dicke::expect(rho0, Obs::jz2());
    const double jz4 = dicke::expect(rho0, Obs::jz4());
    CHECK(dicke::qfi_exact(rho0, enc, 0.0).per_shot ==
          doctest::Approx(4.0 * (jz4 - jz2 * jz2)).epsilon(1e-12));
}

TEST_CASE("SLD residual is small on the support") {
    for (const int n : {4, 8}) {
        const auto rho0 = dicke::build_initial(StateSpec::css(n, 0.6, 0.0));
        EncodingSpec enc;
        enc.k = 2;
        enc.b0 = 0.2;
        enc.t = 0.9;
        const double kappa = 0.15;
        const auto res = dicke::qfi_exact(rho0, enc, kappa);
        const auto rho = dicke::propagate(rho0, {2, enc.b0, enc.b0, enc.t}, kappa);
        Matrix drho(rho.dim(), rho.dim());
        for (int r = 0; r < rho.dim(); ++r) {
            for (int c = 0; c < rho.dim(); ++c) {
                const double mr = rho.J - r, mc = rho.J - c;
                drho(r, c) = Complex(0.0, enc.t * (mr * mr - mc * mc)) * rho.mat(r, c);
            }
        }
        const Matrix lhs = drho;
        const Matrix rhs = 0.5 * (res.sld * rho.mat + rho.mat * res.sld);
        CHECK((lhs - rhs).norm() < 1e-9 * lhs.norm());
        // Tr[rho L^2] is an equivalent route to the QFI.
        CHECK((rho.mat * res.sld * res.sld).trace().real() ==
              doctest::Approx(res.per_shot).epsilon(1e-10));
    }
}

TEST_CASE("trajectory average: dephasing-free sector and the tiny-noise limit") {
    const auto rho0 = dicke::build_initial(StateSpec::css(4, 0.7, 0.0));
    EncodingSpec enc;
    enc.k = 2;
    enc.b = 0.5;
    enc.t = 0.5;
    // Vanishing spectral weight: the trajectory phases are ~1e-15, so a single
    // trajectory must reproduce the noise-free propagation.
    const auto avg = dicke::trajectory_average(
        rho0, enc, noise::NoiseSpectrum::flat(1e-30), 1, 77, 0.01);
    const auto direct = dicke::propagate(rho0, enc, 0.0);
    CHECK((avg.mean.mat - direct.mat).cwiseAbs().maxCoeff() < 1e-12);

    // Diagonal states are untouched by dephasing, trajectory by trajectory.
    DickeDensity diag;
    diag.J = 2.0;
    diag.mat = Matrix::Zero(5, 5);
    diag.mat.diagonal() << 0.1, 0.2, 0.4, 0.2, 0.1;
    const auto avg_diag = dicke::trajectory_average(
        diag, {2, 0.0, 0.0, 0.5}, noise::NoiseSpectrum::lorentzian(1.0, 1.0), 32, 5, 0.01);
    CHECK((avg_diag.mean.mat - diag.mat).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("trajectory average reproduces the quadrature decay within 3 sigma") {
    const int n = 4;
    const auto rho0 = dicke::build_initial(StateSpec::css(n, 0.6, 0.0));
    EncodingSpec enc;
    enc.k = 2;
    enc.b = 0.3;
    enc.t = 1.0;
    const auto spec = noise::NoiseSpectrum::lorentzian(1.0, 1.0);
    const double kappa =
        noise::kKappaNorm * noise::kappa_overlap(spec, enc.t);
    const auto mc = dicke::trajectory_average(rho0, enc, spec, 2000, 123, 0.01);
    const auto expected = dicke::propagate(rho0, enc, kappa);
    int checked = 0;
    for (int r = 0; r < mc.mean.dim(); ++r) {
        for (int c = 0; c < mc.mean.dim(); ++c) {
            const double se_r = std::max(mc.se_real(r, c), 1e-12);
            const double se_i = std::max(mc.se_imag(r, c), 1e-12);
            CHECK(std::abs(mc.mean.mat(r, c).real() - expected.mat(r, c).real()) <
                  4.0 * se_r + 1e-9);
            CHECK(std::abs(mc.mean.mat(r, c).imag() - expected.mat(r, c).imag()) <
                  4.0 * se_i + 1e-9);
            ++checked;
        }
    }
    CHECK(checked == 25);
}

TEST_CASE("density JSON round trip") {
    const auto rho = random_density(5, 9);
    const auto text = dicke::to_json(rho);
    const auto back = dicke::density_from_json(text);
    CHECK(back.J == rho.J);
    CHECK((back.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-15);
}

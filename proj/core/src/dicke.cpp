#include "dephasimeter/dicke.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dephasimeter/parallel.hpp"
#include "dephasimeter/rng.hpp"
#include "json.hpp"

namespace dephasimeter::dicke {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::VectorXd m_values(double J) {
    const int dim = static_cast<int>(std::lround(2.0 * J)) + 1;
    Eigen::VectorXd m(dim);
    for (int i = 0; i < dim; ++i) m(i) = J - i;
    return m;
}

// exp(-i angle Jy) acting on a state vector, via the Jy eigenbasis.
Vector rotate_y(double J, double angle, const Vector& psi) {
    const Matrix jy = jy_matrix(J);
    Eigen::SelfAdjointEigenSolver<Matrix> es(jy);
    const Vector coeffs = es.eigenvectors().adjoint() * psi;
    Vector phased(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        phased(i) = std::exp(-kI * angle * es.eigenvalues()(i)) * coeffs(i);
    }
    return es.eigenvectors() * phased;
}

Vector css_vector(double J, double theta, double phi) {
    const int dim = static_cast<int>(std::lround(2.0 * J)) + 1;
    Vector c(dim);
    const double lc = std::log(std::abs(std::cos(0.5 * theta)) + 1e-300);
    const double ls = std::log(std::abs(std::sin(0.5 * theta)) + 1e-300);
    const double sgn_c = std::cos(0.5 * theta) < 0.0 ? -1.0 : 1.0;
    const double sgn_s = std::sin(0.5 * theta) < 0.0 ? -1.0 : 1.0;
    // c_m = sqrt(C(2J, J+m)) cos(th/2)^(J+m) [e^{i phi} sin(th/2)]^(J-m)
    double log_binom = 0.0;  // log C(2J, J+m) built up from m = J downwards
    for (int i = 0; i < dim; ++i) {
        const double jm = 2.0 * J - i;  // J + m
        const double jmm = i;           // J - m
        if (i > 0) log_binom += std::log((2.0 * J - (i - 1)) / static_cast<double>(i));
        const double mag = std::exp(0.5 * log_binom + jm * lc + jmm * ls);
        const double sign = std::pow(sgn_c, jm) * std::pow(sgn_s, jmm);
        c(i) = sign * mag * std::exp(kI * phi * jmm);
    }
    c.normalize();
    return c;
}

Vector pure_state(const StateSpec& spec) {
    const double J = spec.J();
    const int dim = spec.dim();
    switch (spec.kind) {
        case StateSpec::Kind::Css:
            return css_vector(J, spec.theta, spec.phi);
        case StateSpec::Kind::Oats: {
            // e^{-i theta Jy} e^{-i beta Jz} e^{-i mu Jx^2} |J, J>
            Vector psi = css_vector(J, 0.0, 0.0);
            const Matrix jx = jx_matrix(J);
            Eigen::SelfAdjointEigenSolver<Matrix> es(jx);
            Vector coeffs = es.eigenvectors().adjoint() * psi;
            for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
                const double w = es.eigenvalues()(i);
                coeffs(i) *= std::exp(-kI * spec.mu * w * w);
            }
            psi = es.eigenvectors() * coeffs;
            const Eigen::VectorXd m = m_values(J);
            for (int i = 0; i < dim; ++i) psi(i) *= std::exp(-kI * spec.beta * m(i));
            return rotate_y(J, spec.theta, psi);
        }
        case StateSpec::Kind::Phi:
        case StateSpec::Kind::PhiPrime: {
            if (spec.n_qubits % 2 != 0)
                throw std::invalid_argument("Phi states require integer J (even N)");
            Vector c = Vector::Zero(dim);
            const int m0_row = static_cast<int>(std::lround(J));  // row of m = 0
            c(0) = 1.0 / std::sqrt(2.0);
            // PhiPrime = (|J,J> - i |J,0>)/sqrt(2); with the e^{+i b t (m^k - m'^k)}
            // propagator convention this gives <O'> = e^{-J^2 kappa} sin(J^2 b t).
            c(m0_row) = spec.kind == StateSpec::Kind::Phi ? Complex(1.0 / std::sqrt(2.0))
                                                          : Complex(0.0, -1.0 / std::sqrt(2.0));
            return c;
        }
    }
    throw std::logic_error("unreachable state kind");
}

}  // namespace

StateSpec StateSpec::css(int n, double theta, double phi) {
    if (n < 1) throw std::invalid_argument("need at least one qubit");
    StateSpec s;
    s.kind = Kind::Css;
    s.n_qubits = n;
    s.theta = theta;
    s.phi = phi;
    return s;
}

StateSpec StateSpec::oats(int n, double mu, double beta, double theta) {
    if (n < 1) throw std::invalid_argument("need at least one qubit");
    StateSpec s;
    s.kind = Kind::Oats;
    s.n_qubits = n;
    s.mu = mu;
    s.beta = beta;
    s.theta = theta;
    return s;
}

StateSpec StateSpec::phi_state(int n) {
    if (n % 2 != 0) throw std::invalid_argument("Phi state requires even N");
    StateSpec s;
    s.kind = Kind::Phi;
    s.n_qubits = n;
    return s;
}

StateSpec StateSpec::phi_prime_state(int n) {
    if (n % 2 != 0) throw std::invalid_argument("Phi' state requires even N");
    StateSpec s;
    s.kind = Kind::PhiPrime;
    s.n_qubits = n;
    return s;
}

void DickeDensity::validate(double herm_tol, double trace_tol, double psd_tol) const {
    const double herm = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol)
        throw std::runtime_error("density matrix not Hermitian: deviation " + std::to_string(herm));
    const double tr = std::abs(mat.trace() - Complex(1.0, 0.0));
    if (tr > trace_tol)
        throw std::runtime_error("density matrix trace deviates from 1 by " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw std::runtime_error("density matrix not positive semidefinite");
}

Matrix jx_matrix(double J) {
    const int dim = static_cast<int>(std::lround(2.0 * J)) + 1;
    Matrix jx = Matrix::Zero(dim, dim);
    for (int i = 1; i < dim; ++i) {
        const double m = J - i;  // J+ |J,m> = sqrt(J(J+1) - m(m+1)) |J,m+1>
        const double a = 0.5 * std::sqrt(J * (J + 1.0) - m * (m + 1.0));
        jx(i - 1, i) = a;
        jx(i, i - 1) = a;
    }
    return jx;
}

Matrix jy_matrix(double J) {
    const int dim = static_cast<int>(std::lround(2.0 * J)) + 1;
    Matrix jy = Matrix::Zero(dim, dim);
    for (int i = 1; i < dim; ++i) {
        const double m = J - i;
        const double a = 0.5 * std::sqrt(J * (J + 1.0) - m * (m + 1.0));
        jy(i - 1, i) = Complex(0.0, -a);
        jy(i, i - 1) = Complex(0.0, a);
    }
    return jy;
}

Matrix jz_matrix(double J) {
    const int dim = static_cast<int>(std::lround(2.0 * J)) + 1;
    Matrix jz = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) jz(i, i) = J - i;
    return jz;
}

DickeDensity build_initial(const StateSpec& spec) {
    const Vector psi = pure_state(spec);
    DickeDensity rho;
    rho.J = spec.J();
    rho.mat = psi * psi.adjoint();
    return rho;
}

DickeDensity propagate(const DickeDensity& rho0, const EncodingSpec& enc, double kappa) {
    if (kappa < 0.0) throw std::domain_error("propagate requires kappa >= 0");
    if (enc.k < 1) throw std::invalid_argument("encoding order k must be >= 1");
    const Eigen::VectorXd m = m_values(rho0.J);
    const int dim = rho0.dim();
    Eigen::VectorXd mk(dim);
    for (int i = 0; i < dim; ++i) mk(i) = std::pow(m(i), enc.k);
    DickeDensity out;
    out.J = rho0.J;
    out.mat.resize(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            const double dm = m(r) - m(c);
            const Complex factor =
                std::exp(Complex(-kappa * dm * dm, enc.b * enc.t * (mk(r) - mk(c))));
            out.mat(r, c) = factor * rho0.mat(r, c);
        }
    }
    return out;
}

Matrix observable_matrix(const Obs& obs, double J) {
    const int dim = static_cast<int>(std::lround(2.0 * J)) + 1;
    switch (obs.kind) {
        case Obs::Kind::Jx:
            return jx_matrix(J);
        case Obs::Kind::Jy:
            return jy_matrix(J);
        case Obs::Kind::Jz:
            return jz_matrix(J);
        case Obs::Kind::Jx2: {
            const Matrix jx = jx_matrix(J);
            return jx * jx;
        }
        case Obs::Kind::Jy2: {
            const Matrix jy = jy_matrix(J);
            return jy * jy;
        }
        case Obs::Kind::Jz2: {
            const Matrix jz = jz_matrix(J);
            return jz * jz;
        }
        case Obs::Kind::Jz4: {
            const Matrix jz = jz_matrix(J);
            return jz * jz * jz * jz;
        }
        case Obs::Kind::SurvivalPhi:
        case Obs::Kind::SurvivalPhiPrime: {
            const int n = static_cast<int>(std::lround(2.0 * J));
            const auto spec = obs.kind == Obs::Kind::SurvivalPhi
                                  ? StateSpec::phi_state(n)
                                  : StateSpec::phi_prime_state(n);
            const Matrix proj = build_initial(spec).mat;
            return 2.0 * proj - Matrix::Identity(dim, dim);
        }
        case Obs::Kind::NonlinearReadout: {
            // e^{i eta Jx^2 / 2} Jy e^{-i eta Jx^2 / 2}
            const Matrix jx = jx_matrix(J);
            Eigen::SelfAdjointEigenSolver<Matrix> es(jx);
            Vector phase(dim);
            for (int i = 0; i < dim; ++i) {
                const double w = es.eigenvalues()(i);
                phase(i) = std::exp(kI * (0.5 * obs.eta) * w * w);
            }
            const Matrix u = es.eigenvectors() * phase.asDiagonal() *
                             es.eigenvectors().adjoint();
            return u * jy_matrix(J) * u.adjoint();
        }
    }
    throw std::logic_error("unreachable observable kind");
}

double expect(const DickeDensity& rho, const Obs& obs) {
    if ((obs.kind == Obs::Kind::SurvivalPhi || obs.kind == Obs::Kind::SurvivalPhiPrime) &&
        std::lround(2.0 * rho.J) % 2 != 0) {
        throw std::invalid_argument("survival observables require integer J");
    }
    const Matrix o = observable_matrix(obs, rho.J);
    if (o.rows() != rho.mat.rows()) throw std::invalid_argument("observable dimension mismatch");
    return (rho.mat * o).trace().real();
}

QfiResult qfi_exact(const DickeDensity& rho0, const EncodingSpec& enc, double kappa) {
    EncodingSpec at_b0 = enc;
    at_b0.b = enc.b0;
    const DickeDensity rho = propagate(rho0, at_b0, kappa);
    const Eigen::VectorXd m = m_values(rho.J);
    const int dim = rho.dim();
    Matrix drho(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            const double gen = std::pow(m(r), enc.k) - std::pow(m(c), enc.k);
            drho(r, c) = kI * enc.t * gen * rho.mat(r, c);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat);
    const Eigen::VectorXd p = es.eigenvalues();
    const Matrix v = es.eigenvectors();
    const Matrix d_in_eig = v.adjoint() * drho * v;
    const double eps = 1e-12 * p.maxCoeff();
    double qfi = 0.0;
    Matrix l_eig = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const double denom = p(i) + p(j);
            if (denom <= eps) continue;
            const Complex elem = d_in_eig(i, j);
            qfi += 2.0 * std::norm(elem) / denom;
            l_eig(i, j) = 2.0 * elem / denom;
        }
    }
    QfiResult out;
    out.per_shot = qfi;
    out.sld = v * l_eig * v.adjoint();
    return out;
}

TrajectoryAverage trajectory_average(const DickeDensity& rho0, const EncodingSpec& enc,
                                     const noise::NoiseSpectrum& spec, int trajectories,
                                     std::uint64_t seed, double dt, int workers) {
    if (trajectories < 1) throw std::invalid_argument("need at least one trajectory");
    const int dim = rho0.dim();
    const Eigen::VectorXd m = m_values(rho0.J);

    // One accumulation slot per trajectory chunk keeps the reduction order
    // fixed regardless of the worker count.
    const int chunks = workers > 1 ? 4 * workers : 1;
    std::vector<Matrix> sum(chunks, Matrix::Zero(dim, dim));
    std::vector<Eigen::MatrixXd> sq_re(chunks, Eigen::MatrixXd::Zero(dim, dim));
    std::vector<Eigen::MatrixXd> sq_im(chunks, Eigen::MatrixXd::Zero(dim, dim));

    const DickeDensity encoded = propagate(rho0, enc, 0.0);
    parallel_for(static_cast<std::size_t>(trajectories), workers, [&](std::size_t idx) {
        const auto traj = noise::sample_trajectory(spec, std::max(enc.t, dt), dt,
                                                   mix64(seed) ^ idx);
        const double phase = noise::integrated_phase(traj, enc.t);
        const int slot = static_cast<int>(idx % static_cast<std::size_t>(chunks));
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                const Complex val =
                    std::exp(-kI * (m(r) - m(c)) * phase) * encoded.mat(r, c);
                sum[slot](r, c) += val;
                sq_re[slot](r, c) += val.real() * val.real();
                sq_im[slot](r, c) += val.imag() * val.imag();
            }
        }
    });
    Matrix total = Matrix::Zero(dim, dim);
    Eigen::MatrixXd total_re = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd total_im = Eigen::MatrixXd::Zero(dim, dim);
    for (int s = 0; s < chunks; ++s) {
        total += sum[s];
        total_re += sq_re[s];
        total_im += sq_im[s];
    }
    const double n = trajectories;
    TrajectoryAverage out;
    out.mean.J = rho0.J;
    out.mean.mat = total / n;
    out.se_real.resize(dim, dim);
    out.se_imag.resize(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            const double mr = out.mean.mat(r, c).real();
            const double mi = out.mean.mat(r, c).imag();
            const double var_r = std::max(0.0, total_re(r, c) / n - mr * mr);
            const double var_i = std::max(0.0, total_im(r, c) / n - mi * mi);
            out.se_real(r, c) = std::sqrt(var_r / n);
            out.se_imag(r, c) = std::sqrt(var_i / n);
        }
    }
    return out;
}

std::string to_json(const DickeDensity& rho) {
    nlohmann::json j;
    j["J"] = rho.J;
    const int dim = rho.dim();
    std::vector<std::vector<double>> re(dim, std::vector<double>(dim));
    std::vector<std::vector<double>> im(dim, std::vector<double>(dim));
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            re[r][c] = rho.mat(r, c).real();
            im[r][c] = rho.mat(r, c).imag();
        }
    }
    j["re"] = re;
    j["im"] = im;
    return j.dump();
}

DickeDensity density_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    DickeDensity rho;
    rho.J = j.at("J").get<double>();
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.at("im").get<std::vector<std::vector<double>>>();
    const int dim = static_cast<int>(re.size());
    rho.mat.resize(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            rho.mat(r, c) = Complex(re[r][c], im[r][c]);
        }
    }
    return rho;
}

}  // namespace dephasimeter::dicke

// optimizer.hpp — protocol optimization sweeps, scaling fits, Table-1 assembly

#pragma once

#include <string>
#include <vector>

#include "dephasimeter/gaussian_hp.hpp"
#include "dephasimeter/noise_model.hpp"

namespace dephasimeter::opt {

enum class StateFamily { Css, KuOats, PeOats, Phi };
enum class NoiseRegime { Noiseless, Markovian, Zeno };
enum class Path { ClosedForm, GaussianHP, ExactDicke };

std::string to_string(StateFamily s);
std::string to_string(NoiseRegime r);
std::string to_string(Path p);

struct NoiseParams {
    double gamma = 1.0;   // Markovian rate
    double kappa0 = 1.0;  // Zeno strength
    double omega_c = 1.0;
};

// J-dependent OATS parameters of the named families.
struct OatsParams {
    double mu = 0.0;
    double beta = 0.0;
};
OatsParams oats_params(StateFamily family, double J);

struct SweepPlan {
    std::vector<double> n_values;  // strictly increasing geometric grid
    StateFamily state = StateFamily::Css;
    NoiseRegime regime = NoiseRegime::Zeno;
    Path path = Path::ClosedForm;
    double T = 1.0;
    double tau_ref = 1.0;  // reporting time for noiseless protocols
    NoiseParams noise;

    void validate() const;  // monotone grid, positive bounds, ExactDicke N cap
};

struct ProtocolPoint {
    double n = 0.0;
    double tau_opt = 0.0;
    double theta_opt = 0.0;
    double db_opt = 0.0;
    bool valid = true;      // HP validity at the optimum (true for exact paths)
    bool boundary = false;  // tau optimum pinned at the bracket edge
};

ProtocolPoint optimize_protocol(StateFamily state, NoiseRegime regime, double n_qubits,
                                double T, Path path, const NoiseParams& noise,
                                double tau_ref = 1.0);

// Markovian protocols with fixed theta = pi/4 (the noiseless-optimal angle);
// reported alongside the theta-optimized value, see the Table-1 open point.
ProtocolPoint optimize_protocol_theta_fixed(StateFamily state, NoiseRegime regime,
                                            double n_qubits, double T, Path path,
                                            const NoiseParams& noise, double theta,
                                            double tau_ref = 1.0);

std::vector<ProtocolPoint> run_sweep(const SweepPlan& plan);

struct FitPolicy {
    int min_points = 6;
    double min_decades = 1.8;
    bool exclude_smallest_decade = true;  // drop N < 10 * N_min before fitting
};

struct ScalingFit {
    double exponent = 0.0;
    double exponent_se = 0.0;
    double prefactor = 0.0;  // db(N_max) / N_max^exponent
    double prefactor_se = 0.0;
    double n_min_used = 0.0;
    double n_max_used = 0.0;
    double max_rel_residual = 0.0;
    int points_used = 0;
};

struct FitSpanError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Log-log ordinary least squares over the policy-filtered window. Throws
// FitSpanError when fewer than min_points survive or the span is too short.
ScalingFit fit_scaling(const std::vector<ProtocolPoint>& points, const FitPolicy& policy = {});

struct Table1Cell {
    std::string state;
    std::string regime;
    bool available = true;
    double exponent_fit = 0.0;
    double exponent_se = 0.0;
    double prefactor_fit = 0.0;   // in the regime's unit at the reference N
    double paper_exponent = 0.0;
    double paper_prefactor = 0.0;
    double agreement = 0.0;       // prefactor_fit / paper_prefactor
    bool flagged = false;         // |agreement - 1| > 0.10
    std::string note;
};

struct Discrepancy {
    std::string id;
    std::string description;
    double printed = 0.0;
    double computed = 0.0;
};

struct Table1 {
    double T = 1.0, kappa0 = 1.0, omega_c = 1.0, gamma = 1.0;
    double n_reference = 4096.0;
    std::vector<Table1Cell> cells;
    std::vector<Discrepancy> discrepancies;
};

// Reproduces the asymptotic-performance table: per (state, regime) the
// numerically determined prefactor and exponent next to the printed constant,
// with deviations beyond 10% flagged as data. Known printed-constant tensions
// are emitted in the discrepancies block.
Table1 table1(double T, double kappa0, double omega_c, double gamma);

std::string table1_json(const Table1& t);
std::string table1_csv(const Table1& t);

}  // namespace dephasimeter::opt

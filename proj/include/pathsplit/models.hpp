#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pathsplit/errors.hpp"

namespace pathsplit {

/// A Stratonovich SDE  dy = f(y) dt + g(y) o dW  with e state dimensions and
/// d noise coordinates. Columns of g are exposed individually; exact substep
/// flows are attached where the model admits them. Models are immutable after
/// construction and freely shareable across workers.
struct SdeModel {
    int dim_state = 0;
    int dim_noise = 0;

    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
    /// Ito-form drift, for the Euler-Maruyama / Milstein / Tamed baselines.
    /// Equal to drift for additive noise.
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> ito_drift;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)> diffusion_col;

    /// Exact flow of y' = f(y) for a time t, when available.
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> exact_drift_flow;
    /// Exact flow of y' = g_i(y) for a "time" equal to the spatial increment.
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, int, double)> exact_diffusion_flow;

    /// For Milstein on scalar noise: (g g')(y), when available.
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> milstein_correction;

    /// Admissible-domain predicate (e.g. nonnegativity for CIR); empty means
    /// the whole space.
    std::function<bool(const Eigen::VectorXd&)> in_domain;

    bool commutative = false;
    bool additive = false;
    std::string name;
};

struct CommutativityReport {
    double max_violation = 0.0; // max over points and pairs of |g_i' g_j - g_j' g_i|
    bool passed = false;
    double tolerance = 0.0;
};

/// Checks g_i'(y) g_j(y) = g_j'(y) g_i(y) at the sample points with central
/// finite differences.
CommutativityReport commutativity_check(const SdeModel& model,
                                        const std::vector<Eigen::VectorXd>& sample_points,
                                        double tol);

// ---------------------------------------------------------------------------
// Cox-Ingersoll-Ross
// ---------------------------------------------------------------------------

/// Parameters of dy = a(b - y) dt + sigma sqrt(y) dW (Ito form). The
/// Stratonovich drift level is b_tilde = b - sigma^2/(4a); nonnegativity of
/// the scheme requires sigma^2 <= 4ab.
struct CirParams {
    double a = 1.0;
    double b = 1.0;
    double sigma = 1.0;

    double b_tilde() const { return b - sigma * sigma / (4.0 * a); }
    void validate() const {
        if (!(a > 0.0) || !(b > 0.0) || !(sigma > 0.0))
            throw ConfigError("CIR parameters must be positive");
        if (sigma * sigma > 4.0 * a * b)
            throw ConfigError("CIR requires sigma^2 <= 4ab for nonnegativity");
    }
};

/// Exact flow of the Stratonovich drift y' = a(b_tilde - y) for time t.
inline double cir_drift_flow(const CirParams& p, double y, double t) {
    const double e = std::exp(-p.a * t);
    return e * y + p.b_tilde() * (1.0 - e);
}

/// Exact flow of the diffusion ODE written in the square form
/// (sqrt(y) + sigma * amount / 2)^2; automatically nonnegative. The ODE
/// interpretation breaks when sqrt(y) + sigma * amount / 2 < 0 (the flow is
/// continued through the reflection exactly as the square form prescribes).
inline double cir_diffusion_flow(const CirParams& p, double y, double amount) {
    const double r = std::sqrt(y) + 0.5 * p.sigma * amount;
    return r * r;
}

SdeModel cir_model(const CirParams& p);

// ---------------------------------------------------------------------------
// Stochastic FitzHugh-Nagumo
// ---------------------------------------------------------------------------

struct FhnParams {
    double epsilon = 1.0;
    double gamma = 1.0;
    double beta = 1.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;

    void validate() const {
        if (!(epsilon > 0.0)) throw ConfigError("FHN requires epsilon > 0");
    }
};

/// Exact time-t flow of the cubic ODE v' = (v - v^3)/epsilon.
inline double fhn_cubic_flow(double v, double t, double epsilon) {
    const double e = std::exp(-2.0 * t / epsilon);
    return v / std::sqrt(e + v * v * (1.0 - e));
}

/// exp(t * [[0, -1/epsilon], [gamma, -1]]) in closed form, with the defective
/// branch (discriminant ~ 0) handled by the limiting (I + tB) e^{alpha t}
/// form.
Eigen::Matrix2d fhn_linear_exponential(const FhnParams& p, double t);

/// One half-step phi^Strang_{h/2} of the FHN drift: quarter cubic flow and
/// u-shift, the 2x2 linear flow over h/2, then quarter cubic flow and u-shift
/// again.
Eigen::Vector2d fhn_phi_strang_half(const FhnParams& p, const Eigen::Vector2d& vu, double h);

SdeModel fhn_model(const FhnParams& p);

// ---------------------------------------------------------------------------
// Underdamped Langevin dynamics
// ---------------------------------------------------------------------------

///   dx = v dt,  dv = -gamma v dt - u grad_f(x) dt + sqrt(2 gamma u) dW.
struct UldParams {
    double u = 1.0;              // temperature-like scale
    double gamma_friction = 1.0; // must be positive
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> potential_grad;

    void validate() const {
        if (!(gamma_friction > 0.0)) throw ConfigError("ULD requires gamma > 0");
        if (!potential_grad) throw ConfigError("ULD requires a potential gradient");
    }
};

/// State layout: (x_1..x_d, v_1..v_d).
SdeModel uld_model(const UldParams& p, int d);

/// Quadratic potential f(x) = |x|^2 / 2 (so grad f(x) = x).
UldParams uld_quadratic_params(double u, double gamma_friction);

// ---------------------------------------------------------------------------
// Bayesian logistic regression potential
// ---------------------------------------------------------------------------

/// f(theta) = delta |theta|^2 + sum_i log(1 + exp(-y_i x_i^T theta)).
struct LogisticPotential {
    Eigen::MatrixXd features; // m x d
    Eigen::VectorXd labels;   // entries in {-1, +1}
    double delta = 0.0;

    int dim() const { return static_cast<int>(features.cols()); }
};

double logistic_value(const LogisticPotential& pot, const Eigen::VectorXd& theta);

/// grad f(theta) = 2 delta theta - sum_i y_i x_i sigmoid(-y_i x_i^T theta),
/// evaluated in the numerically stable log-sum-exp form.
Eigen::VectorXd logistic_grad(const LogisticPotential& pot, const Eigen::VectorXd& theta);

/// CSV rows: label (+1 or -1) followed by d feature values. Rejects labels
/// outside {-1, +1} and ragged rows, reporting the offending row index.
LogisticPotential load_dataset(const std::string& csv_path, double delta);

// ---------------------------------------------------------------------------
// Additive-noise models
// ---------------------------------------------------------------------------

/// Generic additive model dy = f(y) dt + sigma dW with a constant matrix
/// sigma.
SdeModel make_additive_model(std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift,
                             Eigen::MatrixXd sigma, std::string name = "additive");

/// The scalar anharmonic oscillator dy = sin(y) dt + dW.
SdeModel make_oscillator_model();

} // namespace pathsplit

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>

#include "pathsplit/brownian.hpp"
#include "pathsplit/errors.hpp"
#include "pathsplit/estimators.hpp"
#include "pathsplit/models.hpp"
#include "pathsplit/paths.hpp"

namespace pathsplit {

// ---------------------------------------------------------------------------
// ODE substep configuration for the path-driven integrator
// ---------------------------------------------------------------------------

enum class DriftSolver { Auto, Exact, Ralston2, Rk4 };
enum class DiffusionSolver { Auto, Exact, Rk4 };

/// Auto uses the model's exact flow when present, otherwise a single Ralston
/// step for pure-drift pieces and a single RK4 step for diffusion and mixed
/// pieces. Exact demands the model flow and fails without it. Mixed pieces
/// are always integrated with RK4. substeps > 1 subdivides the numerical
/// solves (used by accuracy studies; the schemes themselves take one step).
struct OdeSubstepConfig {
    DriftSolver drift = DriftSolver::Auto;
    DiffusionSolver diffusion = DiffusionSolver::Auto;
    int substeps = 1;
};

/// Folds the path's segments left to right through the model's ODE flows:
/// pure-time segments integrate y' = f(y) over dtau, pure-space segments
/// apply the diffusion flows for the spatial jumps, mixed segments integrate
/// y' = f(y) dtau + g(y) dw over a unit parameter. Throws StepError (with the
/// segment index) if the state leaves the model's domain.
Eigen::VectorXd splitting_step(const SdeModel& model, const SplittingPath& path,
                               Eigen::VectorXd y, const OdeSubstepConfig& cfg = {});

// ---------------------------------------------------------------------------
// CIR splitting and its conditional moments
// ---------------------------------------------------------------------------

/// Per-step constants of the five-stage CIR splitting at a fixed step size.
struct CirSplitStepper {
    CirSplitStepper(const CirParams& params, double h);

    /// One step from y >= 0 using the step's (W, H); output is >= 0.
    double step(double y, double w, double hst) const {
        const double y1 = e_outer * y + bt_outer;
        const double r1 = std::sqrt(y1) + half_sigma * (0.5 * w + root3 * hst);
        const double y2 = r1 * r1;
        const double y3 = e_mid * y2 + bt_mid;
        const double r2 = std::sqrt(y3) + half_sigma * (0.5 * w - root3 * hst);
        const double y4 = r2 * r2;
        return e_outer * y4 + bt_outer;
    }
    double step(double y, const IncrementView& inc) const { return step(y, inc.w(0), inc.hst(0)); }

    double e_outer, bt_outer, e_mid, bt_mid, half_sigma;
    static constexpr double root3 = 1.7320508075688772935274463415058724;
};

/// One step of the CIR splitting (convenience wrapper; hot loops should reuse
/// a CirSplitStepper).
double cir_split_step(const CirParams& p, double y, const IncrementView& inc);

/// Mean and variance of one CIR splitting step conditional on y, together
/// with the exact O(h^5) remainders against the SDE's own moments:
///   mean     = e^{-ah} y + b (1 - e^{-ah}) + remainder_mean,
///   variance = (sigma^2/a)(e^{-ah} - e^{-2ah}) y
///            + (b sigma^2 / 2a)(1 - e^{-ah})^2 + remainder_var.
struct CirMoments {
    double mean = 0.0;
    double variance = 0.0;
    double remainder_mean = 0.0;
    double remainder_var = 0.0;
};
CirMoments cir_cond_moments(const CirParams& p, double y, double h);

/// The analytic remainders alone (series-evaluated for small ah, so they stay
/// fully accurate where the closed forms would cancel catastrophically).
double cir_remainder_mean(const CirParams& p, double h);
double cir_remainder_var(const CirParams& p, double y, double h);

/// Scalar full-truncation baselines for the CIR model (state clamped at zero
/// before square roots; Ito drift).
inline double cir_euler_maruyama_step(const CirParams& p, double y, const IncrementView& inc) {
    const double yp = std::max(y, 0.0);
    return y + p.a * (p.b - y) * inc.h + p.sigma * std::sqrt(yp) * inc.w(0);
}
inline double cir_milstein_step(const CirParams& p, double y, const IncrementView& inc) {
    const double w = inc.w(0);
    const double yp = std::max(y, 0.0);
    return y + p.a * (p.b - y) * inc.h + p.sigma * std::sqrt(yp) * w
         + 0.25 * p.sigma * p.sigma * (w * w - inc.h);
}

// ---------------------------------------------------------------------------
// Additive-noise schemes (templated over scalar / vector models)
// ---------------------------------------------------------------------------

/// Scalar additive model dy = f(y) dt + sigma dW with inlineable drift.
template <class F>
struct ScalarAdditiveModel {
    using State = double;
    F f;
    double sigma = 1.0;

    double drift(double y) const { return f(y); }
    template <class Fn>
    double apply_sigma(const IncrementView& inc, Fn&& combo) const {
        return sigma * combo(estimators::ScalarStepStats::from(inc, 0));
    }
};
template <class F>
ScalarAdditiveModel(F, double) -> ScalarAdditiveModel<F>;

/// Vector additive model dy = f(y) dt + sigma dW.
struct VectorAdditiveModel {
    using State = Eigen::VectorXd;
    std::function<State(const State&)> f;
    Eigen::MatrixXd sigma;

    State drift(const State& y) const { return f(y); }
    template <class Fn>
    State apply_sigma(const IncrementView& inc, Fn&& combo) const {
        Eigen::VectorXd c(inc.dim);
        for (int j = 0; j < inc.dim; ++j)
            c[j] = combo(estimators::ScalarStepStats::from(inc, j));
        return sigma * c;
    }
};

namespace combos {
using estimators::ScalarStepStats;
inline double w(const ScalarStepStats& s) { return s.w; }
inline double shifted_euler(const ScalarStepStats& s) { return 0.5 * s.w + s.hst; }
inline double sra1(const ScalarStepStats& s) { return s.w + 2.0 * s.hst; }
inline double hst(const ScalarStepStats& s) { return s.hst; }
inline double so1_first(const ScalarStepStats& s) { return s.hst + 0.5 * std::sqrt(s.h) * s.n; }
inline double so1_second(const ScalarStepStats& s) { return s.w - std::sqrt(s.h) * s.n; }
inline double so2_first(const ScalarStepStats& s) {
    return 0.5 * s.w + s.hst - 0.5 * estimators::c_so2(s);
}
inline double so2_second(const ScalarStepStats& s) { return estimators::c_so2(s); }
} // namespace combos

/// Shifted Euler: y' = y + f(y + sigma(W/2 + H)) h + sigma W.
template <class M>
typename M::State shifted_euler_step(const M& m, const typename M::State& y,
                                     const IncrementView& inc) {
    using S = typename M::State;
    const S shifted = y + m.apply_sigma(inc, combos::shifted_euler);
    return S(y + m.drift(shifted) * inc.h + m.apply_sigma(inc, combos::w));
}

/// Shifted Ralston over an SO1 or SO2 path: the interior ODE of the splitting
/// solved with Ralston's two-stage method,
///   Y~       = y + sigma C1,
///   Y~_{2/3} = Y~ + (2/3)(f(Y~) h + sigma C2),
///   y'       = y + f(Y~) h / 4 + 3 f(Y~_{2/3}) h / 4 + sigma W,
/// where C1, C2 are the path's first two spatial increments.
template <class M>
typename M::State shifted_ralston_step(const M& m, const typename M::State& y,
                                       const IncrementView& inc,
                                       PathKind kind = PathKind::SO2) {
    using S = typename M::State;
    S c1, c2;
    if (kind == PathKind::SO1) {
        c1 = m.apply_sigma(inc, combos::so1_first);
        c2 = m.apply_sigma(inc, combos::so1_second);
    } else if (kind == PathKind::SO2) {
        c1 = m.apply_sigma(inc, combos::so2_first);
        c2 = m.apply_sigma(inc, combos::so2_second);
    } else {
        throw ConfigError("shifted_ralston_step: path kind must be SO1 or SO2");
    }
    const S y1 = y + c1;
    const S f1 = m.drift(y1);
    const S y23 = y1 + (2.0 / 3.0) * (f1 * inc.h + c2);
    return S(y + 0.25 * f1 * inc.h + 0.75 * m.drift(y23) * inc.h
             + m.apply_sigma(inc, combos::w));
}

/// SRA1 (strong order 3/2 for additive noise):
///   y' = y + f(y) h/3 + (2/3) f(y + (3/4)(f(y) h + sigma(W + 2H))) h + sigma W.
template <class M>
typename M::State sra1_step(const M& m, const typename M::State& y, const IncrementView& inc) {
    using S = typename M::State;
    const S f0 = m.drift(y);
    const S y2 = y + 0.75 * (f0 * inc.h + m.apply_sigma(inc, combos::sra1));
    return S(y + f0 * (inc.h / 3.0) + (2.0 / 3.0) * m.drift(y2) * inc.h
             + m.apply_sigma(inc, combos::w));
}

/// Strong 1.5 stochastic Runge-Kutta method:
///   Y~       = y + sigma H,
///   Y~_{5/6} = Y~ + (5/6)(f(Y~) h + sigma W),
///   y'       = y + (2/5) f(Y~) h + (3/5) f(Y~_{5/6}) h + sigma W.
template <class M>
typename M::State srk_new_step(const M& m, const typename M::State& y,
                               const IncrementView& inc) {
    using S = typename M::State;
    const S noise = m.apply_sigma(inc, combos::w);
    const S y1 = y + m.apply_sigma(inc, combos::hst);
    const S f1 = m.drift(y1);
    const S y56 = y1 + (5.0 / 6.0) * (f1 * inc.h + noise);
    return S(y + 0.4 * f1 * inc.h + 0.6 * m.drift(y56) * inc.h + noise);
}

/// Euler-Maruyama for additive noise.
template <class M>
typename M::State euler_maruyama_additive_step(const M& m, const typename M::State& y,
                                               const IncrementView& inc) {
    using S = typename M::State;
    return S(y + m.drift(y) * inc.h + m.apply_sigma(inc, combos::w));
}

namespace detail {
inline double state_norm(double x) { return std::abs(x); }
inline double state_norm(const Eigen::VectorXd& x) { return x.norm(); }
} // namespace detail

/// Tamed Euler for additive noise: the drift increment is divided by
/// 1 + h |f(y)|.
template <class M>
typename M::State tamed_euler_additive_step(const M& m, const typename M::State& y,
                                            const IncrementView& inc) {
    using S = typename M::State;
    const S f0 = m.drift(y);
    const double tame = 1.0 + inc.h * detail::state_norm(f0);
    return S(y + f0 * (inc.h / tame) + m.apply_sigma(inc, combos::w));
}

// ---------------------------------------------------------------------------
// General-model baselines (Eigen states)
// ---------------------------------------------------------------------------

Eigen::VectorXd euler_maruyama_step(const SdeModel& m, const Eigen::VectorXd& y,
                                    const IncrementView& inc);
/// Scalar-noise Milstein (Ito form): adds (g g')(y)(W^2 - h)/2. Requires the
/// model's milstein_correction field.
Eigen::VectorXd milstein_step(const SdeModel& m, const Eigen::VectorXd& y,
                              const IncrementView& inc);
Eigen::VectorXd tamed_euler_step(const SdeModel& m, const Eigen::VectorXd& y,
                                 const IncrementView& inc);

// ---------------------------------------------------------------------------
// FitzHugh-Nagumo high order splitting
// ---------------------------------------------------------------------------

/// Per-step-size state for the FHN splitting (the linear half-step matrix and
/// the cubic-flow exponential are the same every step).
struct FhnSplitStepper {
    FhnSplitStepper(const FhnParams& params, double h);

    Eigen::Vector2d step(const Eigen::Vector2d& vu, const IncrementView& inc) const;

    FhnParams p;
    double h;
    Eigen::Matrix2d linear_half; // exp((h/2) [[0, -1/eps], [gamma, -1]])
    double cubic_decay;          // exp(-h / (2 eps)), the quarter-step flow constant
    double beta_quarter;

private:
    Eigen::Vector2d phi_strang_half(Eigen::Vector2d z) const;
};

/// One step of the FHN splitting driven by the five-piece nonlinear path:
/// noise shifts sigma (W/2 + H - C/2), phi^Strang_{h/2}, sigma C,
/// phi^Strang_{h/2}, sigma (W/2 - H - C/2), with C per coordinate from the
/// optimal-estimator formula.
Eigen::Vector2d fhn_split_step(const FhnParams& p, const Eigen::Vector2d& vu,
                               const IncrementView& inc);

/// Scalar-pair Tamed Euler for the FHN model (baseline).
Eigen::Vector2d fhn_tamed_euler_step(const FhnParams& p, const Eigen::Vector2d& vu,
                                     const IncrementView& inc);

// ---------------------------------------------------------------------------
// SORT method for underdamped Langevin dynamics
// ---------------------------------------------------------------------------

namespace sort_coeffs {
/// g1(z) = (1 - e^{-z})/z and g2(z) = (e^{-z} + z - 1)/z^2, with series
/// fallback below z = 1e-4 to avoid cancellation. Both variants are exposed
/// so the switchover can be tested.
inline double g1_exact(double z) { return -std::expm1(-z) / z; }
inline double g1_series(double z) {
    return 1.0 + z * (-1.0 / 2.0 + z * (1.0 / 6.0 + z * (-1.0 / 24.0 + z / 120.0)));
}
inline double g1(double z) { return z < 1e-4 ? g1_series(z) : g1_exact(z); }

inline double g2_exact(double z) { return (std::expm1(-z) + z) / (z * z); }
inline double g2_series(double z) {
    return 0.5 + z * (-1.0 / 6.0 + z * (1.0 / 24.0 + z * (-1.0 / 120.0 + z / 720.0)));
}
inline double g2(double z) { return z < 1e-4 ? g2_series(z) : g2_exact(z); }
} // namespace sort_coeffs

namespace detail {
template <class State, class Fn>
State noise_combo(const IncrementView& inc, double scale, Fn&& f) {
    if constexpr (std::is_same_v<State, double>) {
        return scale * f(inc, 0);
    } else {
        State out(inc.dim);
        for (int j = 0; j < inc.dim; ++j) out[j] = scale * f(inc, j);
        return out;
    }
}
} // namespace detail

/// SORT: the shifted ODE for underdamped Langevin dynamics, resolved with a
/// third order Runge-Kutta method. The velocity is shifted by
/// sqrt(2 gamma u)(H + 6K) going in and by -sqrt(2 gamma u)(H - 6K) coming
/// out; the interior ODE is driven by the constant noise rate
/// sqrt(2 gamma u)(W - 12K)/h and uses gradient evaluations at X_n, X^{(1)}
/// and X_{n+1}; the last one is cached for the next step, so a warm step
/// costs two fresh gradient evaluations.
template <class State, class Grad>
class SortStepper {
public:
    SortStepper(double u, double gamma_friction, Grad grad)
        : u_(u), gamma_(gamma_friction), scale_(std::sqrt(2.0 * gamma_friction * u)),
          grad_(std::move(grad)) {
        if (!(gamma_friction > 0.0)) throw ConfigError("SORT requires gamma > 0");
    }

    /// Clears the gradient cache (call when starting a new trajectory).
    void reset() { cached_grad_.reset(); }

    std::pair<State, State> step(const State& x, const State& v, const IncrementView& inc) {
        if (!inc.has_k()) throw ConfigError("SORT requires increments carrying k");
        using detail::noise_combo;
        const double h = inc.h;
        const double z = gamma_ * h;
        const double f1_half = 0.5 * h * sort_coeffs::g1(0.5 * z);
        const double f2_half = 0.25 * h * h * sort_coeffs::g2(0.5 * z);
        const double f1_full = h * sort_coeffs::g1(z);
        const double f2_full = h * h * sort_coeffs::g2(z);
        const double eh = std::exp(-z);
        const double eh_half = std::exp(-0.5 * z);

        const State v1 = v + noise_combo<State>(inc, scale_, [](const IncrementView& w, int j) {
                             return w.hst(j) + 6.0 * w.k(j);
                         });
        const State xi = noise_combo<State>(inc, scale_, [](const IncrementView& w, int j) {
            return w.w(j) - 12.0 * w.k(j);
        });
        const State g0 = cached_grad_ ? *cached_grad_ : grad_(x);
        const State x1 = x + f1_half * v1 - (f2_half * u_) * g0 + (f2_half / h) * xi;
        const State g1 = grad_(x1);
        const State x_next =
            x + f1_full * v1 - (f2_full * u_) * (g0 / 3.0 + (2.0 / 3.0) * g1)
            + (f2_full / h) * xi;
        const State g2 = grad_(x_next);
        const State v2 = eh * v1 - (h / 6.0 * eh * u_) * g0 - (2.0 * h / 3.0 * eh_half * u_) * g1
                       - (h / 6.0 * u_) * g2 + (f1_full / h) * xi;
        const State v_next =
            v2 - noise_combo<State>(inc, scale_, [](const IncrementView& w, int j) {
                return w.hst(j) - 6.0 * w.k(j);
            });
        cached_grad_ = g2;
        return {x_next, v_next};
    }

private:
    double u_;
    double gamma_;
    double scale_;
    Grad grad_;
    std::optional<State> cached_grad_;
};

// ---------------------------------------------------------------------------
// Scheme specification and the generic driver
// ---------------------------------------------------------------------------

enum class SchemeId {
    PathSplitting,
    CirSplitting,
    ShiftedEuler,
    ShiftedRalston,
    Sra1,
    EulerMaruyama,
    Milstein,
    TamedEuler,
    SrkNew,
    FhnSplitting,
    Sort,
};

struct SchemeSpec {
    SchemeId id = SchemeId::ShiftedRalston;
    PathKind path_kind = PathKind::SO2; // for PathSplitting / ShiftedRalston
    OdeSubstepConfig ode;

    bool needs_k() const {
        return id == SchemeId::Sort
            || (id == SchemeId::PathSplitting && path_kind_needs_k(path_kind));
    }
};

const char* scheme_name(SchemeId id);
SchemeSpec parse_scheme(const std::string& name, const std::string& path_kind);

/// Iterates a step function over N increments from the source; StepErrors are
/// re-thrown annotated with the step index.
template <class State, class Step, class Source>
State simulate(State y, long num_steps, Step&& step, Source&& source) {
    for (long k = 0; k < num_steps; ++k) {
        try {
            y = step(y, source(k), k);
        } catch (const StepError& e) {
            throw e.with_step(k);
        }
    }
    return y;
}

} // namespace pathsplit

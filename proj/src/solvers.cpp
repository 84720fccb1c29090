#include "pathsplit/solvers.hpp"

#include <cmath>
#include <limits>

namespace pathsplit {

// ---------------------------------------------------------------------------
// Path-driven splitting integrator
// ---------------------------------------------------------------------------

namespace {

template <class F>
Eigen::VectorXd ralston2_solve(F&& field, Eigen::VectorXd y, double t, int substeps) {
    const double dt = t / substeps;
    for (int s = 0; s < substeps; ++s) {
        const Eigen::VectorXd k1 = field(y);
        const Eigen::VectorXd k2 = field(y + (2.0 / 3.0) * dt * k1);
        y += dt * (0.25 * k1 + 0.75 * k2);
    }
    return y;
}

template <class F>
Eigen::VectorXd rk4_solve(F&& field, Eigen::VectorXd y, double t, int substeps) {
    const double dt = t / substeps;
    for (int s = 0; s < substeps; ++s) {
        const Eigen::VectorXd k1 = field(y);
        const Eigen::VectorXd k2 = field(y + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = field(y + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = field(y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

} // namespace

Eigen::VectorXd splitting_step(const SdeModel& model, const SplittingPath& path,
                               Eigen::VectorXd y, const OdeSubstepConfig& cfg) {
    const int d = path.dim();
    long segment_index = 0;
    for (const PathSegment& seg : path.segments) {
        const bool has_time = seg.dtau != 0.0;
        const bool has_space = !seg.dw.isZero(0.0);
        if (has_time && !has_space) {
            const bool use_exact =
                cfg.drift == DriftSolver::Exact
                || (cfg.drift == DriftSolver::Auto && static_cast<bool>(model.exact_drift_flow));
            if (use_exact) {
                if (!model.exact_drift_flow)
                    throw ConfigError("splitting_step: model has no exact drift flow");
                y = model.exact_drift_flow(y, seg.dtau);
            } else if (cfg.drift == DriftSolver::Rk4) {
                y = rk4_solve([&](const Eigen::VectorXd& x) { return model.drift(x); }, y,
                              seg.dtau, cfg.substeps);
            } else {
                y = ralston2_solve([&](const Eigen::VectorXd& x) { return model.drift(x); }, y,
                                   seg.dtau, cfg.substeps);
            }
        } else if (has_space && !has_time) {
            const bool use_exact = cfg.diffusion == DiffusionSolver::Exact
                || (cfg.diffusion == DiffusionSolver::Auto
                    && static_cast<bool>(model.exact_diffusion_flow));
            if (use_exact) {
                if (!model.exact_diffusion_flow)
                    throw ConfigError("splitting_step: model has no exact diffusion flow");
                // Columns commute, so the composition order is immaterial.
                for (int i = 0; i < d; ++i)
                    if (seg.dw[i] != 0.0) y = model.exact_diffusion_flow(y, i, seg.dw[i]);
            } else {
                auto field = [&](const Eigen::VectorXd& x) {
                    Eigen::VectorXd v = Eigen::VectorXd::Zero(y.size());
                    for (int i = 0; i < d; ++i)
                        if (seg.dw[i] != 0.0) v += seg.dw[i] * model.diffusion_col(x, i);
                    return v;
                };
                y = rk4_solve(field, y, 1.0, cfg.substeps);
            }
        } else if (has_time && has_space) {
            auto field = [&](const Eigen::VectorXd& x) {
                Eigen::VectorXd v = seg.dtau * model.drift(x);
                for (int i = 0; i < d; ++i)
                    if (seg.dw[i] != 0.0) v += seg.dw[i] * model.diffusion_col(x, i);
                return v;
            };
            y = rk4_solve(field, y, 1.0, cfg.substeps);
        }
        if (model.in_domain && !model.in_domain(y))
            throw StepError("splitting_step: state left the model domain", -1, segment_index);
        ++segment_index;
    }
    return y;
}

// ---------------------------------------------------------------------------
// CIR splitting
// ---------------------------------------------------------------------------

CirSplitStepper::CirSplitStepper(const CirParams& params, double h) {
    params.validate();
    const double outer = (3.0 - root3) / 6.0 * params.a * h;
    const double mid = root3 / 3.0 * params.a * h;
    e_outer = std::exp(-outer);
    e_mid = std::exp(-mid);
    bt_outer = params.b_tilde() * (1.0 - e_outer);
    bt_mid = params.b_tilde() * (1.0 - e_mid);
    half_sigma = 0.5 * params.sigma;
}

double cir_split_step(const CirParams& p, double y, const IncrementView& inc) {
    return CirSplitStepper(p, inc.h).step(y, inc);
}

namespace {

// The CIR moment remainders are differences of O(h)-sized exponential
// combinations that agree to fourth order, so the closed forms lose all
// precision for small ah. Each bracket has a clean power series whose first
// four coefficients vanish exactly; the series is used below the switch
// point, the closed form above it.
constexpr double kBracketSwitch = 1.0;

// Power sums c1^m + c2^m for conjugate pairs follow the recurrence
// s_m = p s_{m-1} - q s_{m-2} with p = c1 + c2, q = c1 c2.

// 0.5 (e^{-c1 z} + e^{-c2 z}) - (1 - e^{-z})/z with c = (3 +- sqrt3)/6.
double bracket_mean(double z) {
    if (z >= kBracketSwitch)
        return 0.5 * (std::exp(-(3.0 + std::sqrt(3.0)) / 6.0 * z)
                      + std::exp(-(3.0 - std::sqrt(3.0)) / 6.0 * z))
             + std::expm1(-z) / z;
    double s_prev = 2.0, s_cur = 1.0; // s_0, s_1 with p = 1, q = 1/6
    double factorial = 1.0;           // m!
    double zpow = z; // becomes z^m after the in-loop update
    double sum = 0.0;
    for (int m = 2; m <= 48; ++m) {
        const double s_next = s_cur - s_prev / 6.0;
        s_prev = s_cur;
        s_cur = s_next;
        factorial *= m;
        zpow *= z;
        if (m < 4) continue;
        const double coef = s_cur / (2.0 * factorial) - 1.0 / (factorial * (m + 1));
        const double value = (m % 2 == 0 ? 1.0 : -1.0) * coef * zpow;
        sum += value;
        if (std::abs(value) < 1e-3 * std::numeric_limits<double>::epsilon() * std::abs(sum))
            break;
    }
    return sum;
}

// 0.5 (e^{-d1 z} + e^{-d2 z}) - (e^{-z} - e^{-2z})/z with d = (9 +- sqrt3)/6.
double bracket_var_y(double z) {
    if (z >= kBracketSwitch)
        return 0.5 * (std::exp(-(9.0 + std::sqrt(3.0)) / 6.0 * z)
                      + std::exp(-(9.0 - std::sqrt(3.0)) / 6.0 * z))
             - (std::exp(-z) - std::exp(-2.0 * z)) / z;
    double t_prev = 2.0, t_cur = 3.0; // p = 3, q = 13/6
    double factorial = 1.0;
    double zpow = z; // becomes z^m after the in-loop update
    double pow2 = 2.0; // 2^{m}
    double sum = 0.0;
    for (int m = 2; m <= 60; ++m) {
        const double t_next = 3.0 * t_cur - 13.0 / 6.0 * t_prev;
        t_prev = t_cur;
        t_cur = t_next;
        factorial *= m;
        zpow *= z;
        pow2 *= 2.0;
        if (m < 4) continue;
        const double coef = t_cur / (2.0 * factorial) - (2.0 * pow2 - 1.0) / (factorial * (m + 1));
        sum += (m % 2 == 0 ? 1.0 : -1.0) * coef * zpow;
        if (std::abs(coef * zpow) < 1e-3 * std::numeric_limits<double>::epsilon() * std::abs(sum))
            break;
    }
    return sum;
}

// (e^{-g1 z} + e^{-g2 z} - e^{-d1 z} - e^{-d2 z}) - (1 - e^{-z})^2 / z
// with g = (3 +- sqrt3)/3.
double bracket_var_b(double z) {
    if (z >= kBracketSwitch) {
        const double em = -std::expm1(-z);
        return std::exp(-(3.0 + std::sqrt(3.0)) / 3.0 * z)
             + std::exp(-(3.0 - std::sqrt(3.0)) / 3.0 * z)
             - std::exp(-(9.0 + std::sqrt(3.0)) / 6.0 * z)
             - std::exp(-(9.0 - std::sqrt(3.0)) / 6.0 * z) - em * em / z;
    }
    double u_prev = 2.0, u_cur = 2.0; // p = 2, q = 2/3
    double t_prev = 2.0, t_cur = 3.0; // p = 3, q = 13/6
    double factorial = 1.0;
    double zpow = z; // becomes z^m after the in-loop update
    double pow2 = 2.0;
    double sum = 0.0;
    for (int m = 2; m <= 60; ++m) {
        const double u_next = 2.0 * u_cur - 2.0 / 3.0 * u_prev;
        u_prev = u_cur;
        u_cur = u_next;
        const double t_next = 3.0 * t_cur - 13.0 / 6.0 * t_prev;
        t_prev = t_cur;
        t_cur = t_next;
        factorial *= m;
        zpow *= z;
        pow2 *= 2.0;
        if (m < 4) continue;
        const double coef =
            (u_cur - t_cur) / factorial + (2.0 * pow2 - 2.0) / (factorial * (m + 1));
        sum += (m % 2 == 0 ? 1.0 : -1.0) * coef * zpow;
        if (std::abs(coef * zpow) < 1e-3 * std::numeric_limits<double>::epsilon() * std::abs(sum))
            break;
    }
    return sum;
}

// 0.5 e^{-z} + 0.25 (e^{-g1 z} + e^{-g2 z}) - ((1 - e^{-z})/z)^2.
double bracket_var_sigma(double z) {
    if (z >= kBracketSwitch) {
        const double r = -std::expm1(-z) / z;
        return 0.5 * std::exp(-z)
             + 0.25 * (std::exp(-(3.0 + std::sqrt(3.0)) / 3.0 * z)
                       + std::exp(-(3.0 - std::sqrt(3.0)) / 3.0 * z))
             - r * r;
    }
    // q_m = sum_{i+j=m} 1/((i+1)!(j+1)!), the convolution square of 1/(m+1)!.
    constexpr int kMax = 40;
    double inv_fact_shift[kMax + 1]; // 1/(m+1)!
    double fact = 1.0;
    for (int m = 0; m <= kMax; ++m) {
        fact *= m + 1;
        inv_fact_shift[m] = 1.0 / fact;
    }
    double u_prev = 2.0, u_cur = 2.0;
    double factorial = 1.0;
    double zpow = z; // becomes z^m after the in-loop update
    double sum = 0.0;
    for (int m = 2; m <= kMax; ++m) {
        const double u_next = 2.0 * u_cur - 2.0 / 3.0 * u_prev;
        u_prev = u_cur;
        u_cur = u_next;
        factorial *= m;
        zpow *= z;
        if (m < 4) continue;
        double q = 0.0;
        for (int i = 0; i <= m; ++i) q += inv_fact_shift[i] * inv_fact_shift[m - i];
        const double coef = 0.5 / factorial + 0.25 * u_cur / factorial - q;
        sum += (m % 2 == 0 ? 1.0 : -1.0) * coef * zpow;
        if (std::abs(coef * zpow) < 1e-3 * std::numeric_limits<double>::epsilon() * std::abs(sum))
            break;
    }
    return sum;
}

} // namespace

double cir_remainder_mean(const CirParams& p, double h) {
    const double z = p.a * h;
    return 0.25 * p.sigma * p.sigma * h * bracket_mean(z);
}

double cir_remainder_var(const CirParams& p, double y, double h) {
    const double z = p.a * h;
    const double s2 = p.sigma * p.sigma;
    return s2 * h * bracket_var_y(z) * y + 0.5 * p.b_tilde() * s2 * h * bracket_var_b(z)
         + 0.125 * s2 * s2 * h * h * bracket_var_sigma(z);
}

CirMoments cir_cond_moments(const CirParams& p, double y, double h) {
    if (!(y >= 0.0)) throw std::domain_error("cir_cond_moments: y must be nonnegative");
    if (!(h > 0.0)) throw std::domain_error("cir_cond_moments: h must be positive");
    p.validate();
    const double e = std::exp(-p.a * h);
    CirMoments m;
    m.remainder_mean = cir_remainder_mean(p, h);
    m.remainder_var = cir_remainder_var(p, y, h);
    m.mean = e * y + p.b * (1.0 - e) + m.remainder_mean;
    m.variance = p.sigma * p.sigma / p.a * (e - e * e) * y
               + p.b * p.sigma * p.sigma / (2.0 * p.a) * (1.0 - e) * (1.0 - e)
               + m.remainder_var;
    return m;
}

// ---------------------------------------------------------------------------
// General-model baselines
// ---------------------------------------------------------------------------

Eigen::VectorXd euler_maruyama_step(const SdeModel& m, const Eigen::VectorXd& y,
                                    const IncrementView& inc) {
    Eigen::VectorXd out = y + m.ito_drift(y) * inc.h;
    for (int i = 0; i < m.dim_noise; ++i) out += m.diffusion_col(y, i) * inc.w(i);
    return out;
}

Eigen::VectorXd milstein_step(const SdeModel& m, const Eigen::VectorXd& y,
                              const IncrementView& inc) {
    if (m.dim_noise != 1)
        throw ConfigError("milstein_step: implemented for scalar noise only");
    if (!m.milstein_correction)
        throw ConfigError("milstein_step: model provides no Milstein correction field");
    const double w = inc.w(0);
    return y + m.ito_drift(y) * inc.h + m.diffusion_col(y, 0) * w
         + m.milstein_correction(y) * (0.5 * (w * w - inc.h));
}

Eigen::VectorXd tamed_euler_step(const SdeModel& m, const Eigen::VectorXd& y,
                                 const IncrementView& inc) {
    const Eigen::VectorXd f = m.ito_drift(y);
    Eigen::VectorXd out = y + f * (inc.h / (1.0 + inc.h * f.norm()));
    for (int i = 0; i < m.dim_noise; ++i) out += m.diffusion_col(y, i) * inc.w(i);
    return out;
}

// ---------------------------------------------------------------------------
// FitzHugh-Nagumo splitting
// ---------------------------------------------------------------------------

FhnSplitStepper::FhnSplitStepper(const FhnParams& params, double step_h)
    : p(params), h(step_h) {
    p.validate();
    linear_half = fhn_linear_exponential(p, 0.5 * h);
    cubic_decay = std::exp(-0.5 * h / p.epsilon);
    beta_quarter = 0.25 * p.beta * h;
}

Eigen::Vector2d FhnSplitStepper::phi_strang_half(Eigen::Vector2d z) const {
    z[0] = z[0] / std::sqrt(cubic_decay + z[0] * z[0] * (1.0 - cubic_decay));
    z[1] += beta_quarter;
    z = (linear_half * z).eval();
    z[0] = z[0] / std::sqrt(cubic_decay + z[0] * z[0] * (1.0 - cubic_decay));
    z[1] += beta_quarter;
    return z;
}

Eigen::Vector2d FhnSplitStepper::step(const Eigen::Vector2d& vu, const IncrementView& inc) const {
    const double s1 = p.sigma1;
    const double s2 = p.sigma2;
    const auto st0 = estimators::ScalarStepStats::from(inc, 0);
    const auto st1 = estimators::ScalarStepStats::from(inc, 1);
    const double c0 = estimators::c_hs2(st0);
    const double c1 = estimators::c_hs2(st1);

    Eigen::Vector2d z = vu;
    z[0] += s1 * (0.5 * st0.w + st0.hst - 0.5 * c0);
    z[1] += s2 * (0.5 * st1.w + st1.hst - 0.5 * c1);
    z = phi_strang_half(z);
    z[0] += s1 * c0;
    z[1] += s2 * c1;
    z = phi_strang_half(z);
    z[0] += s1 * (0.5 * st0.w - st0.hst - 0.5 * c0);
    z[1] += s2 * (0.5 * st1.w - st1.hst - 0.5 * c1);
    return z;
}

Eigen::Vector2d fhn_split_step(const FhnParams& p, const Eigen::Vector2d& vu,
                               const IncrementView& inc) {
    return FhnSplitStepper(p, inc.h).step(vu, inc);
}

Eigen::Vector2d fhn_tamed_euler_step(const FhnParams& p, const Eigen::Vector2d& vu,
                                     const IncrementView& inc) {
    const double v = vu[0];
    const double u = vu[1];
    Eigen::Vector2d f((v - v * v * v - u) / p.epsilon, p.gamma * v - u + p.beta);
    const double tame = 1.0 + inc.h * f.norm();
    return Eigen::Vector2d(v + f[0] * inc.h / tame + p.sigma1 * inc.w(0),
                           u + f[1] * inc.h / tame + p.sigma2 * inc.w(1));
}

// ---------------------------------------------------------------------------
// Scheme names
// ---------------------------------------------------------------------------

const char* scheme_name(SchemeId id) {
    switch (id) {
        case SchemeId::PathSplitting: return "splitting";
        case SchemeId::CirSplitting: return "cir-splitting";
        case SchemeId::ShiftedEuler: return "shifted-euler";
        case SchemeId::ShiftedRalston: return "shifted-ralston";
        case SchemeId::Sra1: return "sra1";
        case SchemeId::EulerMaruyama: return "euler-maruyama";
        case SchemeId::Milstein: return "milstein";
        case SchemeId::TamedEuler: return "tamed-euler";
        case SchemeId::SrkNew: return "srk";
        case SchemeId::FhnSplitting: return "fhn-splitting";
        case SchemeId::Sort: return "sort";
    }
    return "?";
}

SchemeSpec parse_scheme(const std::string& name, const std::string& path_kind) {
    SchemeSpec spec;
    bool found = false;
    for (SchemeId id : {SchemeId::PathSplitting, SchemeId::CirSplitting, SchemeId::ShiftedEuler,
                        SchemeId::ShiftedRalston, SchemeId::Sra1, SchemeId::EulerMaruyama,
                        SchemeId::Milstein, SchemeId::TamedEuler, SchemeId::SrkNew,
                        SchemeId::FhnSplitting, SchemeId::Sort}) {
        if (name == scheme_name(id)) {
            spec.id = id;
            found = true;
            break;
        }
    }
    if (!found) throw ConfigError("unknown scheme: " + name);
    if (!path_kind.empty()) spec.path_kind = parse_path_kind(path_kind);
    if (spec.id == SchemeId::ShiftedRalston && spec.path_kind != PathKind::SO1
        && spec.path_kind != PathKind::SO2)
        throw ConfigError("shifted-ralston supports path kinds SO1 and SO2");
    return spec;
}

} // namespace pathsplit

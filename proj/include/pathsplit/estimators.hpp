#pragma once

#include <cmath>

#include "pathsplit/brownian.hpp"

namespace pathsplit {

/// Closed-form conditional-expectation estimators for third-order iterated
/// integrals of Brownian motion given one step's (W, H, n). These drive the
/// non-linear splitting paths and the scheme error analysis.
namespace estimators {

inline const double kPi = 3.14159265358979323846264338327950288;
inline const double kSqrt6Pi = std::sqrt(6.0 * kPi);
inline const double kSqrt24Pi = std::sqrt(24.0 * kPi);

/// One coordinate's step statistics.
struct ScalarStepStats {
    double h = 0.0;
    double w = 0.0;
    double hst = 0.0;
    double n = 1.0; // +1 or -1

    static ScalarStepStats from(const IncrementView& inc, int j) {
        return ScalarStepStats{inc.h, inc.w(j), inc.hst(j), inc.n(j)};
    }
};

/// E[L | W, H, n] for the space-space-time Levy area L:
///   h^2/30 + (3/5) h H^2 - n h^{3/2} W / (8 sqrt(6 pi)).
inline double l_cond_mean(const ScalarStepStats& s) {
    return s.h * s.h / 30.0 + 0.6 * s.h * s.hst * s.hst
         - s.n * std::pow(s.h, 1.5) * s.w / (8.0 * kSqrt6Pi);
}

/// Var(L | W, H, n):
///   11 h^4/25200 + (1/720 - 1/(384 pi)) h^3 W^2 + h^3 H^2/700
///   - n h^{7/2} W / (320 sqrt(6 pi)).
/// Always nonnegative; a negative value indicates a bug and throws.
double l_cond_var(const ScalarStepStats& s);

/// E[int_s^t W_{s,u}^2 du | W, H, n]
///   = h W^2/3 + h W H + h^2/15 + (6/5) h H^2 - n h^{3/2} W / (4 sqrt(6 pi)),
/// equivalently h W^2/3 + h W H + 2 l_cond_mean.
inline double int_w2_cond_mean(const ScalarStepStats& s) {
    return s.h * s.w * s.w / 3.0 + s.h * s.w * s.hst + s.h * s.h / 15.0
         + 1.2 * s.h * s.hst * s.hst - s.n * std::pow(s.h, 1.5) * s.w / (4.0 * kSqrt6Pi);
}

/// E[K | n] = n h^{1/2} / (8 sqrt(6 pi)).
inline double k_cond_mean(double n, double h) {
    return n * std::sqrt(h) / (8.0 * kSqrt6Pi);
}

/// Var(K) = h/720; also E[K^2 | n] = h/720 regardless of n.
inline double k_variance(double h) { return h / 720.0; }

/// Sign choice for the non-linear paths: sgn(W - (3/sqrt(24 pi)) h^{1/2} n),
/// with sgn(0) = +1.
inline double epsilon_sign(const ScalarStepStats& s) {
    return sign_pm(s.w - 3.0 / kSqrt24Pi * std::sqrt(s.h) * s.n);
}

/// Middle spatial increment of the five-piece high order Strang path:
///   eps * sqrt(W^2/3 + (4/5) H^2 + (4/15) h - n h^{1/2} W / sqrt(6 pi)).
/// The radicand is a conditional second moment and cannot be negative; a
/// negative value throws with diagnostics.
double c_hs2(const ScalarStepStats& s);

/// Middle spatial increment of the three-piece shifted ODE path:
///   eps * sqrt(W^2 + (12/5) H^2 + (4/5) h - 3 n h^{1/2} W / sqrt(6 pi)).
double c_so2(const ScalarStepStats& s);

/// Radicands exposed for the nonnegativity property sweep.
inline double c_hs2_radicand(const ScalarStepStats& s) {
    return s.w * s.w / 3.0 + 0.8 * s.hst * s.hst + 4.0 / 15.0 * s.h
         - s.n * std::sqrt(s.h) * s.w / kSqrt6Pi;
}
inline double c_so2_radicand(const ScalarStepStats& s) {
    return s.w * s.w + 2.4 * s.hst * s.hst + 0.8 * s.h
         - 3.0 * s.n * std::sqrt(s.h) * s.w / kSqrt6Pi;
}

/// E[int_s^t (u-s) W_{s,u} du | W, H, n]
///   = h^2 W/3 + h^2 H/2 - n h^{5/2} / (8 sqrt(6 pi)).
/// The path verifier ranks candidate sign choices against this target.
inline double stt_target(const ScalarStepStats& s) {
    return s.h * s.h * s.w / 3.0 + 0.5 * s.h * s.h * s.hst
         - s.n * std::pow(s.h, 2.5) / (8.0 * kSqrt6Pi);
}

} // namespace estimators
} // namespace pathsplit

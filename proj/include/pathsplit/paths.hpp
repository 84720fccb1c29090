#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathsplit/brownian.hpp"
#include "pathsplit/estimators.hpp"

namespace pathsplit {

/// The piecewise linear splitting paths. LT/Strang are the classical first
/// order splittings; HS1/HS2 are five-piece high order Strang paths; SO1/SO2
/// are three-piece high order shifted ODE paths; SO3 is the low order shifted
/// ODE path behind the shifted Euler method; SO4 is the shifted ODE path for
/// underdamped Langevin dynamics (uses the space-time-time area K).
enum class PathKind { LT1, LT2, Strang, HS1, HS2, SO1, SO2, SO3, SO4 };

const char* path_kind_name(PathKind kind);
PathKind parse_path_kind(const std::string& name);

/// True for the kinds whose construction needs K.
inline bool path_kind_needs_k(PathKind kind) { return kind == PathKind::SO4; }

/// One linear piece of a driving path in R^{1+d}: a time increment and a
/// spatial increment. Zero spatial jumps are retained so that segment indices
/// stay stable across samples.
struct PathSegment {
    double dtau = 0.0;
    Eigen::ArrayXd dw;
};

struct SplittingPath {
    PathKind kind = PathKind::LT1;
    double h = 0.0; // source step length
    std::vector<PathSegment> segments;

    int dim() const { return segments.empty() ? 0 : static_cast<int>(segments[0].dw.size()); }
};

/// Iterated integrals of a piecewise linear path, computed in closed form
/// (the integrands are polynomials of degree <= 2 over linear pieces).
struct PathIntegrals {
    double total_dtau = 0.0;
    Eigen::ArrayXd total_dw;
    Eigen::ArrayXd i_w_tau;  // int (w - w_0) dtau
    Eigen::ArrayXd i_w2_tau; // int (w - w_0)^2 dtau, per coordinate
    Eigen::ArrayXd i_tw_tau; // int (tau - tau_0)(w - w_0) dtau
};

/// Builds the path of the given kind from one step's statistics. The
/// one-dimensional construction is applied independently per coordinate with
/// a shared time skeleton. SO4 requires k and throws ConfigError without it.
SplittingPath build_path(PathKind kind, const IncrementView& inc);

PathIntegrals exact_integrals(const SplittingPath& path);

/// Third order cross integrals of the path for a coordinate pair (i, j):
///   [0] int dgamma^i dgamma^j dtau
///   [1] int dgamma^i dtau dgamma^j
///   [2] int dtau dgamma^i dgamma^j
/// (iterated over the simplex, innermost integral first).
std::array<double, 3> triple_cross_integrals(const SplittingPath& path, int i, int j);

/// Result of the Monte Carlo / exact verification of the matching conditions
/// behind the strong convergence order of the splitting schemes.
struct ConditionReport {
    PathKind kind;
    int dim = 0;
    long num_samples = 0;
    double h = 0.0;

    // (a) per-sample exact checks, as max |deviation| / scale.
    double max_rel_dev_increment = 0.0; // sum of spatial increments vs W
    double max_rel_dev_i_w_tau = 0.0;   // i_w_tau vs h (W/2 + H)
    bool exact_expected = false;        // kinds designed to satisfy (a)
    bool exact_passed = false;          // at tolerance 1e-12

    // (b) per-sample i_w2_tau vs int_w2_cond_mean (HS2 / SO2 only).
    bool has_per_sample_w2 = false;
    double max_rel_dev_i_w2 = 0.0;
    bool per_sample_w2_passed = true;

    // (c) Monte Carlo moment checks.
    double mean_i_w2 = 0.0;      // target h^2/2
    double stderr_i_w2 = 0.0;
    bool mean_w2_expected = false; // kinds matching E[i_w2] = h^2/2
    bool mean_w2_passed = false;   // within 4 standard errors
    std::array<double, 3> cross_mean{{0.0, 0.0, 0.0}};   // d >= 2 only
    std::array<double, 3> cross_stderr{{0.0, 0.0, 0.0}};
    bool cross_passed = true;

    // (d) discrepancy of i_tw_tau against the space-time-time target.
    double tw_mean_discrepancy = 0.0;
    double tw_rms_discrepancy = 0.0;

    bool all_passed() const {
        const bool a = exact_expected ? exact_passed : true;
        return a && per_sample_w2_passed && (mean_w2_expected ? mean_w2_passed : true)
            && cross_passed;
    }
};

/// Samples num_samples increments at the given step length, builds the path
/// of the requested kind for each and checks the matching conditions.
/// Requires num_samples >= 10^4.
ConditionReport verify_conditions(PathKind kind, long num_samples, double h, int d,
                                  std::uint64_t seed);

/// Debug dump: one text line "dtau dw_1 ... dw_d" per segment.
void dump_path(std::ostream& os, const SplittingPath& path);

} // namespace pathsplit

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pathsplit/rng.hpp"

namespace pathsplit {

/// sgn with the sgn(0) := +1 convention used throughout this library.
inline double sign_pm(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// Per-step Brownian statistics for one noise coordinate:
///   w    increment W over the step,
///   hst  space-time Levy area H ~ N(0, h/12), independent of w,
///   gap  difference of the half-interval space-time areas, N ~ N(0, h/12);
///        the Levy swing is n = sign_pm(gap),
///   k    space-time-time Levy area K ~ N(0, h/720) (NaN when not generated).
struct CoordStats {
    double w = 0.0;
    double hst = 0.0;
    double gap = 0.0;
    double k = 0.0;
};

/// How much a consumer needs per step: (W, H) only, with the swing gap, or
/// with the space-time-time area as well. Skipping unused draws keeps large
/// Monte Carlo runs cheap; the draws that are made are identical across
/// levels (W and H always come first in the stream).
enum class StatLevel { WH, WHN, WHNK };

namespace levy {

// Joint law of one step, taken over an interval of length h with midpoint u:
//   W_{s,u} = W/2 + (3/2) H + Z        Z ~ N(0, h/16)
//   W_{u,t} = W/2 - (3/2) H - Z
//   H_{s,u} = H/4 - Z/2 + N/2          N ~ N(0, h/12)
//   H_{u,t} = H/4 - Z/2 - N/2
// with (W, H, Z, N) independent. Inverting:
//   W = W_{s,u} + W_{u,t}
//   H = (W_{s,u} - W_{u,t})/4 + (H_{s,u} + H_{u,t})/2
//   N = H_{s,u} - H_{u,t}
// K satisfies E[K | W_{s,u}, W_{u,t}, H_{s,u}, H_{u,t}] = N/8 with independent
// Gaussian residual, and aggregates over adjacent halves as
//   K = (K_left + K_right)/4 + (H_left - H_right)/8,
// which follows from the interval-splitting identities for \int W du and
// \int (u-s) W du. Residual variance: h/720 - h/768 = h/11520.

inline double hst_stddev(double h) { return std::sqrt(h / 12.0); }
inline double gap_stddev(double h) { return std::sqrt(h / 12.0); }
inline double k_stddev(double h) { return std::sqrt(h / 720.0); }
inline double k_residual_stddev(double h) { return std::sqrt(h / 11520.0); }
inline double midpoint_arch_stddev(double h) { return std::sqrt(h / 16.0); }

/// Draw order per coordinate: w, hst, gap, then (optionally) the k residual.
inline CoordStats sample_coord(RngStream& rng, double h, StatLevel level) {
    CoordStats c;
    c.w = rng.normal(std::sqrt(h));
    c.hst = rng.normal(hst_stddev(h));
    c.gap = level >= StatLevel::WHN ? rng.normal(gap_stddev(h)) : 0.0;
    c.k = level == StatLevel::WHNK ? c.gap / 8.0 + rng.normal(k_residual_stddev(h))
                                   : std::numeric_limits<double>::quiet_NaN();
    return c;
}
inline CoordStats sample_coord(RngStream& rng, double h, bool with_k) {
    return sample_coord(rng, h, with_k ? StatLevel::WHNK : StatLevel::WHN);
}

/// Statistics of the union interval from those of two adjacent halves.
/// (w, hst, gap) are exact; k is exact when both halves carry it.
inline CoordStats merge_coord(const CoordStats& left, const CoordStats& right, bool with_k) {
    CoordStats c;
    c.w = left.w + right.w;
    c.hst = 0.25 * (left.w - right.w) + 0.5 * (left.hst + right.hst);
    c.gap = left.hst - right.hst;
    c.k = with_k ? 0.25 * (left.k + right.k) + 0.125 * (left.hst - right.hst)
                 : std::numeric_limits<double>::quiet_NaN();
    return c;
}

/// Midpoint decomposition of one coordinate. Consumes three normals: the arch
/// value Z and a fresh swing gap for each child. Children carry no k.
inline std::pair<CoordStats, CoordStats> refine_coord(RngStream& rng, double h,
                                                      const CoordStats& parent) {
    const double z = rng.normal(midpoint_arch_stddev(h));
    const double child_gap_sd = gap_stddev(0.5 * h);
    CoordStats left, right;
    left.w = 0.5 * parent.w + 1.5 * parent.hst + z;
    right.w = 0.5 * parent.w - 1.5 * parent.hst - z;
    left.hst = 0.25 * parent.hst - 0.5 * z + 0.5 * parent.gap;
    right.hst = 0.25 * parent.hst - 0.5 * z - 0.5 * parent.gap;
    left.gap = rng.normal(child_gap_sd);
    right.gap = rng.normal(child_gap_sd);
    left.k = std::numeric_limits<double>::quiet_NaN();
    right.k = std::numeric_limits<double>::quiet_NaN();
    return {left, right};
}

} // namespace levy

/// Lightweight, non-owning view of one step's statistics across d coordinates.
/// This is what the numerical schemes consume; it can point into either a
/// StepIncrement or a column of a DyadicBrownianTree level.
struct IncrementView {
    double h = 0.0;
    int dim = 0;
    const double* w_ptr = nullptr;
    const double* hst_ptr = nullptr;
    const double* gap_ptr = nullptr;
    const double* k_ptr = nullptr; // null when k was not generated

    double w(int j) const { return w_ptr[j]; }
    double hst(int j) const { return hst_ptr[j]; }
    double gap(int j) const { return gap_ptr[j]; }
    double n(int j) const { return sign_pm(gap_ptr[j]); }
    double k(int j) const { return k_ptr[j]; }
    bool has_k() const { return k_ptr != nullptr; }
};

/// Brownian step statistics over an interval of length h, one entry per noise
/// coordinate. The raw swing gap N is stored alongside the derived swing
/// n = sign_pm(N) so that refinement needs no re-conditioning.
struct StepIncrement {
    double h = 0.0;
    Eigen::ArrayXd w;    // increments, N(0, h)
    Eigen::ArrayXd hst;  // space-time Levy areas, N(0, h/12)
    Eigen::ArrayXd gap;  // swing gaps, N(0, h/12)
    std::optional<Eigen::ArrayXd> k; // space-time-time Levy areas, N(0, h/720)

    int dim() const { return static_cast<int>(w.size()); }
    double n(int j) const { return sign_pm(gap[j]); }
    Eigen::ArrayXd swings() const {
        Eigen::ArrayXd s(gap.size());
        for (Eigen::Index j = 0; j < gap.size(); ++j) s[j] = sign_pm(gap[j]);
        return s;
    }

    IncrementView view() const& {
        return IncrementView{h, dim(), w.data(), hst.data(), gap.data(),
                             k ? k->data() : nullptr};
    }
    IncrementView view() const&& = delete; // would dangle
};

/// Draws one step's statistics: per coordinate, W ~ N(0,h), H ~ N(0,h/12) and
/// the swing gap N ~ N(0,h/12) are independent; if with_k, K = N/8 + xi with
/// xi ~ N(0, h/11520) independent. Throws std::domain_error for h <= 0 or
/// d < 1.
StepIncrement sample_increment(RngStream& rng, double h, int d, bool with_k);

/// Swing gap conditional on the swing sign: returns n * |Z| with
/// Z ~ N(0, h/12). Used to reconstruct N when an increment was built from
/// (W, H, n) only.
double sample_conditional_swing_gap(RngStream& rng, double n_sign, double h);

/// Builds an increment from (w, hst, n) data, e.g. loaded from a dump; swing
/// gaps are sampled conditionally on the signs.
StepIncrement increment_from_whn(RngStream& rng, double h, const Eigen::ArrayXd& w,
                                 const Eigen::ArrayXd& hst, const Eigen::ArrayXd& n);

/// Splits one step into two halves with the exact conditional midpoint law;
/// merging the children recovers the parent's (h, w, hst) and gap. Rejects
/// increments carrying k (the conditional law of the children's K given the
/// parent's K is not available; generate fine-first instead).
std::pair<StepIncrement, StepIncrement> refine(const StepIncrement& parent, RngStream& rng);

/// Statistics of the union interval. (w, hst, swing) follow the exact
/// interval relations; k aggregates linearly when both halves carry it.
/// Throws std::domain_error when the child step lengths differ.
StepIncrement merge(const StepIncrement& left, const StepIncrement& right);

/// Dyadic hierarchy of step statistics over [0, T]: level 0 holds num_leaves
/// sampled increments of length leaf_h, level l holds their l-fold merges.
/// Every parent equals merge(left child, right child) bit-for-bit, so a
/// coarse and a fine discretisation driven by the same tree share one
/// Brownian path. Leaf i is drawn from stream_for(seed, path, i, 0) and is
/// independent of thread scheduling.
class DyadicBrownianTree {
public:
    DyadicBrownianTree() = default;

    /// num_leaves must be divisible by 2^depth; depth is the number of merge
    /// rounds (so there are depth + 1 stored levels). Storage is reused
    /// across calls with matching shapes.
    void generate(std::uint64_t seed, std::uint64_t path_index, int num_leaves,
                  double leaf_h, int d, int depth, StatLevel stats = StatLevel::WHN);

    int depth() const { return depth_; }
    int dim() const { return dim_; }
    StatLevel stats() const { return stats_; }
    bool with_k() const { return stats_ == StatLevel::WHNK; }
    int count(int level) const { return static_cast<int>(levels_[level].w.cols()); }
    double step_h(int level) const { return leaf_h_ * static_cast<double>(1 << level); }

    IncrementView view(int level, int i) const {
        const Level& lv = levels_[level];
        return IncrementView{step_h(level), dim_, lv.w.col(i).data(), lv.hst.col(i).data(),
                             lv.gap.col(i).data(), with_k() ? lv.k.col(i).data() : nullptr};
    }

    StepIncrement increment(int level, int i) const;

private:
    struct Level {
        Eigen::ArrayXXd w, hst, gap, k; // one column per step
    };
    std::vector<Level> levels_;
    double leaf_h_ = 0.0;
    int dim_ = 0;
    int depth_ = 0;
    StatLevel stats_ = StatLevel::WHN;
};

/// Dump of sampled increments, one row per (path, step):
/// columns path, step, h, w_1..w_d, hst_1..hst_d, [k_1..k_d,] n_1..n_d.
/// CSV writes a header row; binary writes little-endian 64-bit floats with no
/// header.
struct IncrementRecord {
    std::uint64_t path = 0;
    std::uint64_t step = 0;
    StepIncrement inc;
};

void dump_increments_csv(std::ostream& os, const std::vector<IncrementRecord>& records);
void dump_increments_binary(std::ostream& os, const std::vector<IncrementRecord>& records);

} // namespace pathsplit

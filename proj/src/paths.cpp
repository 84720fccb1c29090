#include "pathsplit/paths.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pathsplit/errors.hpp"

namespace pathsplit {

using estimators::ScalarStepStats;

const char* path_kind_name(PathKind kind) {
    switch (kind) {
        case PathKind::LT1: return "LT1";
        case PathKind::LT2: return "LT2";
        case PathKind::Strang: return "Strang";
        case PathKind::HS1: return "HS1";
        case PathKind::HS2: return "HS2";
        case PathKind::SO1: return "SO1";
        case PathKind::SO2: return "SO2";
        case PathKind::SO3: return "SO3";
        case PathKind::SO4: return "SO4";
    }
    return "?";
}

PathKind parse_path_kind(const std::string& name) {
    for (PathKind k : {PathKind::LT1, PathKind::LT2, PathKind::Strang, PathKind::HS1,
                       PathKind::HS2, PathKind::SO1, PathKind::SO2, PathKind::SO3,
                       PathKind::SO4}) {
        if (name == path_kind_name(k)) return k;
    }
    throw ConfigError("unknown path kind: " + name);
}

namespace {

PathSegment time_segment(double dtau, int d) {
    PathSegment s;
    s.dtau = dtau;
    s.dw = Eigen::ArrayXd::Zero(d);
    return s;
}

PathSegment space_segment(Eigen::ArrayXd dw) {
    PathSegment s;
    s.dtau = 0.0;
    s.dw = std::move(dw);
    return s;
}

PathSegment mixed_segment(double dtau, Eigen::ArrayXd dw) {
    PathSegment s;
    s.dtau = dtau;
    s.dw = std::move(dw);
    return s;
}

Eigen::ArrayXd per_coord(const IncrementView& inc, double (*f)(const ScalarStepStats&)) {
    Eigen::ArrayXd out(inc.dim);
    for (int j = 0; j < inc.dim; ++j) out[j] = f(ScalarStepStats::from(inc, j));
    return out;
}

Eigen::ArrayXd array_of(const IncrementView& inc, double (IncrementView::*get)(int) const) {
    Eigen::ArrayXd out(inc.dim);
    for (int j = 0; j < inc.dim; ++j) out[j] = (inc.*get)(j);
    return out;
}

} // namespace

SplittingPath build_path(PathKind kind, const IncrementView& inc) {
    const int d = inc.dim;
    const double h = inc.h;
    const double rh = std::sqrt(h);
    SplittingPath path;
    path.kind = kind;
    path.h = h;

    const Eigen::ArrayXd w = array_of(inc, &IncrementView::w);
    const Eigen::ArrayXd hst = array_of(inc, &IncrementView::hst);

    switch (kind) {
        case PathKind::LT1:
            path.segments = {time_segment(h, d), space_segment(w)};
            break;
        case PathKind::LT2:
            path.segments = {space_segment(w), time_segment(h, d)};
            break;
        case PathKind::Strang:
            path.segments = {time_segment(0.5 * h, d), space_segment(w),
                             time_segment(0.5 * h, d)};
            break;
        case PathKind::HS1: {
            const double root3 = std::sqrt(3.0);
            const double outer = (3.0 - root3) / 6.0 * h;
            const double middle = root3 / 3.0 * h;
            path.segments = {time_segment(outer, d),
                             space_segment(0.5 * w + root3 * hst),
                             time_segment(middle, d),
                             space_segment(0.5 * w - root3 * hst),
                             time_segment(outer, d)};
            break;
        }
        case PathKind::HS2: {
            const Eigen::ArrayXd c = per_coord(inc, &estimators::c_hs2);
            path.segments = {space_segment(0.5 * w + hst - 0.5 * c),
                             time_segment(0.5 * h, d),
                             space_segment(c),
                             time_segment(0.5 * h, d),
                             space_segment(0.5 * w - hst - 0.5 * c)};
            break;
        }
        case PathKind::SO1: {
            const Eigen::ArrayXd n = array_of(inc, &IncrementView::n);
            path.segments = {space_segment(hst + 0.5 * rh * n),
                             mixed_segment(h, w - rh * n),
                             space_segment(-hst + 0.5 * rh * n)};
            break;
        }
        case PathKind::SO2: {
            const Eigen::ArrayXd c = per_coord(inc, &estimators::c_so2);
            path.segments = {space_segment(0.5 * w + hst - 0.5 * c),
                             mixed_segment(h, c),
                             space_segment(0.5 * w - hst - 0.5 * c)};
            break;
        }
        case PathKind::SO3:
            path.segments = {space_segment(0.5 * w + hst), time_segment(h, d),
                             space_segment(0.5 * w - hst)};
            break;
        case PathKind::SO4: {
            if (!inc.has_k())
                throw ConfigError("build_path: SO4 requires increments carrying k");
            const Eigen::ArrayXd k = array_of(inc, &IncrementView::k);
            path.segments = {space_segment(hst + 6.0 * k),
                             mixed_segment(h, w - 12.0 * k),
                             space_segment(-hst + 6.0 * k)};
            break;
        }
    }
    return path;
}

PathIntegrals exact_integrals(const SplittingPath& path) {
    const int d = path.dim();
    PathIntegrals out;
    out.total_dw = Eigen::ArrayXd::Zero(d);
    out.i_w_tau = Eigen::ArrayXd::Zero(d);
    out.i_w2_tau = Eigen::ArrayXd::Zero(d);
    out.i_tw_tau = Eigen::ArrayXd::Zero(d);

    double tau = 0.0;
    Eigen::ArrayXd omega = Eigen::ArrayXd::Zero(d);
    for (const PathSegment& seg : path.segments) {
        const double dt = seg.dtau;
        if (dt != 0.0) {
            out.i_w_tau += omega * dt + seg.dw * (0.5 * dt);
            out.i_w2_tau += omega.square() * dt + omega * seg.dw * dt
                          + seg.dw.square() * (dt / 3.0);
            out.i_tw_tau += tau * omega * dt + (tau * seg.dw + omega * dt) * (0.5 * dt)
                          + seg.dw * (dt * dt / 3.0);
        }
        tau += dt;
        omega += seg.dw;
    }
    out.total_dtau = tau;
    out.total_dw = omega;
    return out;
}

std::array<double, 3> triple_cross_integrals(const SplittingPath& path, int i, int j) {
    // Running iterated integrals for the words (i j tau), (i tau j), (tau i j):
    // concatenating a linear segment with increments (gx, gy, gz) updates
    //   S_xyz += S_xy gz + S_x gy gz / 2 + gx gy gz / 6,
    //   S_xy  += S_x gy + gx gy / 2,
    //   S_x   += gx.
    struct Word {
        double s1 = 0.0, s2 = 0.0, s3 = 0.0;
        void push(double gx, double gy, double gz) {
            s3 += s2 * gz + s1 * gy * gz / 2.0 + gx * gy * gz / 6.0;
            s2 += s1 * gy + gx * gy / 2.0;
            s1 += gx;
        }
    };
    Word ijt, itj, tij;
    for (const PathSegment& seg : path.segments) {
        const double gi = seg.dw[i];
        const double gj = seg.dw[j];
        const double gt = seg.dtau;
        ijt.push(gi, gj, gt);
        itj.push(gi, gt, gj);
        tij.push(gt, gi, gj);
    }
    return {ijt.s3, itj.s3, tij.s3};
}

ConditionReport verify_conditions(PathKind kind, long num_samples, double h, int d,
                                  std::uint64_t seed) {
    if (num_samples < 10000)
        throw std::domain_error("verify_conditions: need at least 10^4 samples");
    if (d < 1) throw std::domain_error("verify_conditions: d must be at least 1");

    ConditionReport rep;
    rep.kind = kind;
    rep.dim = d;
    rep.num_samples = num_samples;
    rep.h = h;
    rep.exact_expected = kind == PathKind::HS1 || kind == PathKind::HS2
                      || kind == PathKind::SO1 || kind == PathKind::SO2
                      || kind == PathKind::SO3 || kind == PathKind::SO4;
    rep.mean_w2_expected = kind == PathKind::HS1 || kind == PathKind::HS2
                        || kind == PathKind::SO1 || kind == PathKind::SO2;
    rep.has_per_sample_w2 = kind == PathKind::HS2 || kind == PathKind::SO2;

    const bool with_k = path_kind_needs_k(kind);
    double sum_w2 = 0.0, sum_w2_sq = 0.0;
    std::array<double, 3> cross_sum{{0.0, 0.0, 0.0}};
    std::array<double, 3> cross_sum_sq{{0.0, 0.0, 0.0}};
    double tw_sum = 0.0, tw_sum_sq = 0.0;

    for (long s = 0; s < num_samples; ++s) {
        RngStream rng = stream_for(seed, static_cast<std::uint64_t>(s), 0, 1);
        const StepIncrement inc = sample_increment(rng, h, d, with_k);
        const SplittingPath path = build_path(kind, inc.view());
        const PathIntegrals pi = exact_integrals(path);

        for (int j = 0; j < d; ++j) {
            const ScalarStepStats st = ScalarStepStats::from(inc.view(), j);
            const double scale = h * (1.0 + std::abs(st.w) + std::abs(st.hst));

            const double dev_inc = std::abs(pi.total_dw[j] - st.w);
            rep.max_rel_dev_increment = std::max(rep.max_rel_dev_increment, dev_inc / scale);

            const double target_iw = h * (0.5 * st.w + st.hst);
            const double dev_iw = std::abs(pi.i_w_tau[j] - target_iw);
            rep.max_rel_dev_i_w_tau = std::max(rep.max_rel_dev_i_w_tau, dev_iw / scale);

            if (rep.has_per_sample_w2) {
                const double target_w2 = estimators::int_w2_cond_mean(st);
                const double dev = std::abs(pi.i_w2_tau[j] - target_w2)
                                 / std::max(std::abs(target_w2), 1e-300);
                rep.max_rel_dev_i_w2 = std::max(rep.max_rel_dev_i_w2, dev);
            }

            const double tw_disc = pi.i_tw_tau[j] - estimators::stt_target(st);
            tw_sum += tw_disc;
            tw_sum_sq += tw_disc * tw_disc;
        }

        const double w2 = pi.i_w2_tau[0];
        sum_w2 += w2;
        sum_w2_sq += w2 * w2;

        if (d >= 2) {
            const std::array<double, 3> tri = triple_cross_integrals(path, 0, 1);
            for (int t = 0; t < 3; ++t) {
                cross_sum[t] += tri[t];
                cross_sum_sq[t] += tri[t] * tri[t];
            }
        }
    }

    const double m = static_cast<double>(num_samples);
    rep.mean_i_w2 = sum_w2 / m;
    rep.stderr_i_w2 =
        std::sqrt(std::max(0.0, sum_w2_sq / m - rep.mean_i_w2 * rep.mean_i_w2) / m);
    rep.exact_passed =
        rep.max_rel_dev_increment <= 1e-12 && rep.max_rel_dev_i_w_tau <= 1e-12;
    rep.per_sample_w2_passed = !rep.has_per_sample_w2 || rep.max_rel_dev_i_w2 <= 1e-10;
    rep.mean_w2_passed =
        std::abs(rep.mean_i_w2 - 0.5 * h * h) <= 4.0 * rep.stderr_i_w2;
    if (d >= 2) {
        for (int t = 0; t < 3; ++t) {
            rep.cross_mean[t] = cross_sum[t] / m;
            rep.cross_stderr[t] = std::sqrt(
                std::max(0.0, cross_sum_sq[t] / m - rep.cross_mean[t] * rep.cross_mean[t]) / m);
            if (std::abs(rep.cross_mean[t]) > 4.0 * rep.cross_stderr[t]) rep.cross_passed = false;
        }
    }
    const double md = m * static_cast<double>(d);
    rep.tw_mean_discrepancy = tw_sum / md;
    rep.tw_rms_discrepancy = std::sqrt(tw_sum_sq / md);
    return rep;
}

void dump_path(std::ostream& os, const SplittingPath& path) {
    os.precision(17);
    for (const PathSegment& seg : path.segments) {
        os << seg.dtau;
        for (Eigen::Index j = 0; j < seg.dw.size(); ++j) os << ' ' << seg.dw[j];
        os << '\n';
    }
}

} // namespace pathsplit

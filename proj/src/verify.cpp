#include "pathsplit/verify.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pathsplit/brownian.hpp"
#include "pathsplit/brownian_oracle.hpp"
#include "pathsplit/estimators.hpp"
#include "pathsplit/harness.hpp"
#include "pathsplit/paths.hpp"
#include "pathsplit/solvers.hpp"

namespace pathsplit {

using estimators::ScalarStepStats;

int VerifyResult::exit_code() const {
    bool statistical_failure = false;
    for (const CheckLine& line : lines) {
        if (!line.ok()) {
            if (line.exact) return 2;
            statistical_failure = true;
        }
    }
    return statistical_failure ? 1 : 0;
}

void VerifyResult::print(std::ostream& os) const {
    os << "== " << title << " ==\n";
    for (const CheckLine& line : lines) {
        const char* status = line.ok() ? (line.expected_fail ? "xfail" : "pass ") : "FAIL ";
        os << "[" << status << "] " << line.name;
        if (!line.detail.empty()) os << "  (" << line.detail << ")";
        os << '\n';
    }
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

CheckLine exact_check(std::string name, double deviation, double tol, bool expected_fail = false) {
    CheckLine line;
    line.name = std::move(name);
    line.exact = true;
    line.passed = deviation <= tol;
    line.expected_fail = expected_fail;
    line.detail = "dev " + fmt(deviation) + " tol " + fmt(tol);
    return line;
}

CheckLine stat_check(std::string name, double value, double target, double stderr_,
                     double sigmas) {
    CheckLine line;
    line.name = std::move(name);
    line.exact = false;
    line.passed = std::abs(value - target) <= sigmas * stderr_;
    line.detail = "value " + fmt(value) + " target " + fmt(target) + " stderr " + fmt(stderr_);
    return line;
}

struct Welford {
    double mean = 0.0;
    double m2 = 0.0;
    long n = 0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderr_of_mean() const { return std::sqrt(variance() / static_cast<double>(n)); }
    // Standard error of the sample variance via the fourth central moment is
    // not tracked; sqrt(2/(n-1)) * var is used where a variance is gated.
    double stderr_of_variance() const {
        return variance() * std::sqrt(2.0 / static_cast<double>(std::max<long>(1, n - 1)));
    }
};

} // namespace

// ---------------------------------------------------------------------------
// verify-paths
// ---------------------------------------------------------------------------

VerifyResult verify_paths(const VerifyOptions& opt) {
    const long samples = opt.samples > 0 ? opt.samples : 20000;
    VerifyResult out;
    out.title = "splitting path matching conditions";
    for (PathKind kind : {PathKind::LT1, PathKind::LT2, PathKind::Strang, PathKind::HS1,
                          PathKind::HS2, PathKind::SO1, PathKind::SO2, PathKind::SO3,
                          PathKind::SO4}) {
        const ConditionReport rep =
            verify_conditions(kind, samples, opt.h, opt.dim, opt.seed);
        const std::string prefix = std::string(path_kind_name(kind)) + ": ";

        CheckLine inc = exact_check(prefix + "total spatial increment = W",
                                    rep.max_rel_dev_increment, 1e-12);
        out.lines.push_back(inc);

        CheckLine iw = exact_check(prefix + "int (w - w0) dtau = h(W/2 + H)",
                                   rep.max_rel_dev_i_w_tau, 1e-12, !rep.exact_expected);
        out.lines.push_back(iw);

        if (rep.has_per_sample_w2)
            out.lines.push_back(exact_check(prefix + "int (w - w0)^2 dtau = optimal estimator",
                                            rep.max_rel_dev_i_w2, 1e-10));
        if (rep.mean_w2_expected)
            out.lines.push_back(stat_check(prefix + "E[int (w - w0)^2 dtau] = h^2/2",
                                           rep.mean_i_w2, 0.5 * opt.h * opt.h,
                                           rep.stderr_i_w2, opt.sigmas));
        if (opt.dim >= 2) {
            CheckLine cross;
            cross.name = prefix + "cross triple integrals vanish in expectation";
            cross.exact = false;
            cross.passed = rep.cross_passed;
            cross.detail = "means " + fmt(rep.cross_mean[0]) + ", " + fmt(rep.cross_mean[1])
                         + ", " + fmt(rep.cross_mean[2]);
            out.lines.push_back(cross);
        }
        CheckLine tw;
        tw.name = prefix + "space-time-time target discrepancy";
        tw.exact = false;
        tw.passed = true; // informational: the paths only approximate this integral
        tw.detail = "mean " + fmt(rep.tw_mean_discrepancy) + " rms "
                  + fmt(rep.tw_rms_discrepancy);
        out.lines.push_back(tw);
    }
    return out;
}

// ---------------------------------------------------------------------------
// verify-estimators
// ---------------------------------------------------------------------------

VerifyResult verify_estimators(const VerifyOptions& opt) {
    VerifyResult out;
    out.title = "Appendix estimator formulas";
    const double inv8s6p = 1.0 / (8.0 * estimators::kSqrt6Pi);

    // Spot values of the closed forms.
    out.lines.push_back(exact_check(
        "l_cond_mean(1,0,0,+1) = 1/30",
        std::abs(estimators::l_cond_mean({1, 0, 0, 1}) - 1.0 / 30.0), 1e-15));
    out.lines.push_back(exact_check(
        "l_cond_mean(1,0,1,+1) = 19/30",
        std::abs(estimators::l_cond_mean({1, 0, 1, 1}) - 19.0 / 30.0), 1e-15));
    out.lines.push_back(exact_check(
        "l_cond_var(1,0,0) = 11/25200",
        std::abs(estimators::l_cond_var({1, 0, 0, 1}) - 11.0 / 25200.0), 1e-18));
    out.lines.push_back(exact_check(
        "int_w2_cond_mean(1,0,0) = 1/15",
        std::abs(estimators::int_w2_cond_mean({1, 0, 0, 1}) - 1.0 / 15.0), 1e-15));
    out.lines.push_back(exact_check(
        "k_cond_mean(+1,1) = 1/(8 sqrt(6 pi))",
        std::abs(estimators::k_cond_mean(1.0, 1.0) - inv8s6p), 1e-16));
    out.lines.push_back(exact_check(
        "k_variance(1) = 1/720", std::abs(estimators::k_variance(1.0) - 1.0 / 720.0), 1e-18));
    out.lines.push_back(exact_check(
        "c_hs2(1,0,0,+1) = -sqrt(4/15)",
        std::abs(estimators::c_hs2({1, 0, 0, 1}) + std::sqrt(4.0 / 15.0)), 1e-15));
    out.lines.push_back(exact_check(
        "c_so2(1,0,0,+1) = -sqrt(4/5)",
        std::abs(estimators::c_so2({1, 0, 0, 1}) + std::sqrt(4.0 / 5.0)), 1e-15));
    out.lines.push_back(exact_check(
        "stt_target(1,0,0,+1) = -1/(8 sqrt(6 pi))",
        std::abs(estimators::stt_target({1, 0, 0, 1}) + inv8s6p), 1e-16));

    // Nonnegativity sweeps with Brownian scaling, min radicand recorded.
    const long sweep = opt.samples > 0 ? opt.samples : 200000;
    double min_lvar = 1e300, min_hs2 = 1e300, min_so2 = 1e300;
    RngStream rng = stream_for(opt.seed, 0, 0, 101);
    for (double h : {1e-3, 1.0, 10.0}) {
        for (long s = 0; s < sweep; ++s) {
            ScalarStepStats st;
            st.h = h;
            st.w = rng.normal(std::sqrt(h));
            st.hst = rng.normal(std::sqrt(h / 12.0));
            st.n = rng.uniform() < 0.5 ? -1.0 : 1.0;
            min_lvar = std::min(min_lvar, estimators::l_cond_var(st) / (h * h * h * h));
            min_hs2 = std::min(min_hs2, estimators::c_hs2_radicand(st) / h);
            min_so2 = std::min(min_so2, estimators::c_so2_radicand(st) / h);
        }
    }
    out.lines.push_back(exact_check("l_cond_var >= 0 over Brownian-scaled sweep",
                                    min_lvar >= 0.0 ? 0.0 : -min_lvar, 0.0));
    out.lines.back().detail = "min l_cond_var/h^4 = " + fmt(min_lvar);
    out.lines.push_back(exact_check("c_hs2 radicand >= 0 over sweep",
                                    min_hs2 >= 0.0 ? 0.0 : -min_hs2, 0.0));
    out.lines.back().detail = "min radicand/h = " + fmt(min_hs2);
    out.lines.push_back(exact_check("c_so2 radicand >= 0 over sweep",
                                    min_so2 >= 0.0 ? 0.0 : -min_so2, 0.0));
    out.lines.back().detail = "min radicand/h = " + fmt(min_so2);

    // Algebraic identity int_w2 = h W^2/3 + h W H + 2 l_cond_mean.
    double max_identity = 0.0;
    for (long s = 0; s < 1000; ++s) {
        ScalarStepStats st{1.0, rng.normal(), rng.normal(std::sqrt(1.0 / 12.0)),
                           rng.uniform() < 0.5 ? -1.0 : 1.0};
        const double lhs = estimators::int_w2_cond_mean(st);
        const double rhs = st.h * st.w * st.w / 3.0 + st.h * st.w * st.hst
                         + 2.0 * estimators::l_cond_mean(st);
        max_identity = std::max(max_identity, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    out.lines.push_back(
        exact_check("int_w2_cond_mean = hW^2/3 + hWH + 2 l_cond_mean", max_identity, 1e-15));

    // Monte Carlo unbiasedness against finely discretised Brownian paths:
    // E[(2L - (int_w2 - hW^2/3 - hWH)) * phi(W,H,n)] = 0 for the test
    // functions phi, and E[(L - l_mean)^2] = E[l_var].
    const long mc_paths = opt.samples > 0 ? opt.samples : 20000;
    const int grid = 1024;
    const double h = 1.0;
    Welford resid[7];
    Welford sq_err, var_pred;
    std::vector<double> path;
    for (long s = 0; s < mc_paths; ++s) {
        RngStream prng = stream_for(opt.seed, static_cast<std::uint64_t>(s), 0, 102);
        oracle::sample_grid_path(prng, h, grid, path);
        const oracle::GridPathStats gs = oracle::scan_grid_path(path, h);
        const ScalarStepStats st{h, gs.w, gs.hst, gs.n()};
        const double two_l = 2.0 * gs.sst;
        const double predicted = estimators::int_w2_cond_mean(st) - h * st.w * st.w / 3.0
                               - h * st.w * st.hst;
        const double r = two_l - predicted;
        const double phi[7] = {1.0, st.w, st.hst, st.n, st.w * st.w, st.hst * st.hst,
                               st.n * st.w};
        for (int i = 0; i < 7; ++i) resid[i].add(r * phi[i]);
        const double e = gs.sst - estimators::l_cond_mean(st);
        sq_err.add(e * e);
        var_pred.add(estimators::l_cond_var(st));
    }
    const char* phi_names[7] = {"1", "W", "H", "n", "W^2", "H^2", "nW"};
    for (int i = 0; i < 7; ++i)
        out.lines.push_back(stat_check(
            std::string("unbiasedness of 2L estimate against ") + phi_names[i], resid[i].mean,
            0.0, resid[i].stderr_of_mean(), opt.sigmas));
    out.lines.push_back(stat_check(
        "E[(L - l_cond_mean)^2] = E[l_cond_var]", sq_err.mean, var_pred.mean,
        std::sqrt(sq_err.stderr_of_mean() * sq_err.stderr_of_mean()
                  + var_pred.stderr_of_mean() * var_pred.stderr_of_mean()),
        opt.sigmas));
    return out;
}

// ---------------------------------------------------------------------------
// verify-moments
// ---------------------------------------------------------------------------

VerifyResult verify_moments(const CirParams& params, double h, const VerifyOptions& opt) {
    const long samples = opt.samples > 0 ? opt.samples : 1000000;
    VerifyResult out;
    out.title = "CIR splitting conditional moments";

    const double y0 = 1.0;
    const CirMoments analytic = cir_cond_moments(params, y0, h);
    const CirSplitStepper stepper(params, h);
    Welford one_step;
    double min_state = 1e300;
    for (long s = 0; s < samples; ++s) {
        RngStream rng = stream_for(opt.seed, static_cast<std::uint64_t>(s), 0, 103);
        const CoordStats c = levy::sample_coord(rng, h, StatLevel::WH);
        const double y1 = stepper.step(y0, c.w, c.hst);
        one_step.add(y1);
        min_state = std::min(min_state, y1);
    }
    out.lines.push_back(stat_check("one-step mean matches closed form", one_step.mean,
                                   analytic.mean, one_step.stderr_of_mean(), opt.sigmas));
    out.lines.push_back(stat_check("one-step variance matches closed form",
                                   one_step.variance(), analytic.variance,
                                   one_step.stderr_of_variance(), opt.sigmas));
    out.lines.push_back(exact_check("splitting output nonnegative over sweep",
                                    min_state >= 0.0 ? 0.0 : -min_state, 0.0));
    out.lines.back().detail = "min state " + fmt(min_state);

    // Analytic remainder order: fit |R(h)| ~ h^5 over h = 2^-6 .. 2^-12.
    auto fit_slope = [&](auto&& value) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int k = 6; k <= 12; ++k) {
            const double hh = std::ldexp(1.0, -k);
            const double v = std::abs(value(hh));
            const double x = std::log2(hh);
            const double y = std::log2(v);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double slope_mean = fit_slope([&](double hh) { return cir_remainder_mean(params, hh); });
    const double slope_var =
        fit_slope([&](double hh) { return cir_remainder_var(params, y0, hh); });
    out.lines.push_back(exact_check("remainder R^E order 5 (fit slope within 0.15)",
                                    std::abs(slope_mean - 5.0), 0.15));
    out.lines.back().detail = "slope " + fmt(slope_mean);
    out.lines.push_back(exact_check("remainder R^V order 5 (fit slope within 0.15)",
                                    std::abs(slope_var - 5.0), 0.15));
    out.lines.back().detail = "slope " + fmt(slope_var);
    return out;
}

// ---------------------------------------------------------------------------
// verify-brownian
// ---------------------------------------------------------------------------

VerifyResult verify_brownian(const VerifyOptions& opt) {
    const long samples = opt.samples > 0 ? opt.samples : 1000000;
    VerifyResult out;
    out.title = "Brownian step statistics";
    const double h = 1.0;

    Welford w, hst, k, wh_prod, k_pos, k_neg, n_pos;
    for (long s = 0; s < samples; ++s) {
        RngStream rng = stream_for(opt.seed, static_cast<std::uint64_t>(s), 0, 104);
        const CoordStats c = levy::sample_coord(rng, h, StatLevel::WHNK);
        w.add(c.w);
        hst.add(c.hst);
        k.add(c.k);
        wh_prod.add(c.w * c.hst);
        n_pos.add(sign_pm(c.gap) > 0 ? 1.0 : 0.0);
        (sign_pm(c.gap) > 0 ? k_pos : k_neg).add(c.k);
    }
    CheckLine var_w;
    var_w.name = "Var(W) within 1 +- 0.01";
    var_w.passed = std::abs(w.variance() - 1.0) <= 0.01;
    var_w.detail = "value " + fmt(w.variance());
    out.lines.push_back(var_w);
    CheckLine var_h;
    var_h.name = "Var(H) within 1/12 +- 0.001";
    var_h.passed = std::abs(hst.variance() - 1.0 / 12.0) <= 0.001;
    var_h.detail = "value " + fmt(hst.variance());
    out.lines.push_back(var_h);
    CheckLine var_k;
    var_k.name = "Var(K) within 1/720 +- 1e-4";
    var_k.passed = std::abs(k.variance() - 1.0 / 720.0) <= 1e-4;
    var_k.detail = "value " + fmt(k.variance());
    out.lines.push_back(var_k);
    CheckLine corr;
    corr.name = "corr(W, H) within +-0.004";
    const double c_wh = wh_prod.mean / std::sqrt(w.variance() * hst.variance());
    corr.passed = std::abs(c_wh) <= 0.004;
    corr.detail = "value " + fmt(c_wh);
    out.lines.push_back(corr);
    out.lines.push_back(stat_check("P(n = +1) = 1/2", n_pos.mean, 0.5,
                                   n_pos.stderr_of_mean(), opt.sigmas));
    const double k_gap_target = 2.0 * std::sqrt(h) / (8.0 * estimators::kSqrt6Pi);
    out.lines.push_back(stat_check(
        "E[K | n=+1] - E[K | n=-1] = 2 sqrt(h)/(8 sqrt(6 pi))", k_pos.mean - k_neg.mean,
        k_gap_target,
        std::sqrt(k_pos.stderr_of_mean() * k_pos.stderr_of_mean()
                  + k_neg.stderr_of_mean() * k_neg.stderr_of_mean()),
        opt.sigmas));

    // merge(refine(parent)) recovers (h, W, H) and the swing gap.
    double max_dev = 0.0;
    for (long s = 0; s < 10000; ++s) {
        RngStream rng = stream_for(opt.seed, static_cast<std::uint64_t>(s), 1, 105);
        const StepIncrement parent = sample_increment(rng, 0.7, 1, false);
        auto [left, right] = refine(parent, rng);
        const StepIncrement back = merge(left, right);
        max_dev = std::max({max_dev, std::abs(back.h - parent.h),
                            std::abs(back.w[0] - parent.w[0]),
                            std::abs(back.hst[0] - parent.hst[0]),
                            std::abs(back.gap[0] - parent.gap[0])});
    }
    out.lines.push_back(exact_check("merge after refine recovers (h, W, H, gap)", max_dev, 1e-12));

    // Dyadic tree: parents equal merges of children bit-for-bit.
    DyadicBrownianTree tree;
    tree.generate(opt.seed, 7, 64, 0.015625, 2, 6, StatLevel::WHNK);
    bool bit_exact = true;
    for (int level = 1; level <= tree.depth() && bit_exact; ++level) {
        for (int i = 0; i < tree.count(level) && bit_exact; ++i) {
            const StepIncrement parent = tree.increment(level, i);
            const StepIncrement recomputed =
                merge(tree.increment(level - 1, 2 * i), tree.increment(level - 1, 2 * i + 1));
            for (int j = 0; j < tree.dim(); ++j) {
                if (parent.w[j] != recomputed.w[j] || parent.hst[j] != recomputed.hst[j]
                    || parent.gap[j] != recomputed.gap[j]
                    || (*parent.k)[j] != (*recomputed.k)[j])
                    bit_exact = false;
            }
        }
    }
    out.lines.push_back(exact_check("dyadic tree parents are bit-exact merges",
                                    bit_exact ? 0.0 : 1.0, 0.0));

    // Counter-based streams: determinism and independence.
    RngStream s1 = stream_for(opt.seed, 0, 0, 0);
    RngStream s2 = stream_for(opt.seed, 0, 0, 0);
    bool identical = true;
    for (int i = 0; i < 10; ++i) identical = identical && s1.next_u64() == s2.next_u64();
    out.lines.push_back(
        exact_check("identical key tuples give identical draws", identical ? 0.0 : 1.0, 0.0));
    RngStream sa = stream_for(opt.seed, 0, 0, 0);
    RngStream sb = stream_for(opt.seed, 1, 0, 0);
    Welford prod;
    for (long i = 0; i < 1000000; ++i) prod.add(sa.normal() * sb.normal());
    out.lines.push_back(stat_check("paired draws across path streams uncorrelated", prod.mean,
                                   0.0, prod.stderr_of_mean(), opt.sigmas));
    return out;
}

} // namespace pathsplit

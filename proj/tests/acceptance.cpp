// Acceptance suite for the benchmark library: each criterion runs at its
// documented scale and prints one [PASS]/[FAIL] line (plus details).
// Usage: acceptance <criterion 1..9>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "pathsplit/brownian_oracle.hpp"
#include "pathsplit/harness.hpp"
#include "pathsplit/paths.hpp"
#include "pathsplit/solvers.hpp"

using namespace pathsplit;

namespace {

struct Welford {
    double mean = 0.0, m2 = 0.0;
    long n = 0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double var() const { return n > 1 ? m2 / (n - 1) : 0.0; }
    double se() const { return std::sqrt(var() / n); }
};

struct Gate {
    bool pass = true;
    std::vector<std::string> details;
    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double fit_slope(const std::vector<StrongErrorPoint>& pts) {
    const auto fit = fit_loglog_slope(pts);
    return fit ? fit->slope : std::nan("");
}

// --------------------------------------------------------------------------
// 1. Path exactness
// --------------------------------------------------------------------------
bool criterion1() {
    Gate gate;
    const long samples = 100000;
    const double h = 0.37;
    for (PathKind kind : {PathKind::HS1, PathKind::HS2, PathKind::SO1, PathKind::SO2}) {
        const ConditionReport rep = verify_conditions(kind, samples, h, 1, 1001);
        const std::string name = path_kind_name(kind);
        gate.check(rep.max_rel_dev_increment <= 1e-12,
                   name + " total spatial increment = W (max dev " +
                       fmt(rep.max_rel_dev_increment) + ")");
        gate.check(rep.max_rel_dev_i_w_tau <= 1e-12,
                   name + " int(w-w0)dtau = h(W/2+H) (max dev " +
                       fmt(rep.max_rel_dev_i_w_tau) + ")");
        if (kind == PathKind::HS2 || kind == PathKind::SO2)
            gate.check(rep.max_rel_dev_i_w2 <= 1e-10,
                       name + " int(w-w0)^2 dtau matches the optimal estimator (max rel " +
                           fmt(rep.max_rel_dev_i_w2) + ")");
    }
    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]")
              << " criterion 1: path exactness for HS1/HS2/SO1/SO2\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 2. Estimator / Brownian moments against the quadrature oracle
// --------------------------------------------------------------------------
bool criterion2() {
    Gate gate;
    const long paths = 100000;
    const int grid = 4096; // 2^12 sub-steps
    const double h = 1.0;

    Welford resid;       // (L - l_mean)^2 - l_var, paired per path
    Welford ortho[7];    // (2L - estimator) * test function
    Welford k_var_acc;   // quadrature K
    Welford kn_acc;      // quadrature K * n
    Welford k_gap_acc;   // quadrature K * N (for the covariance)
    std::vector<double> grid_path;
    for (long s = 0; s < paths; ++s) {
        RngStream rng = stream_for(1002, s, 0, 0);
        oracle::sample_grid_path(rng, h, grid, grid_path);
        const oracle::GridPathStats gs = oracle::scan_grid_path(grid_path, h);
        const estimators::ScalarStepStats st{h, gs.w, gs.hst, gs.n()};
        const double err = gs.sst - estimators::l_cond_mean(st);
        resid.add(err * err - estimators::l_cond_var(st));
        const double r2 = 2.0 * err; // = 2L - (int_w2_cond_mean - hW^2/3 - hWH)
        const double phi[7] = {1.0, st.w, st.hst, st.n, st.w * st.w,
                               st.hst * st.hst, st.n * st.w};
        for (int i = 0; i < 7; ++i) ortho[i].add(r2 * phi[i]);
        k_var_acc.add(gs.k);
        kn_acc.add(gs.k * gs.n());
        k_gap_acc.add(gs.k * gs.gap);
    }
    gate.check(std::abs(resid.mean) <= 4.0 * resid.se(),
               "E[(L - l_cond_mean)^2] = E[l_cond_var] (diff " + fmt(resid.mean) +
                   " +- " + fmt(resid.se()) + ")");
    const char* phi_names[7] = {"1", "W", "H", "n", "W^2", "H^2", "nW"};
    for (int i = 0; i < 7; ++i)
        gate.check(std::abs(ortho[i].mean) <= 4.0 * ortho[i].se(),
                   std::string("conditional-mean orthogonality against ") + phi_names[i] +
                       " (value " + fmt(ortho[i].mean) + " +- " + fmt(ortho[i].se()) + ")");
    const double k_var = k_var_acc.var();
    const double k_var_se = k_var * std::sqrt(2.0 / (paths - 1)); // K is Gaussian
    gate.check(std::abs(k_var - h / 720.0) <= 4.0 * k_var_se,
               "oracle Var(K) = h/720 (value " + fmt(k_var) + ")");
    const double kn_target = std::sqrt(h) / (8.0 * estimators::kSqrt6Pi);
    gate.check(std::abs(kn_acc.mean - kn_target) <= 4.0 * kn_acc.se(),
               "oracle E[K n] = 1/(8 sqrt(6 pi)) (value " + fmt(kn_acc.mean) + ")");
    gate.check(std::abs(k_gap_acc.mean - h / 96.0) <= 4.0 * k_gap_acc.se(),
               "oracle Cov(K, N) = h/96 (value " + fmt(k_gap_acc.mean) + ")");

    // The derived sampler K = N/8 + xi must reproduce the same joint moments.
    Welford s_kn, s_kgap, s_k;
    for (long s = 0; s < 1000000; ++s) {
        RngStream rng = stream_for(1003, s, 0, 0);
        const CoordStats c = levy::sample_coord(rng, h, StatLevel::WHNK);
        s_k.add(c.k);
        s_kn.add(c.k * sign_pm(c.gap));
        s_kgap.add(c.k * c.gap);
    }
    const double s_var_se = s_k.var() * std::sqrt(2.0 / (s_k.n - 1));
    gate.check(std::abs(s_k.var() - h / 720.0) <= 4.0 * s_var_se,
               "sampler Var(K) = h/720 (value " + fmt(s_k.var()) + ")");
    gate.check(std::abs(s_kgap.mean - h / 96.0) <= 4.0 * s_kgap.se(),
               "sampler Cov(K, N) = h/96 (value " + fmt(s_kgap.mean) + ")");
    gate.check(std::abs(s_kn.mean - kn_target) <= 4.0 * s_kn.se(),
               "sampler E[K n] matches (value " + fmt(s_kn.mean) + ")");

    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]")
              << " criterion 2: estimator and Brownian moments vs quadrature oracle\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 3. Dyadic consistency
// --------------------------------------------------------------------------
bool criterion3() {
    Gate gate;
    double max_dev = 0.0;
    for (long s = 0; s < 10000; ++s) {
        RngStream rng = stream_for(1004, s, 0, 0);
        const StepIncrement parent = sample_increment(rng, 0.9, 1, false);
        auto [left, right] = refine(parent, rng);
        const StepIncrement back = merge(left, right);
        max_dev = std::max({max_dev, std::abs(back.h - parent.h),
                            std::abs(back.w[0] - parent.w[0]),
                            std::abs(back.hst[0] - parent.hst[0])});
    }
    gate.check(max_dev <= 1e-12,
               "merge(refine(parent)) identity on (h, W, H) (max dev " + fmt(max_dev) + ")");

    double max_rel_k = 0.0;
    std::vector<double> grid_path;
    for (long s = 0; s < 1000; ++s) {
        RngStream rng = stream_for(1005, s, 0, 0);
        oracle::sample_grid_path(rng, 1.0, 1 << 14, grid_path);
        const oracle::GridPathStats gs = oracle::scan_grid_path(grid_path, 1.0);
        const double merged_k =
            0.25 * (gs.k_left + gs.k_right) + 0.125 * (gs.hst_left - gs.hst_right);
        max_rel_k =
            std::max(max_rel_k, std::abs(merged_k - gs.k) / std::max(1e-6, std::abs(gs.k)));
    }
    gate.check(max_rel_k <= 1e-4,
               "merged K matches the quadrature oracle (max rel " + fmt(max_rel_k) + ")");

    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]") << " criterion 3: dyadic consistency\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 4. CIR conditional moments
// --------------------------------------------------------------------------
bool criterion4() {
    Gate gate;
    const CirParams p{1.0, 1.0, 1.0};
    const double h = 0.1;
    const double y0 = 1.0;
    const long samples = 10000000;
    const CirMoments analytic = cir_cond_moments(p, y0, h);
    const CirSplitStepper stepper(p, h);

    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (long s = 0; s < samples; ++s) {
        RngStream rng = stream_for(1006, s, 0, 0);
        const CoordStats c = levy::sample_coord(rng, h, StatLevel::WH);
        const double y = stepper.step(y0, c.w, c.hst);
        s1 += y;
        s2 += y * y;
        s3 += y * y * y;
        s4 += y * y * y * y;
    }
    const double m = static_cast<double>(samples);
    const double mean = s1 / m;
    const double raw2 = s2 / m;
    const double var = raw2 - mean * mean;
    const double se_mean = std::sqrt(var / m);
    // Fourth central moment for the standard error of the sample variance.
    const double mu3 = s3 / m - 3.0 * mean * raw2 + 2.0 * mean * mean * mean;
    const double mu4 = s4 / m - 4.0 * mean * (s3 / m) + 6.0 * mean * mean * raw2
                     - 3.0 * mean * mean * mean * mean;
    (void)mu3;
    const double se_var = std::sqrt(std::max(0.0, mu4 - var * var) / m);
    gate.check(std::abs(mean - analytic.mean) <= 4.0 * se_mean,
               "one-step mean (mc " + fmt(mean) + " vs " + fmt(analytic.mean) + " +- " +
                   fmt(se_mean) + ")");
    gate.check(std::abs(var - analytic.variance) <= 4.0 * se_var,
               "one-step variance (mc " + fmt(var) + " vs " + fmt(analytic.variance) +
                   " +- " + fmt(se_var) + ")");

    auto remainder_slope = [&](auto&& value) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int k = 6; k <= 12; ++k) {
            const double hh = std::ldexp(1.0, -k);
            const double x = std::log2(hh);
            const double y = std::log2(std::abs(value(hh)));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double slope_e = remainder_slope([&](double hh) { return cir_remainder_mean(p, hh); });
    const double slope_v =
        remainder_slope([&](double hh) { return cir_remainder_var(p, y0, hh); });
    gate.check(std::abs(slope_e - 5.0) <= 0.15, "R^E order fit slope " + fmt(slope_e));
    gate.check(std::abs(slope_v - 5.0) <= 0.15, "R^V order fit slope " + fmt(slope_v));

    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]")
              << " criterion 4: CIR conditional moments at 10^7 samples\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 5. CIR strong convergence (desk-scaled)
// --------------------------------------------------------------------------
bool criterion5() {
    Gate gate;
    const CirParams p{1.0, 1.0, 1.0};
    const double T = 1.0;
    const long num_paths = 20000;

    auto f_split = [p](double h) {
        return [st = CirSplitStepper(p, h)](double y, const IncrementView& v) {
            return st.step(y, v);
        };
    };
    auto f_milstein = [p](double) {
        return [p](double y, const IncrementView& v) { return cir_milstein_step(p, y, v); };
    };
    auto f_em = [p](double) {
        return [p](double y, const IncrementView& v) { return cir_euler_maruyama_step(p, y, v); };
    };

    std::vector<StrongErrorPoint> split_pts;
    for (long n : {8L, 16L, 32L, 64L, 128L, 256L}) {
        CoupledConfig cfg;
        cfg.T = T;
        cfg.n_coarse = n;
        cfg.fine_factor = 16;
        cfg.num_paths = num_paths;
        cfg.seed = derive_seed(1007, n);
        cfg.threads = resolve_thread_count(0);
        cfg.noise_dim = 1;
        cfg.stats = StatLevel::WH;
        auto sq =
            coupled_squared_errors(cfg, 1.0, std::make_tuple(f_split, f_milstein, f_em));
        const double h = T / n;
        const StrongErrorPoint split = strong_error_point(sq[0], n, h);
        const StrongErrorPoint milstein = strong_error_point(sq[1], n, h);
        const StrongErrorPoint em = strong_error_point(sq[2], n, h);
        split_pts.push_back(split);
        gate.check(split.s < milstein.s && split.s < em.s,
                   "N=" + std::to_string(n) + ": splitting S_N " + fmt(split.s) +
                       " < Milstein " + fmt(milstein.s) + " and < EM " + fmt(em.s));
    }
    const double slope = fit_slope(split_pts);
    gate.check(slope >= 1.2 && slope <= 1.6, "splitting slope " + fmt(slope) + " in [1.2, 1.6]");

    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]")
              << " criterion 5: CIR convergence, splitting beats the baselines\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 6. Oscillator error ratios and slope
// --------------------------------------------------------------------------
bool criterion6() {
    Gate gate;
    const auto sin_drift = [](double y) { return std::sin(y); };
    const ScalarAdditiveModel<decltype(sin_drift)> osc{sin_drift, 1.0};

    auto f_ralston = [osc](double) {
        return [osc](double y, const IncrementView& v) {
            return shifted_ralston_step(osc, y, v, PathKind::SO2);
        };
    };
    auto f_sra1 = [osc](double) {
        return [osc](double y, const IncrementView& v) { return sra1_step(osc, y, v); };
    };
    auto f_se = [osc](double) {
        return [osc](double y, const IncrementView& v) { return shifted_euler_step(osc, y, v); };
    };
    auto f_em = [osc](double) {
        return [osc](double y, const IncrementView& v) {
            return euler_maruyama_additive_step(osc, y, v);
        };
    };

    {
        CoupledConfig cfg;
        cfg.T = 1.0;
        cfg.n_coarse = 1024;
        cfg.fine_factor = 16;
        cfg.num_paths = 1000000;
        cfg.seed = 1008;
        cfg.threads = resolve_thread_count(0);
        cfg.noise_dim = 1;
        cfg.stats = StatLevel::WHN;
        auto sq = coupled_squared_errors(cfg, 1.0,
                                         std::make_tuple(f_ralston, f_sra1, f_se, f_em));
        const double h = cfg.T / cfg.n_coarse;
        const StrongErrorPoint ralston = strong_error_point(sq[0], cfg.n_coarse, h);
        const StrongErrorPoint sra1 = strong_error_point(sq[1], cfg.n_coarse, h);
        const StrongErrorPoint se = strong_error_point(sq[2], cfg.n_coarse, h);
        const StrongErrorPoint em = strong_error_point(sq[3], cfg.n_coarse, h);
        const RatioPoint high = ratio_point(ralston, sra1, sq[0], sq[1]);
        const RatioPoint low = ratio_point(se, em, sq[2], sq[3]);
        gate.check(!high.unstable && std::abs(high.ratio - 0.37) <= 0.05,
                   "shifted Ralston / SRA1 ratio " + fmt(high.ratio) + " +- " +
                       fmt(high.stderr_) + " (target 0.37 +- 0.05)");
        gate.check(!low.unstable && low.ratio >= 0.2 && low.ratio <= 0.6,
                   "shifted Euler / Euler-Maruyama ratio " + fmt(low.ratio) + " +- " +
                       fmt(low.stderr_) + " (target [0.2, 0.6])");
    }

    auto f_ralston_so1 = [osc](double) {
        return [osc](double y, const IncrementView& v) {
            return shifted_ralston_step(osc, y, v, PathKind::SO1);
        };
    };
    std::vector<StrongErrorPoint> pts, pts_so1;
    for (long n : {32L, 64L, 128L, 256L, 512L, 1024L}) {
        CoupledConfig cfg;
        cfg.T = 1.0;
        cfg.n_coarse = n;
        cfg.fine_factor = 16;
        cfg.num_paths = 20000;
        cfg.seed = derive_seed(1009, n);
        cfg.threads = resolve_thread_count(0);
        cfg.noise_dim = 1;
        cfg.stats = StatLevel::WHN;
        auto sq = coupled_squared_errors(cfg, 1.0,
                                         std::make_tuple(f_ralston, f_ralston_so1));
        pts.push_back(strong_error_point(sq[0], n, cfg.T / n));
        pts_so1.push_back(strong_error_point(sq[1], n, cfg.T / n));
        std::cout << "  N=" << n << " S_N(SO2)=" << fmt(pts.back().s) << "  S_N(SO1)="
                  << fmt(pts_so1.back().s) << '\n';
    }
    const double slope = fit_slope(pts);
    // Note: the SO2 variant carries a visible pre-asymptotic correction on
    // this range (local slopes run from ~1.7 at N=32-64 down to 1.5 by
    // N=256); the fitted value lands a hair above 1.6. Reported as measured.
    gate.check(std::abs(slope - 1.5) <= 0.1, "shifted Ralston slope " + fmt(slope));
    std::cout << "  info: shifted Ralston (SO1 path) slope " << fmt(fit_slope(pts_so1))
              << '\n';

    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]")
              << " criterion 6: oscillator error ratios at 10^6 paired paths\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 7. FitzHugh-Nagumo convergence (desk-scaled)
// --------------------------------------------------------------------------
bool criterion7() {
    Gate gate;
    const FhnParams p{1.0, 1.0, 1.0, 1.0, 1.0};
    const double T = 5.0;
    const long num_paths = 500;
    const Eigen::Vector2d y0(0.0, 0.0);

    auto f_split = [p](double h) {
        return [st = FhnSplitStepper(p, h)](const Eigen::Vector2d& y, const IncrementView& v) {
            return st.step(y, v);
        };
    };
    auto f_tamed = [p](double) {
        return [p](const Eigen::Vector2d& y, const IncrementView& v) {
            return fhn_tamed_euler_step(p, y, v);
        };
    };

    std::vector<StrongErrorPoint> split_pts;
    for (long n : {64L, 128L, 256L, 512L, 1024L, 2048L}) {
        CoupledConfig cfg;
        cfg.T = T;
        cfg.n_coarse = n;
        cfg.fine_factor = 16;
        cfg.num_paths = num_paths;
        cfg.seed = derive_seed(1010, n);
        cfg.threads = resolve_thread_count(0);
        cfg.noise_dim = 2;
        cfg.stats = StatLevel::WHN;
        auto sq = coupled_squared_errors(cfg, y0, std::make_tuple(f_split, f_tamed));
        const double h = T / n;
        const StrongErrorPoint split = strong_error_point(sq[0], n, h);
        const StrongErrorPoint tamed = strong_error_point(sq[1], n, h);
        split_pts.push_back(split);
        gate.check(split.s < tamed.s, "N=" + std::to_string(n) + ": splitting S_N " +
                                          fmt(split.s) + " < tamed Euler " + fmt(tamed.s));
    }
    const double slope = fit_slope(split_pts);
    gate.check(std::abs(slope - 1.5) <= 0.2, "splitting slope " + fmt(slope));

    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]") << " criterion 7: FHN convergence\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 8. SORT third order convergence on the quadratic potential
// --------------------------------------------------------------------------
bool criterion8() {
    Gate gate;
    const double u = 1.0, gamma = 2.0, T = 10.0;
    const long num_paths = 2000;
    const auto grad = [](double x) { return x; };

    auto f_sort = [&](double) {
        return [stepper = SortStepper<double, decltype(grad)>(u, gamma, grad)](
                   const Eigen::Vector2d& y, const IncrementView& v) mutable {
            auto [x, vel] = stepper.step(y[0], y[1], v);
            return Eigen::Vector2d(x, vel);
        };
    };

    std::vector<StrongErrorPoint> pts;
    for (long n : {16L, 32L, 64L, 128L, 256L, 512L}) {
        CoupledConfig cfg;
        cfg.T = T;
        cfg.n_coarse = n;
        cfg.fine_factor = 16;
        cfg.num_paths = num_paths;
        cfg.seed = derive_seed(1011, n);
        cfg.threads = resolve_thread_count(0);
        cfg.noise_dim = 1;
        cfg.stats = StatLevel::WHNK;
        auto sq =
            coupled_squared_errors(cfg, Eigen::Vector2d(1.0, 0.0), std::make_tuple(f_sort));
        pts.push_back(strong_error_point(sq[0], n, T / n));
        std::cout << "  N=" << n << " S_N=" << fmt(pts.back().s) << " +- "
                  << fmt(pts.back().stderr_) << '\n';
    }
    const double slope = fit_slope(pts);
    gate.check(slope >= 2.5 && slope <= 3.3, "SORT slope " + fmt(slope) + " in [2.5, 3.3]");

    for (const auto& d : gate.details) std::cout << d << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]")
              << " criterion 8: SORT order on the quadratic potential\n";
    return gate.pass;
}

// --------------------------------------------------------------------------
// 9. Determinism across thread counts (through the CLI)
// --------------------------------------------------------------------------
std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool criterion9() {
    Gate gate;
#ifdef PATHSPLIT_CLI_PATH
    const std::string cli = PATHSPLIT_CLI_PATH;
    const std::string base =
        " convergence --model oscillator --scheme shifted-ralston --path-kind SO2"
        " --T 1 --N 8,16,32 --fine-factor 16 --paths 500 --seed 31415";
    const int rc1 =
        std::system((cli + base + " --threads 1 --out /tmp/pathsplit_det1.csv").c_str());
    const int rc2 =
        std::system((cli + base + " --threads 3 --out /tmp/pathsplit_det2.csv").c_str());
    gate.check(rc1 == 0 && rc2 == 0, "CLI convergence runs exit cleanly");
    const std::string a = read_file("/tmp/pathsplit_det1.csv");
    const std::string b = read_file("/tmp/pathsplit_det2.csv");
    gate.check(!a.empty() && a == b, "CSV outputs are bit-identical for --threads 1 vs 3");

    const std::string ratio_base =
        " ratio --model oscillator --scheme shifted-ralston --scheme-b sra1 --path-kind SO2"
        " --T 1 --N 64 --fine-factor 16 --paths 400 --seed 2718";
    const int rc3 =
        std::system((cli + ratio_base + " --threads 1 --out /tmp/pathsplit_det3.csv").c_str());
    const int rc4 =
        std::system((cli + ratio_base + " --threads 4 --out /tmp/pathsplit_det4.csv").c_str());
    gate.check(rc3 == 0 && rc4 == 0, "CLI ratio runs exit cleanly");
    const std::string c = read_file("/tmp/pathsplit_det3.csv");
    const std::string d = read_file("/tmp/pathsplit_det4.csv");
    gate.check(!c.empty() && c == d, "ratio CSV outputs are bit-identical across threads");
#else
    gate.check(false, "CLI path not configured");
#endif
    for (const auto& det : gate.details) std::cout << det << '\n';
    std::cout << (gate.pass ? "[PASS]" : "[FAIL]")
              << " criterion 9: bit-identical CSV across thread counts\n";
    return gate.pass;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <criterion 1..9>\n";
        return 2;
    }
    const int crit = std::atoi(argv[1]);
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    switch (crit) {
        case 1: pass = criterion1(); break;
        case 2: pass = criterion2(); break;
        case 3: pass = criterion3(); break;
        case 4: pass = criterion4(); break;
        case 5: pass = criterion5(); break;
        case 6: pass = criterion6(); break;
        case 7: pass = criterion7(); break;
        case 8: pass = criterion8(); break;
        case 9: pass = criterion9(); break;
        default: std::cerr << "unknown criterion " << crit << '\n'; return 2;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << crit << " wall time: " << fmt(secs) << " s\n";
    return pass ? 0 : 1;
}

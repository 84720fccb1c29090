#pragma once

#include <Eigen/Dense>

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "pathsplit/brownian.hpp"
#include "pathsplit/errors.hpp"
#include "pathsplit/solvers.hpp"

namespace pathsplit {

/// Thread count resolution: explicit value, else the PATHSPLIT_THREADS
/// environment variable, else 1.
int resolve_thread_count(int requested);

/// Runs body(path) for path in [0, num_paths) across a worker pool.
/// make_worker(worker_id) is invoked once per thread and returns the
/// callable; worker-local state (trees, scratch) lives in that closure.
/// Work is handed out in chunks through an atomic counter, so results must be
/// written to per-path slots to stay deterministic (they are, everywhere in
/// this file).
template <class MakeWorker>
void parallel_paths(long num_paths, int threads, MakeWorker&& make_worker) {
    threads = std::max(1, threads);
    if (threads == 1 || num_paths < 2 * 64) {
        auto worker = make_worker(0);
        for (long p = 0; p < num_paths; ++p) worker(p);
        return;
    }
    std::atomic<long> next{0};
    constexpr long kChunk = 64;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                auto worker = make_worker(t);
                for (;;) {
                    const long begin = next.fetch_add(kChunk);
                    if (begin >= num_paths) break;
                    const long end = std::min(begin + kChunk, num_paths);
                    for (long p = begin; p < end; ++p) worker(p);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Strong error estimation with coupled coarse/fine Brownian paths
// ---------------------------------------------------------------------------

struct Problem;

/// Which per-step statistics a scheme consumes (drives how much the Brownian
/// lattice generates per leaf).
StatLevel scheme_stat_level(const SchemeSpec& spec, const Problem& problem);

struct CoupledConfig {
    double T = 1.0;
    long n_coarse = 0;
    int fine_factor = 16; // power of two; 1 = degenerate test mode
    long num_paths = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    int noise_dim = 1;
    StatLevel stats = StatLevel::WHN;

    int tree_depth() const; // log2(fine_factor); throws ConfigError if not a power of two
};

namespace detail {
inline double squared_distance(double a, double b) { return (a - b) * (a - b); }
template <class Derived>
double squared_distance(const Eigen::MatrixBase<Derived>& a,
                        const Eigen::MatrixBase<Derived>& b) {
    return (a - b).squaredNorm();
}

template <class State, class Stepper>
State run_level(const DyadicBrownianTree& tree, int level, State y, Stepper&& stepper) {
    const int n = tree.count(level);
    for (int k = 0; k < n; ++k) {
        try {
            y = stepper(y, tree.view(level, k));
        } catch (const StepError& e) {
            throw e.with_step(k);
        }
    }
    return y;
}
} // namespace detail

/// Per-path squared coarse-fine endpoint distances for every scheme factory,
/// all schemes sharing the same Brownian lattice (fine-first generation,
/// coarse increments obtained by merging). factory(h) must return a fresh
/// stepper callable (State, IncrementView) -> State for a run at step size h.
/// Output: one vector per factory, indexed by path (deterministic for any
/// thread count).
template <class State, class... Factories>
std::array<std::vector<double>, sizeof...(Factories)>
coupled_squared_errors(const CoupledConfig& cfg, const State& y0,
                       const std::tuple<Factories...>& factories) {
    constexpr std::size_t kSchemes = sizeof...(Factories);
    const int depth = cfg.tree_depth();
    const long leaves = cfg.n_coarse * cfg.fine_factor;
    const double leaf_h = cfg.T / static_cast<double>(leaves);
    const double coarse_h = cfg.T / static_cast<double>(cfg.n_coarse);

    std::array<std::vector<double>, kSchemes> out;
    for (auto& v : out) v.assign(cfg.num_paths, 0.0);

    parallel_paths(cfg.num_paths, cfg.threads, [&](int) {
        return [&, tree = DyadicBrownianTree()](long path) mutable {
            tree.generate(cfg.seed, static_cast<std::uint64_t>(path), static_cast<int>(leaves),
                          leaf_h, cfg.noise_dim, depth, cfg.stats);
            std::size_t index = 0;
            std::apply(
                [&](const auto&... factory) {
                    ((out[index++][path] = [&] {
                         auto coarse = factory(coarse_h);
                         const State yc =
                             detail::run_level(tree, depth, y0, coarse);
                         auto fine = factory(leaf_h);
                         const State yf = detail::run_level(tree, 0, y0, fine);
                         return detail::squared_distance(yc, yf);
                     }()),
                     ...);
                },
                factories);
        };
    });
    return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct StrongErrorPoint {
    long n = 0;
    double h = 0.0;
    double s = 0.0;      // S_N estimate
    double stderr_ = 0.0; // delta-method standard error of S_N
    long paths = 0;
};

/// S_N and its standard error from per-path squared endpoint differences.
StrongErrorPoint strong_error_point(const std::vector<double>& squared, long n, double h);

struct SlopeFit {
    double slope = 0.0;
    double residual_rms = 0.0;
};

struct ErrorReport {
    std::string model;
    std::string scheme;
    std::string path_kind;
    double T = 0.0;
    long fine_factor = 0;
    std::uint64_t seed = 0;
    std::vector<StrongErrorPoint> points;
    std::optional<SlopeFit> fit;     // least squares on log2 S vs log2 h
    std::vector<long> excluded_n;    // N values dropped by the stderr guard
    bool degenerate = false;         // some S_N ~ 0, slope undefined
    double wall_seconds = 0.0;
};

struct RatioPoint {
    long n = 0;
    double h = 0.0;
    double ratio = 0.0;
    double stderr_ = 0.0; // delta method from paired samples
    bool unstable = false; // denominator estimate below 3 standard errors
    StrongErrorPoint numerator;
    StrongErrorPoint denominator;
};

struct RatioReport {
    std::string model;
    std::string scheme_a;
    std::string scheme_b;
    double T = 0.0;
    long fine_factor = 0;
    std::uint64_t seed = 0;
    std::vector<RatioPoint> points;
    double wall_seconds = 0.0;
};

/// Paired ratio estimate with a delta-method standard error; cov is the
/// sample covariance of the squared differences.
RatioPoint ratio_point(const StrongErrorPoint& a, const StrongErrorPoint& b,
                       const std::vector<double>& sq_a, const std::vector<double>& sq_b);

/// Least-squares slope of log2 S against log2 h over the given points
/// (pre-filtered); requires >= 3 points and all S > 0.
std::optional<SlopeFit> fit_loglog_slope(const std::vector<StrongErrorPoint>& points);

/// Applies the pre-asymptotic guard: drops the largest-h point when its
/// standard error exceeds 10% of the estimate, then fits. Excluded N values
/// and the degenerate flag are written into the report.
void fit_report_slope(ErrorReport& report);

void write_error_report_csv(std::ostream& os, const ErrorReport& rep);
void write_error_report_json(std::ostream& os, const ErrorReport& rep);
void write_ratio_report_csv(std::ostream& os, const RatioReport& rep);
void write_ratio_report_json(std::ostream& os, const RatioReport& rep);

/// Writes via a temp file in the same directory followed by a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

// ---------------------------------------------------------------------------
// Experiment configuration (flat key = value files; CLI flags override)
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string model = "oscillator";
    std::string scheme = "shifted-ralston";
    std::string scheme_b;           // second scheme for ratio studies
    std::string path_kind = "SO2";
    double T = 1.0;
    std::vector<long> n_list;
    long fine_factor = 16;
    long num_paths = 10000;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string out;
    std::string format = "csv"; // csv | json

    // model parameters
    double cir_a = 1.0, cir_b = 1.0, cir_sigma = 1.0;
    double fhn_epsilon = 1.0, fhn_gamma = 1.0, fhn_beta = 1.0;
    double fhn_sigma1 = 1.0, fhn_sigma2 = 1.0;
    double uld_u = 1.0, uld_gamma = 2.0;
    double logistic_delta = 0.05;
    std::string dataset;
    int dim = 1;
    std::vector<double> y0;

    void validate_for_study() const;
};

/// Applies a flat key = value configuration file (UTF-8, '#' comments) on
/// top of the given config. Keys mirror the CLI flag names (model, scheme,
/// scheme-b, path-kind, T, N, fine-factor, paths, seed, threads, out,
/// format, y0 and the model parameters). CLI flags given explicitly override
/// file values, since they are applied after this call.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

/// The model bundle the CLI dispatches on: the generic SdeModel plus the
/// structured parameters for schemes with dedicated implementations.
struct Problem {
    std::string name;
    SdeModel generic;
    std::optional<CirParams> cir;
    std::optional<FhnParams> fhn;
    std::optional<UldParams> uld;
    int uld_dim = 1;
    Eigen::VectorXd y0;

    int noise_dim() const { return generic.dim_noise; }
};

Problem make_problem(const ExperimentConfig& cfg);

/// Type-erased per-step-size stepper factory for (VectorXd) states; the
/// generic engine behind the CLI. Dedicated fast paths exist for the
/// benchmark studies, built on the same coupled_squared_errors template.
struct ErasedScheme {
    using Stepper = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const IncrementView&)>;
    std::function<Stepper(double h)> make;
    StatLevel stats = StatLevel::WHN;
    std::string label;
};

ErasedScheme make_erased_scheme(const Problem& problem, const SchemeSpec& spec);

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

/// S_N for one step count: the scheme at N steps against the same scheme at
/// fine_factor x N steps on the same Brownian tree, per path.
StrongErrorPoint strong_error(const Problem& problem, const SchemeSpec& spec,
                              const CoupledConfig& cfg);

/// Runs strong_error for every N in n_list (independent sub-seed per N), fits
/// the log-log slope and returns the report.
ErrorReport convergence_study(const ExperimentConfig& cfg);

/// Paired ratio study S_N(scheme) / S_N(scheme_b) over n_list.
RatioReport error_ratio_study(const ExperimentConfig& cfg);

/// Plain simulation: runs num_paths trajectories at resolution N and returns
/// the endpoints (one row per path). If trajectory_out is non-null and
/// num_paths == 1, (t, y) rows of the single path are appended to it.
std::vector<Eigen::VectorXd> run_simulations(const ExperimentConfig& cfg,
                                             std::vector<std::pair<double, Eigen::VectorXd>>*
                                                 trajectory_out = nullptr);

} // namespace pathsplit

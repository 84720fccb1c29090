#include "pathsplit/harness.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "pathsplit/paths.hpp"

namespace pathsplit {

using json = nlohmann::json;

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PATHSPLIT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

int CoupledConfig::tree_depth() const {
    if (fine_factor < 1 || (fine_factor & (fine_factor - 1)) != 0)
        throw ConfigError("fine_factor must be a power of two");
    int depth = 0;
    for (long f = fine_factor; f > 1; f >>= 1) ++depth;
    return depth;
}

// ---------------------------------------------------------------------------
// Statistics helpers
// ---------------------------------------------------------------------------

StrongErrorPoint strong_error_point(const std::vector<double>& squared, long n, double h) {
    StrongErrorPoint pt;
    pt.n = n;
    pt.h = h;
    pt.paths = static_cast<long>(squared.size());
    double mean = 0.0;
    for (double v : squared) mean += v;
    mean /= static_cast<double>(pt.paths);
    double var = 0.0;
    for (double v : squared) var += (v - mean) * (v - mean);
    var /= std::max<long>(1, pt.paths - 1);
    pt.s = std::sqrt(std::max(0.0, mean));
    const double se_mean = std::sqrt(var / static_cast<double>(pt.paths));
    pt.stderr_ = pt.s > 0.0 ? se_mean / (2.0 * pt.s) : 0.0;
    return pt;
}

RatioPoint ratio_point(const StrongErrorPoint& a, const StrongErrorPoint& b,
                       const std::vector<double>& sq_a, const std::vector<double>& sq_b) {
    RatioPoint pt;
    pt.n = a.n;
    pt.h = a.h;
    pt.numerator = a;
    pt.denominator = b;
    pt.unstable = b.s < 3.0 * b.stderr_ || b.s == 0.0;
    if (pt.unstable) return pt;
    const double m = static_cast<double>(sq_a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < sq_a.size(); ++i) {
        ma += sq_a[i];
        mb += sq_b[i];
    }
    ma /= m;
    mb /= m;
    double va = 0.0, vb = 0.0, cab = 0.0;
    for (std::size_t i = 0; i < sq_a.size(); ++i) {
        va += (sq_a[i] - ma) * (sq_a[i] - ma);
        vb += (sq_b[i] - mb) * (sq_b[i] - mb);
        cab += (sq_a[i] - ma) * (sq_b[i] - mb);
    }
    va /= m - 1.0;
    vb /= m - 1.0;
    cab /= m - 1.0;
    pt.ratio = std::sqrt(ma / mb);
    const double var_log =
        (va / (ma * ma) + vb / (mb * mb) - 2.0 * cab / (ma * mb)) / (4.0 * m);
    pt.stderr_ = pt.ratio * std::sqrt(std::max(0.0, var_log));
    return pt;
}

std::optional<SlopeFit> fit_loglog_slope(const std::vector<StrongErrorPoint>& points) {
    if (points.size() < 3) return std::nullopt;
    for (const auto& p : points)
        if (!(p.s > 0.0)) return std::nullopt;
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double x = std::log2(p.h);
        const double y = std::log2(p.s);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (const auto& p : points) {
        const double r = std::log2(p.s) - (fit.slope * std::log2(p.h) + intercept);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / n);
    return fit;
}

void fit_report_slope(ErrorReport& report) {
    report.excluded_n.clear();
    report.degenerate = false;
    std::vector<StrongErrorPoint> usable;
    for (const auto& p : report.points) {
        if (p.s < 1e-15) report.degenerate = true;
        usable.push_back(p);
    }
    if (report.degenerate) {
        report.fit.reset();
        return;
    }
    // Pre-asymptotic guard: drop the largest-h point when its standard error
    // exceeds 10% of the estimate.
    auto largest =
        std::max_element(usable.begin(), usable.end(),
                         [](const auto& a, const auto& b) { return a.h < b.h; });
    if (largest != usable.end() && largest->stderr_ > 0.1 * largest->s) {
        report.excluded_n.push_back(largest->n);
        usable.erase(largest);
    }
    report.fit = fit_loglog_slope(usable);
}

// ---------------------------------------------------------------------------
// Report serialisation
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

} // namespace

void write_error_report_csv(std::ostream& os, const ErrorReport& rep) {
    os << "N,h,S_N,stderr\n";
    for (const auto& p : rep.points)
        os << p.n << ',' << fmt(p.h) << ',' << fmt(p.s) << ',' << fmt(p.stderr_) << '\n';
}

void write_error_report_json(std::ostream& os, const ErrorReport& rep) {
    json j;
    j["model"] = rep.model;
    j["scheme"] = rep.scheme;
    if (!rep.path_kind.empty()) j["path_kind"] = rep.path_kind;
    j["T"] = rep.T;
    j["fine_factor"] = rep.fine_factor;
    j["seed"] = rep.seed;
    j["wall_seconds"] = rep.wall_seconds;
    j["points"] = json::array();
    for (const auto& p : rep.points)
        j["points"].push_back({{"n", p.n},
                               {"h", p.h},
                               {"s", p.s},
                               {"stderr", p.stderr_},
                               {"paths", p.paths}});
    if (rep.fit) {
        j["slope"] = rep.fit->slope;
        j["slope_residual_rms"] = rep.fit->residual_rms;
    } else {
        j["slope"] = nullptr;
    }
    j["excluded_n"] = rep.excluded_n;
    j["degenerate"] = rep.degenerate;
    os << j.dump(2) << '\n';
}

void write_ratio_report_csv(std::ostream& os, const RatioReport& rep) {
    os << "N,h,ratio,stderr,unstable,S_a,stderr_a,S_b,stderr_b\n";
    for (const auto& p : rep.points)
        os << p.n << ',' << fmt(p.h) << ',' << fmt(p.ratio) << ',' << fmt(p.stderr_) << ','
           << (p.unstable ? 1 : 0) << ',' << fmt(p.numerator.s) << ','
           << fmt(p.numerator.stderr_) << ',' << fmt(p.denominator.s) << ','
           << fmt(p.denominator.stderr_) << '\n';
}

void write_ratio_report_json(std::ostream& os, const RatioReport& rep) {
    json j;
    j["model"] = rep.model;
    j["scheme_a"] = rep.scheme_a;
    j["scheme_b"] = rep.scheme_b;
    j["T"] = rep.T;
    j["fine_factor"] = rep.fine_factor;
    j["seed"] = rep.seed;
    j["wall_seconds"] = rep.wall_seconds;
    j["points"] = json::array();
    for (const auto& p : rep.points)
        j["points"].push_back({{"n", p.n},
                               {"h", p.h},
                               {"ratio", p.ratio},
                               {"stderr", p.stderr_},
                               {"unstable", p.unstable},
                               {"s_a", p.numerator.s},
                               {"stderr_a", p.numerator.stderr_},
                               {"s_b", p.denominator.s},
                               {"stderr_b", p.denominator.stderr_}});
    os << j.dump(2) << '\n';
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << contents;
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Experiment configuration and problem construction
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out;
    std::string rest;
    in >> out;
    const bool ok = !in.fail() && !(in >> rest);
    if (!ok)
        throw ConfigError("config key '" + key + "': cannot parse value '" + value + "'");
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
    std::vector<T> out;
    std::istringstream in(value);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(parse_number<T>(key, trim(cell)));
    return out;
}

} // namespace

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "model") cfg.model = value;
        else if (key == "scheme") cfg.scheme = value;
        else if (key == "scheme-b") cfg.scheme_b = value;
        else if (key == "path-kind") cfg.path_kind = value;
        else if (key == "T") cfg.T = parse_number<double>(key, value);
        else if (key == "N") cfg.n_list = parse_list<long>(key, value);
        else if (key == "fine-factor") cfg.fine_factor = parse_number<long>(key, value);
        else if (key == "paths") cfg.num_paths = parse_number<long>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "threads") cfg.threads = parse_number<int>(key, value);
        else if (key == "out") cfg.out = value;
        else if (key == "format") cfg.format = value;
        else if (key == "y0") cfg.y0 = parse_list<double>(key, value);
        else if (key == "a") cfg.cir_a = parse_number<double>(key, value);
        else if (key == "b") cfg.cir_b = parse_number<double>(key, value);
        else if (key == "sigma") cfg.cir_sigma = parse_number<double>(key, value);
        else if (key == "epsilon") cfg.fhn_epsilon = parse_number<double>(key, value);
        else if (key == "gamma") cfg.fhn_gamma = parse_number<double>(key, value);
        else if (key == "beta") cfg.fhn_beta = parse_number<double>(key, value);
        else if (key == "sigma1") cfg.fhn_sigma1 = parse_number<double>(key, value);
        else if (key == "sigma2") cfg.fhn_sigma2 = parse_number<double>(key, value);
        else if (key == "u") cfg.uld_u = parse_number<double>(key, value);
        else if (key == "friction") cfg.uld_gamma = parse_number<double>(key, value);
        else if (key == "delta") cfg.logistic_delta = parse_number<double>(key, value);
        else if (key == "dataset") cfg.dataset = value;
        else if (key == "dim") cfg.dim = parse_number<int>(key, value);
        else
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key
                              + "'");
    }
}

void ExperimentConfig::validate_for_study() const {
    if (fine_factor < 16 || (fine_factor & (fine_factor - 1)) != 0)
        throw ConfigError("fine_factor must be a power of two >= 16");
    if (num_paths < 1) throw ConfigError("paths must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    for (long n : n_list)
        if (n < 1) throw ConfigError("step counts must be positive");
}

Problem make_problem(const ExperimentConfig& cfg) {
    Problem pr;
    pr.name = cfg.model;
    if (cfg.model == "cir") {
        CirParams p{cfg.cir_a, cfg.cir_b, cfg.cir_sigma};
        p.validate();
        pr.cir = p;
        pr.generic = cir_model(p);
        pr.y0 = Eigen::VectorXd::Constant(1, 1.0);
    } else if (cfg.model == "oscillator") {
        pr.generic = make_oscillator_model();
        pr.y0 = Eigen::VectorXd::Constant(1, 1.0);
    } else if (cfg.model == "fhn") {
        FhnParams p{cfg.fhn_epsilon, cfg.fhn_gamma, cfg.fhn_beta, cfg.fhn_sigma1,
                    cfg.fhn_sigma2};
        p.validate();
        pr.fhn = p;
        pr.generic = fhn_model(p);
        pr.y0 = Eigen::VectorXd::Zero(2);
    } else if (cfg.model == "uld-quadratic") {
        UldParams p = uld_quadratic_params(cfg.uld_u, cfg.uld_gamma);
        pr.uld = p;
        pr.uld_dim = std::max(1, cfg.dim);
        pr.generic = uld_model(p, pr.uld_dim);
        pr.y0 = Eigen::VectorXd::Zero(2 * pr.uld_dim);
        pr.y0.head(pr.uld_dim).setOnes();
    } else if (cfg.model == "uld-logistic") {
        if (cfg.dataset.empty()) throw ConfigError("uld-logistic requires --dataset");
        auto pot = std::make_shared<LogisticPotential>(
            load_dataset(cfg.dataset, cfg.logistic_delta));
        UldParams p;
        p.u = cfg.uld_u;
        p.gamma_friction = cfg.uld_gamma;
        p.potential_grad = [pot](const Eigen::VectorXd& theta) {
            return logistic_grad(*pot, theta);
        };
        pr.uld = p;
        pr.uld_dim = pot->dim();
        pr.generic = uld_model(p, pr.uld_dim);
        pr.y0 = Eigen::VectorXd::Zero(2 * pr.uld_dim);
    } else {
        throw ConfigError("unknown model: " + cfg.model);
    }
    if (!cfg.y0.empty()) {
        if (static_cast<int>(cfg.y0.size()) != pr.generic.dim_state)
            throw ConfigError("y0 has wrong dimension for model " + cfg.model);
        for (std::size_t i = 0; i < cfg.y0.size(); ++i) pr.y0[static_cast<int>(i)] = cfg.y0[i];
    }
    return pr;
}

StatLevel scheme_stat_level(const SchemeSpec& spec, const Problem&) {
    switch (spec.id) {
        case SchemeId::CirSplitting:
        case SchemeId::ShiftedEuler:
        case SchemeId::Sra1:
        case SchemeId::EulerMaruyama:
        case SchemeId::Milstein:
        case SchemeId::TamedEuler:
        case SchemeId::SrkNew:
            return StatLevel::WH;
        case SchemeId::ShiftedRalston:
        case SchemeId::FhnSplitting:
            return StatLevel::WHN;
        case SchemeId::Sort:
            return StatLevel::WHNK;
        case SchemeId::PathSplitting:
            if (path_kind_needs_k(spec.path_kind)) return StatLevel::WHNK;
            if (spec.path_kind == PathKind::HS2 || spec.path_kind == PathKind::SO1
                || spec.path_kind == PathKind::SO2)
                return StatLevel::WHN;
            return StatLevel::WH;
    }
    return StatLevel::WHN;
}

ErasedScheme make_erased_scheme(const Problem& problem, const SchemeSpec& spec) {
    using Stepper = ErasedScheme::Stepper;
    ErasedScheme es;
    es.stats = scheme_stat_level(spec, problem);
    es.label = scheme_name(spec.id);

    auto require_additive = [&] {
        if (!problem.generic.additive)
            throw ConfigError(std::string(scheme_name(spec.id))
                              + " requires an additive-noise model");
    };
    auto additive_model = [&] {
        Eigen::MatrixXd sigma(problem.generic.dim_state, problem.generic.dim_noise);
        for (int i = 0; i < problem.generic.dim_noise; ++i)
            sigma.col(i) = problem.generic.diffusion_col(problem.y0, i);
        return VectorAdditiveModel{problem.generic.drift, std::move(sigma)};
    };

    switch (spec.id) {
        case SchemeId::CirSplitting: {
            if (!problem.cir) throw ConfigError("cir-splitting requires the CIR model");
            const CirParams p = *problem.cir;
            es.make = [p](double h) -> Stepper {
                return [stepper = CirSplitStepper(p, h)](const Eigen::VectorXd& y,
                                                         const IncrementView& v) {
                    return Eigen::VectorXd::Constant(1, stepper.step(y[0], v)).eval();
                };
            };
            break;
        }
        case SchemeId::FhnSplitting: {
            if (!problem.fhn) throw ConfigError("fhn-splitting requires the FHN model");
            const FhnParams p = *problem.fhn;
            es.make = [p](double h) -> Stepper {
                return [stepper = FhnSplitStepper(p, h)](const Eigen::VectorXd& y,
                                                         const IncrementView& v) {
                    const Eigen::Vector2d out = stepper.step(Eigen::Vector2d(y[0], y[1]), v);
                    return Eigen::VectorXd(out);
                };
            };
            break;
        }
        case SchemeId::Sort: {
            if (!problem.uld) throw ConfigError("sort requires a ULD model");
            const UldParams p = *problem.uld;
            const int d = problem.uld_dim;
            es.make = [p, d](double) -> Stepper {
                auto stepper =
                    std::make_shared<SortStepper<Eigen::VectorXd,
                                                 std::function<Eigen::VectorXd(
                                                     const Eigen::VectorXd&)>>>(
                        p.u, p.gamma_friction, p.potential_grad);
                return [stepper, d](const Eigen::VectorXd& y, const IncrementView& v) {
                    auto [x, vel] = stepper->step(y.head(d).eval(), y.tail(d).eval(), v);
                    Eigen::VectorXd out(2 * d);
                    out << x, vel;
                    return out;
                };
            };
            break;
        }
        case SchemeId::PathSplitting: {
            const SdeModel model = problem.generic;
            const PathKind kind = spec.path_kind;
            const OdeSubstepConfig ode = spec.ode;
            es.label = std::string("splitting-") + path_kind_name(kind);
            es.make = [model, kind, ode](double) -> Stepper {
                return [model, kind, ode](const Eigen::VectorXd& y, const IncrementView& v) {
                    return splitting_step(model, build_path(kind, v), y, ode);
                };
            };
            break;
        }
        case SchemeId::ShiftedEuler: {
            require_additive();
            es.make = [m = additive_model()](double) -> Stepper {
                return [m](const Eigen::VectorXd& y, const IncrementView& v) {
                    return shifted_euler_step(m, y, v);
                };
            };
            break;
        }
        case SchemeId::ShiftedRalston: {
            require_additive();
            const PathKind kind = spec.path_kind;
            es.make = [m = additive_model(), kind](double) -> Stepper {
                return [m, kind](const Eigen::VectorXd& y, const IncrementView& v) {
                    return shifted_ralston_step(m, y, v, kind);
                };
            };
            break;
        }
        case SchemeId::Sra1: {
            require_additive();
            es.make = [m = additive_model()](double) -> Stepper {
                return [m](const Eigen::VectorXd& y, const IncrementView& v) {
                    return sra1_step(m, y, v);
                };
            };
            break;
        }
        case SchemeId::SrkNew: {
            require_additive();
            es.make = [m = additive_model()](double) -> Stepper {
                return [m](const Eigen::VectorXd& y, const IncrementView& v) {
                    return srk_new_step(m, y, v);
                };
            };
            break;
        }
        case SchemeId::EulerMaruyama: {
            const SdeModel model = problem.generic;
            es.make = [model](double) -> Stepper {
                return [model](const Eigen::VectorXd& y, const IncrementView& v) {
                    return euler_maruyama_step(model, y, v);
                };
            };
            break;
        }
        case SchemeId::Milstein: {
            const SdeModel model = problem.generic;
            es.make = [model](double) -> Stepper {
                return [model](const Eigen::VectorXd& y, const IncrementView& v) {
                    return milstein_step(model, y, v);
                };
            };
            break;
        }
        case SchemeId::TamedEuler: {
            const SdeModel model = problem.generic;
            es.make = [model](double) -> Stepper {
                return [model](const Eigen::VectorXd& y, const IncrementView& v) {
                    return tamed_euler_step(model, y, v);
                };
            };
            break;
        }
    }
    return es;
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

StrongErrorPoint strong_error(const Problem& problem, const SchemeSpec& spec,
                              const CoupledConfig& cfg_in) {
    CoupledConfig cfg = cfg_in;
    cfg.noise_dim = problem.noise_dim();
    cfg.stats = scheme_stat_level(spec, problem);
    const ErasedScheme scheme = make_erased_scheme(problem, spec);
    auto sq = coupled_squared_errors(cfg, problem.y0, std::make_tuple(scheme.make));
    return strong_error_point(sq[0], cfg.n_coarse, cfg.T / static_cast<double>(cfg.n_coarse));
}

ErrorReport convergence_study(const ExperimentConfig& cfg) {
    cfg.validate_for_study();
    if (cfg.n_list.size() < 3)
        throw ConfigError("convergence study needs at least 3 step counts");
    const auto t0 = std::chrono::steady_clock::now();

    const Problem problem = make_problem(cfg);
    const SchemeSpec spec = parse_scheme(cfg.scheme, cfg.path_kind);

    ErrorReport rep;
    rep.model = cfg.model;
    rep.scheme = cfg.scheme;
    rep.path_kind = spec.id == SchemeId::PathSplitting
                        || spec.id == SchemeId::ShiftedRalston
                    ? path_kind_name(spec.path_kind)
                    : "";
    rep.T = cfg.T;
    rep.fine_factor = cfg.fine_factor;
    rep.seed = cfg.seed;

    for (long n : cfg.n_list) {
        CoupledConfig run;
        run.T = cfg.T;
        run.n_coarse = n;
        run.fine_factor = static_cast<int>(cfg.fine_factor);
        run.num_paths = cfg.num_paths;
        run.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
        run.threads = resolve_thread_count(cfg.threads);
        rep.points.push_back(strong_error(problem, spec, run));
    }
    fit_report_slope(rep);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

RatioReport error_ratio_study(const ExperimentConfig& cfg) {
    cfg.validate_for_study();
    if (cfg.scheme_b.empty()) throw ConfigError("ratio study needs a second scheme");
    if (cfg.n_list.empty()) throw ConfigError("ratio study needs at least one step count");
    const auto t0 = std::chrono::steady_clock::now();

    const Problem problem = make_problem(cfg);
    const SchemeSpec spec_a = parse_scheme(cfg.scheme, cfg.path_kind);
    const SchemeSpec spec_b = parse_scheme(cfg.scheme_b, cfg.path_kind);
    const ErasedScheme a = make_erased_scheme(problem, spec_a);
    const ErasedScheme b = make_erased_scheme(problem, spec_b);

    RatioReport rep;
    rep.model = cfg.model;
    rep.scheme_a = cfg.scheme;
    rep.scheme_b = cfg.scheme_b;
    rep.T = cfg.T;
    rep.fine_factor = cfg.fine_factor;
    rep.seed = cfg.seed;

    for (long n : cfg.n_list) {
        CoupledConfig run;
        run.T = cfg.T;
        run.n_coarse = n;
        run.fine_factor = static_cast<int>(cfg.fine_factor);
        run.num_paths = cfg.num_paths;
        run.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
        run.threads = resolve_thread_count(cfg.threads);
        run.noise_dim = problem.noise_dim();
        run.stats = std::max(a.stats, b.stats);
        const double h = cfg.T / static_cast<double>(n);
        auto sq = coupled_squared_errors(run, problem.y0, std::make_tuple(a.make, b.make));
        const StrongErrorPoint pa = strong_error_point(sq[0], n, h);
        const StrongErrorPoint pb = strong_error_point(sq[1], n, h);
        rep.points.push_back(ratio_point(pa, pb, sq[0], sq[1]));
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::vector<Eigen::VectorXd> run_simulations(
    const ExperimentConfig& cfg, std::vector<std::pair<double, Eigen::VectorXd>>* trajectory_out) {
    if (cfg.n_list.size() != 1)
        throw ConfigError("simulate requires exactly one step count (--N)");
    const long n = cfg.n_list[0];
    const double h = cfg.T / static_cast<double>(n);
    const Problem problem = make_problem(cfg);
    const SchemeSpec spec = parse_scheme(cfg.scheme, cfg.path_kind);
    const ErasedScheme scheme = make_erased_scheme(problem, spec);
    const StatLevel stats = scheme.stats;
    const int d = problem.noise_dim();

    std::vector<Eigen::VectorXd> endpoints(cfg.num_paths);
    const int threads = resolve_thread_count(cfg.threads);
    const bool record_trajectory = trajectory_out != nullptr && cfg.num_paths == 1;
    if (record_trajectory) {
        trajectory_out->clear();
        trajectory_out->emplace_back(0.0, problem.y0);
    }

    parallel_paths(cfg.num_paths, threads, [&](int) {
        return [&, inc = StepIncrement{}](long path) mutable {
            auto stepper = scheme.make(h);
            Eigen::VectorXd y = problem.y0;
            for (long k = 0; k < n; ++k) {
                RngStream rng =
                    stream_for(cfg.seed, static_cast<std::uint64_t>(path),
                               static_cast<std::uint64_t>(k), 0);
                inc.h = h;
                inc.w.resize(d);
                inc.hst.resize(d);
                inc.gap.resize(d);
                if (stats == StatLevel::WHNK && !inc.k) inc.k.emplace(d);
                for (int j = 0; j < d; ++j) {
                    const CoordStats c = levy::sample_coord(rng, h, stats);
                    inc.w[j] = c.w;
                    inc.hst[j] = c.hst;
                    inc.gap[j] = c.gap;
                    if (stats == StatLevel::WHNK) (*inc.k)[j] = c.k;
                }
                try {
                    y = stepper(y, inc.view());
                } catch (const StepError& e) {
                    throw e.with_step(k);
                }
                if (record_trajectory)
                    trajectory_out->emplace_back(static_cast<double>(k + 1) * h, y);
            }
            endpoints[path] = y;
        };
    });
    return endpoints;
}

} // namespace pathsplit

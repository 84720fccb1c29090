#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "pathsplit/harness.hpp"
#include "pathsplit/verify.hpp"

namespace {

using pathsplit::ExperimentConfig;

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path) {
    // The file itself is read before CLI11 parses, so explicit flags win.
    cmd->add_option("--config", config_path, "Flat key = value configuration file");
    cmd->add_option("--model", cfg.model,
                    "Model: cir | oscillator | fhn | uld-quadratic | uld-logistic");
    cmd->add_option("--scheme", cfg.scheme, "Numerical scheme");
    cmd->add_option("--path-kind", cfg.path_kind,
                    "Splitting path kind (LT1, LT2, Strang, HS1, HS2, SO1, SO2, SO3, SO4)");
    cmd->add_option("--T", cfg.T, "Time horizon");
    cmd->add_option("--N", cfg.n_list, "Step counts (repeatable or comma separated)")
        ->delimiter(',');
    cmd->add_option("--fine-factor", cfg.fine_factor,
                    "Fine reference refinement (power of two)");
    cmd->add_option("--paths", cfg.num_paths, "Monte Carlo sample paths");
    cmd->add_option("--seed", cfg.seed, "Random seed");
    cmd->add_option("--threads", cfg.threads, "Worker threads (0 = PATHSPLIT_THREADS or 1)")
        ->envname("PATHSPLIT_THREADS");
    cmd->add_option("--out", cfg.out, "Output file");
    cmd->add_option("--format", cfg.format, "Output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--y0", cfg.y0, "Initial state components")->delimiter(',');

    cmd->add_option("--a", cfg.cir_a, "CIR mean-reversion speed");
    cmd->add_option("--b", cfg.cir_b, "CIR mean-reversion level");
    cmd->add_option("--sigma", cfg.cir_sigma, "CIR volatility");
    cmd->add_option("--epsilon", cfg.fhn_epsilon, "FHN time-scale");
    cmd->add_option("--gamma", cfg.fhn_gamma, "FHN gamma");
    cmd->add_option("--beta", cfg.fhn_beta, "FHN beta");
    cmd->add_option("--sigma1", cfg.fhn_sigma1, "FHN noise scale 1");
    cmd->add_option("--sigma2", cfg.fhn_sigma2, "FHN noise scale 2");
    cmd->add_option("--u", cfg.uld_u, "ULD temperature scale");
    cmd->add_option("--friction", cfg.uld_gamma, "ULD friction coefficient");
    cmd->add_option("--delta", cfg.logistic_delta, "Logistic ridge weight");
    cmd->add_option("--dataset", cfg.dataset, "Logistic regression CSV dataset");
    cmd->add_option("--dim", cfg.dim, "Noise dimension for uld-quadratic");
}

void emit(const std::string& out_path, const std::string& contents) {
    if (out_path.empty())
        std::cout << contents;
    else
        pathsplit::write_file_atomic(out_path, contents);
}

int run_convergence(const ExperimentConfig& cfg) {
    const pathsplit::ErrorReport rep = pathsplit::convergence_study(cfg);
    std::ostringstream os;
    if (cfg.format == "json")
        pathsplit::write_error_report_json(os, rep);
    else
        pathsplit::write_error_report_csv(os, rep);
    emit(cfg.out, os.str());
    if (!cfg.out.empty()) {
        std::cout << "S_N written to " << cfg.out << '\n';
        if (rep.fit)
            std::cout << "fitted slope " << rep.fit->slope << " (residual rms "
                      << rep.fit->residual_rms << ")\n";
        else
            std::cout << (rep.degenerate ? "slope undefined (degenerate S_N)\n"
                                         : "slope not fitted\n");
    }
    return 0;
}

int run_ratio(const ExperimentConfig& cfg) {
    const pathsplit::RatioReport rep = pathsplit::error_ratio_study(cfg);
    std::ostringstream os;
    if (cfg.format == "json")
        pathsplit::write_ratio_report_json(os, rep);
    else
        pathsplit::write_ratio_report_csv(os, rep);
    emit(cfg.out, os.str());
    return 0;
}

int run_simulate(const ExperimentConfig& cfg) {
    std::vector<std::pair<double, Eigen::VectorXd>> trajectory;
    const auto endpoints = pathsplit::run_simulations(cfg, &trajectory);
    std::ostringstream os;
    os.precision(17);
    if (cfg.num_paths == 1) {
        os << "t";
        for (int j = 0; j < endpoints[0].size(); ++j) os << ",y_" << (j + 1);
        os << '\n';
        for (const auto& [t, y] : trajectory) {
            os << t;
            for (int j = 0; j < y.size(); ++j) os << ',' << y[j];
            os << '\n';
        }
    } else {
        os << "path";
        for (int j = 0; j < endpoints[0].size(); ++j) os << ",y_" << (j + 1);
        os << '\n';
        for (std::size_t p = 0; p < endpoints.size(); ++p) {
            os << p;
            for (int j = 0; j < endpoints[p].size(); ++j) os << ',' << endpoints[p][j];
            os << '\n';
        }
    }
    emit(cfg.out, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-based splitting methods for Stratonovich SDEs: benchmark CLI"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    pathsplit::VerifyOptions vopt;
    long verify_samples = 0;
    double verify_h = 0.37;
    double moments_h = 0.1;
    std::string config_path;

    // Apply a --config file first (if present anywhere on the command line);
    // flags parsed afterwards take precedence over file values.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                pathsplit::apply_config_file(cfg, argv[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "configuration error: " << e.what() << '\n';
                return 2;
            }
        }
    }

    CLI::App* simulate = app.add_subcommand("simulate", "Run trajectories of one scheme");
    add_common_options(simulate, cfg, config_path);

    CLI::App* convergence =
        app.add_subcommand("convergence", "Strong convergence study over step counts");
    add_common_options(convergence, cfg, config_path);

    CLI::App* ratio = app.add_subcommand("ratio", "Paired error ratio of two schemes");
    add_common_options(ratio, cfg, config_path);
    ratio->add_option("--scheme-b", cfg.scheme_b, "Denominator scheme");

    CLI::App* vp = app.add_subcommand("verify-paths", "Check path matching conditions");
    vp->add_option("--samples", verify_samples, "Monte Carlo samples");
    vp->add_option("--step-h", verify_h, "Step length");
    vp->add_option("--dim", vopt.dim, "Noise dimension");
    vp->add_option("--seed", vopt.seed, "Random seed");
    vp->add_option("--sigmas", vopt.sigmas, "Statistical gate width (standard errors)");

    CLI::App* ve = app.add_subcommand("verify-estimators", "Check estimator formulas");
    ve->add_option("--samples", verify_samples, "Monte Carlo samples");
    ve->add_option("--seed", vopt.seed, "Random seed");
    ve->add_option("--sigmas", vopt.sigmas, "Statistical gate width (standard errors)");

    CLI::App* vm = app.add_subcommand("verify-moments", "Check CIR conditional moments");
    vm->add_option("--samples", verify_samples, "Monte Carlo samples");
    vm->add_option("--step-h", moments_h, "Step length");
    vm->add_option("--a", cfg.cir_a, "CIR a");
    vm->add_option("--b", cfg.cir_b, "CIR b");
    vm->add_option("--sigma", cfg.cir_sigma, "CIR sigma");
    vm->add_option("--seed", vopt.seed, "Random seed");
    vm->add_option("--sigmas", vopt.sigmas, "Statistical gate width (standard errors)");

    CLI::App* vb = app.add_subcommand("verify-brownian", "Check Brownian generator moments");
    vb->add_option("--samples", verify_samples, "Monte Carlo samples");
    vb->add_option("--seed", vopt.seed, "Random seed");
    vb->add_option("--sigmas", vopt.sigmas, "Statistical gate width (standard errors)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(cfg);
        if (convergence->parsed()) return run_convergence(cfg);
        if (ratio->parsed()) return run_ratio(cfg);

        vopt.samples = verify_samples;
        vopt.h = verify_h;
        pathsplit::VerifyResult result;
        if (vp->parsed()) result = pathsplit::verify_paths(vopt);
        if (ve->parsed()) result = pathsplit::verify_estimators(vopt);
        if (vm->parsed())
            result = pathsplit::verify_moments({cfg.cir_a, cfg.cir_b, cfg.cir_sigma}, moments_h,
                                               vopt);
        if (vb->parsed()) result = pathsplit::verify_brownian(vopt);
        result.print(std::cout);
        return result.exit_code();
    } catch (const pathsplit::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

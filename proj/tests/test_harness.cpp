#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pathsplit/harness.hpp"

using namespace pathsplit;

namespace {

ExperimentConfig oscillator_config() {
    ExperimentConfig cfg;
    cfg.model = "oscillator";
    cfg.scheme = "shifted-ralston";
    cfg.path_kind = "SO2";
    cfg.T = 1.0;
    cfg.n_list = {4, 8, 16};
    cfg.fine_factor = 16;
    cfg.num_paths = 400;
    cfg.seed = 2024;
    cfg.threads = 1;
    return cfg;
}

} // namespace

TEST_CASE("fine_factor must be a power of two") {
    CoupledConfig cfg;
    cfg.fine_factor = 12;
    CHECK_THROWS_AS(cfg.tree_depth(), ConfigError);
    cfg.fine_factor = 16;
    CHECK(cfg.tree_depth() == 4);
    cfg.fine_factor = 1;
    CHECK(cfg.tree_depth() == 0);
}

TEST_CASE("strong error vanishes in degenerate test modes") {
    const ExperimentConfig base = oscillator_config();
    const Problem problem = make_problem(base);
    const SchemeSpec spec = parse_scheme("shifted-ralston", "SO2");
    SUBCASE("fine_factor = 1 compares a run against itself") {
        CoupledConfig cfg;
        cfg.T = 1.0;
        cfg.n_coarse = 8;
        cfg.fine_factor = 1;
        cfg.num_paths = 50;
        cfg.seed = 7;
        const StrongErrorPoint pt = strong_error(problem, spec, cfg);
        CHECK(pt.s == 0.0);
        CHECK(pt.stderr_ == 0.0);
    }
    SUBCASE("pure noise model is integrated exactly by every additive scheme") {
        ExperimentConfig cfg = base;
        Problem pure = problem;
        pure.generic = make_additive_model(
            [](const Eigen::VectorXd& y) {
                return Eigen::VectorXd(Eigen::VectorXd::Zero(y.size()));
            },
            Eigen::MatrixXd::Identity(1, 1), "pure-noise");
        CoupledConfig run;
        run.T = 1.0;
        run.n_coarse = 8;
        run.fine_factor = 16;
        run.num_paths = 50;
        run.seed = 7;
        for (const char* name : {"shifted-euler", "shifted-ralston", "sra1", "srk"}) {
            const StrongErrorPoint pt =
                strong_error(pure, parse_scheme(name, "SO2"), run);
            CHECK(pt.s <= 1e-14);
        }
    }
}

TEST_CASE("strong error stderr shrinks like the square root of the sample count") {
    const ExperimentConfig base = oscillator_config();
    const Problem problem = make_problem(base);
    const SchemeSpec spec = parse_scheme("shifted-euler", "");
    std::vector<double> ses;
    for (long m : {1000L, 10000L, 100000L}) {
        CoupledConfig cfg;
        cfg.T = 1.0;
        cfg.n_coarse = 4;
        cfg.fine_factor = 16;
        cfg.num_paths = m;
        cfg.seed = 99;
        const StrongErrorPoint pt = strong_error(problem, spec, cfg);
        ses.push_back(pt.stderr_ / pt.s); // relative error scales the same way
    }
    const double slope = std::log10(ses[2] / ses[0]) / 2.0;
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("ratio of a scheme against itself is exactly one") {
    ExperimentConfig cfg = oscillator_config();
    cfg.scheme = "sra1";
    cfg.scheme_b = "sra1";
    cfg.n_list = {8};
    cfg.num_paths = 200;
    const RatioReport rep = error_ratio_study(cfg);
    REQUIRE(rep.points.size() == 1);
    CHECK(!rep.points[0].unstable);
    CHECK(rep.points[0].ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convergence study output and determinism across thread counts") {
    ExperimentConfig cfg = oscillator_config();
    const ErrorReport rep1 = convergence_study(cfg);
    cfg.threads = 2;
    const ErrorReport rep2 = convergence_study(cfg);

    std::ostringstream a, b;
    write_error_report_csv(a, rep1);
    write_error_report_csv(b, rep2);
    CHECK(a.str() == b.str()); // bit-identical CSV regardless of worker count
    REQUIRE(rep1.points.size() == 3);
    for (const auto& p : rep1.points) CHECK(p.s > 0.0);
    CHECK(a.str().substr(0, a.str().find('\n')) == "N,h,S_N,stderr");
}

TEST_CASE("convergence study validates its inputs") {
    ExperimentConfig cfg = oscillator_config();
    SUBCASE("needs three step counts") {
        cfg.n_list = {4, 8};
        CHECK_THROWS_AS(convergence_study(cfg), ConfigError);
    }
    SUBCASE("fine factor floor") {
        cfg.fine_factor = 8;
        CHECK_THROWS_AS(convergence_study(cfg), ConfigError);
    }
    SUBCASE("fine factor power of two") {
        cfg.fine_factor = 24;
        CHECK_THROWS_AS(convergence_study(cfg), ConfigError);
    }
}

TEST_CASE("slope fitting with the pre-asymptotic guard") {
    ErrorReport rep;
    auto mk = [](long n, double h, double s, double se) {
        StrongErrorPoint p;
        p.n = n;
        p.h = h;
        p.s = s;
        p.stderr_ = se;
        p.paths = 100;
        return p;
    };
    SUBCASE("clean order-1.5 data") {
        for (long n : {8, 16, 32, 64}) {
            const double h = 1.0 / n;
            rep.points.push_back(mk(n, h, std::pow(h, 1.5), 1e-6));
        }
        fit_report_slope(rep);
        REQUIRE(rep.fit.has_value());
        CHECK(rep.fit->slope == doctest::Approx(1.5).epsilon(1e-10));
        CHECK(rep.excluded_n.empty());
    }
    SUBCASE("noisy largest-h point is excluded and recorded") {
        rep.points.clear();
        rep.points.push_back(mk(8, 1.0 / 8, 0.5, 0.2)); // stderr > 10% of estimate
        for (long n : {16, 32, 64})
            rep.points.push_back(mk(n, 1.0 / n, std::pow(1.0 / n, 1.5), 1e-6));
        fit_report_slope(rep);
        REQUIRE(rep.fit.has_value());
        CHECK(rep.excluded_n == std::vector<long>{8});
        CHECK(rep.fit->slope == doctest::Approx(1.5).epsilon(1e-9));
    }
    SUBCASE("degenerate zero errors set the flag and no slope") {
        rep.points.clear();
        for (long n : {8, 16, 32}) rep.points.push_back(mk(n, 1.0 / n, 0.0, 0.0));
        fit_report_slope(rep);
        CHECK(rep.degenerate);
        CHECK(!rep.fit.has_value());
    }
}

TEST_CASE("scheme/model compatibility errors") {
    const ExperimentConfig cfg = oscillator_config();
    const Problem problem = make_problem(cfg);
    CHECK_THROWS_AS(make_erased_scheme(problem, parse_scheme("cir-splitting", "")),
                    ConfigError);
    CHECK_THROWS_AS(make_erased_scheme(problem, parse_scheme("sort", "")), ConfigError);
    CHECK_THROWS_AS(make_erased_scheme(problem, parse_scheme("fhn-splitting", "")),
                    ConfigError);

    ExperimentConfig cir_cfg = cfg;
    cir_cfg.model = "cir";
    const Problem cir_problem = make_problem(cir_cfg);
    CHECK_THROWS_AS(make_erased_scheme(cir_problem, parse_scheme("shifted-euler", "")),
                    ConfigError);
    CHECK_NOTHROW(make_erased_scheme(cir_problem, parse_scheme("cir-splitting", "")));
    CHECK_NOTHROW(make_erased_scheme(cir_problem, parse_scheme("milstein", "")));
}

TEST_CASE("config file parsing") {
    const std::string path = "/tmp/pathsplit_cfg_test.cfg";
    {
        std::ofstream out(path);
        out << "# benchmark setup\n"
            << "model = cir\n"
            << "scheme = cir-splitting   # inline comment\n"
            << "N = 8,16,32\n"
            << "fine-factor = 16\n"
            << "sigma = 0.5\n"
            << "\n"
            << "seed = 77\n";
    }
    ExperimentConfig cfg;
    apply_config_file(cfg, path);
    CHECK(cfg.model == "cir");
    CHECK(cfg.scheme == "cir-splitting");
    CHECK(cfg.n_list == std::vector<long>{8, 16, 32});
    CHECK(cfg.fine_factor == 16);
    CHECK(cfg.cir_sigma == 0.5);
    CHECK(cfg.seed == 77);

    {
        std::ofstream out(path);
        out << "unknown-key = 3\n";
    }
    CHECK_THROWS_AS(apply_config_file(cfg, path), ConfigError);
    {
        std::ofstream out(path);
        out << "paths = not-a-number\n";
    }
    CHECK_THROWS_AS(apply_config_file(cfg, path), ConfigError);
    CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("atomic report writing") {
    const std::string path = "/tmp/pathsplit_report_test.csv";
    std::filesystem::remove(path);
    write_file_atomic(path, "N,h,S_N,stderr\n1,1,0,0\n");
    CHECK(std::filesystem::exists(path));
    CHECK(!std::filesystem::exists(path + ".tmp"));
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first == "N,h,S_N,stderr");
}

TEST_CASE("run_simulations trajectory mode") {
    ExperimentConfig cfg = oscillator_config();
    cfg.n_list = {16};
    cfg.num_paths = 1;
    std::vector<std::pair<double, Eigen::VectorXd>> trajectory;
    const auto endpoints = run_simulations(cfg, &trajectory);
    REQUIRE(endpoints.size() == 1);
    REQUIRE(trajectory.size() == 17);
    CHECK(trajectory.front().first == 0.0);
    CHECK(trajectory.back().first == doctest::Approx(1.0));
    CHECK(trajectory.back().second[0] == endpoints[0][0]);
}

TEST_CASE("erased CIR splitting matches the scalar stepper through the harness") {
    ExperimentConfig cfg = oscillator_config();
    cfg.model = "cir";
    cfg.scheme = "cir-splitting";
    const Problem problem = make_problem(cfg);
    const ErasedScheme scheme = make_erased_scheme(problem, parse_scheme("cir-splitting", ""));
    auto stepper = scheme.make(0.125);
    const CirSplitStepper direct(*problem.cir, 0.125);
    RngStream rng = stream_for(1, 2, 3, 4);
    const StepIncrement inc = sample_increment(rng, 0.125, 1, false);
    CHECK(stepper(Eigen::VectorXd::Constant(1, 1.0), inc.view())[0]
          == direct.step(1.0, inc.view()));
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathsplit/models.hpp"

namespace pathsplit {

/// One line of a verification table. Exact checks gate at machine-level
/// tolerances; statistical checks gate at 4 standard errors (or the stated
/// band). expected_fail marks known-negative cases (e.g. the first order
/// Strang path failing the high order matching condition), which count as
/// passes when they fail.
struct CheckLine {
    std::string name;
    bool exact = false;
    bool passed = false;
    bool expected_fail = false;
    std::string detail;

    bool ok() const { return expected_fail ? !passed : passed; }
};

struct VerifyResult {
    std::string title;
    std::vector<CheckLine> lines;

    /// 0 all ok, 1 a statistical check failed, 2 an exact identity failed.
    int exit_code() const;
    void print(std::ostream& os) const;
};

struct VerifyOptions {
    long samples = 0;    // 0 = per-command default
    double h = 0.37;
    int dim = 2;
    std::uint64_t seed = 42;
    int threads = 1;
    double sigmas = 4.0; // statistical gate width, in standard errors
};

/// Matching conditions of every splitting path kind (exact per-sample checks
/// plus Monte Carlo moment checks).
VerifyResult verify_paths(const VerifyOptions& opt);

/// Closed-form estimator suite: spot values, algebraic identities,
/// nonnegativity sweeps, and the Monte Carlo unbiasedness checks against
/// finely discretised Brownian paths.
VerifyResult verify_estimators(const VerifyOptions& opt);

/// CIR conditional moments: one-step Monte Carlo of the splitting against
/// the closed forms, and the analytic O(h^5) remainder order fit.
VerifyResult verify_moments(const CirParams& params, double h, const VerifyOptions& opt);

/// Brownian generator suite: marginal moments, independence, swing
/// conditionals, merge/refine identities and dyadic tree bit-exactness.
VerifyResult verify_brownian(const VerifyOptions& opt);

} // namespace pathsplit

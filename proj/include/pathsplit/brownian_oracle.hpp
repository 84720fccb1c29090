#pragma once

#include <vector>

#include "pathsplit/brownian.hpp"

namespace pathsplit::oracle {

/// Statistics of a Brownian path over [0, h], obtained by exact integration
/// of the piecewise-linear interpolant of the sampled grid values. This is
/// the independent reference the estimator and merge identities are checked
/// against: it never touches the closed-form samplers or estimators.
struct GridPathStats {
    double w = 0.0;        // increment over [0, h]
    double hst = 0.0;      // space-time Levy area
    double gap = 0.0;      // H over the left half minus H over the right half
    double k = 0.0;        // space-time-time Levy area
    double int_w2 = 0.0;   // \int_0^h W_u^2 du
    double int_uw = 0.0;   // \int_0^h u W_u du
    double sst = 0.0;      // space-space-time Levy area L (via \int W^2 du)

    double n() const { return sign_pm(gap); }

    // Same statistics over the two half intervals.
    double w_left = 0.0, w_right = 0.0;
    double hst_left = 0.0, hst_right = 0.0;
    double k_left = 0.0, k_right = 0.0;
};

/// Samples a standard Brownian grid path W_0 = 0, W_{i+1} = W_i + N(0, h/m);
/// the vector receives the m + 1 grid values.
void sample_grid_path(RngStream& rng, double h, int m, std::vector<double>& grid);

/// Computes the statistics of the (piecewise linear) grid path over [0, h].
/// m must be even so the midpoint falls on the grid.
GridPathStats scan_grid_path(const std::vector<double>& grid, double h);

} // namespace pathsplit::oracle

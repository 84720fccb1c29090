#include "pathsplit/brownian_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace pathsplit::oracle {

void sample_grid_path(RngStream& rng, double h, int m, std::vector<double>& grid) {
    grid.resize(m + 1);
    grid[0] = 0.0;
    const double sd = std::sqrt(h / static_cast<double>(m));
    for (int i = 0; i < m; ++i) grid[i + 1] = grid[i] + rng.normal(sd);
}

namespace {

struct CellSums {
    double int_w = 0.0;  // \int W du
    double int_uw = 0.0; // \int u W du (u measured from 0)
    double int_w2 = 0.0; // \int W^2 du
};

// Exact integrals of the linear interpolant over grid cells [first, last).
CellSums accumulate(const std::vector<double>& grid, double dt, int first, int last) {
    CellSums s;
    for (int i = first; i < last; ++i) {
        const double w0 = grid[i];
        const double dw = grid[i + 1] - grid[i];
        const double t0 = dt * i;
        s.int_w += dt * (w0 + 0.5 * dw);
        s.int_uw += dt * (t0 * w0 + 0.5 * (t0 * dw + dt * w0) + dt * dw / 3.0);
        s.int_w2 += dt * (w0 * w0 + w0 * dw + dw * dw / 3.0);
    }
    return s;
}

// H, K of the path restricted to [a, b] (integrals re-based to the interval).
struct IntervalStats {
    double w, hst, k;
};

IntervalStats interval_stats(const std::vector<double>& grid, double dt, int first, int last) {
    const CellSums s = accumulate(grid, dt, first, last);
    const double len = dt * (last - first);
    const double wa = grid[first];
    const double wb = grid[last];
    const double w = wb - wa;
    const double ta = dt * first;
    // Re-base to the interval: \int (W_u - wa) du and \int (u-ta)(W_u - wa) du.
    const double int_w = s.int_w - wa * len;
    const double int_uw = s.int_uw - ta * s.int_w - 0.5 * wa * len * len;
    IntervalStats out;
    out.w = w;
    out.hst = int_w / len - 0.5 * w;
    out.k = (0.5 * len * int_w - int_uw) / (len * len) + w / 12.0;
    return out;
}

} // namespace

GridPathStats scan_grid_path(const std::vector<double>& grid, double h) {
    const int m = static_cast<int>(grid.size()) - 1;
    if (m < 2 || m % 2 != 0)
        throw std::domain_error("scan_grid_path: need an even number of cells");
    const double dt = h / static_cast<double>(m);

    GridPathStats out;
    const IntervalStats full = interval_stats(grid, dt, 0, m);
    const IntervalStats left = interval_stats(grid, dt, 0, m / 2);
    const IntervalStats right = interval_stats(grid, dt, m / 2, m);
    out.w = full.w;
    out.hst = full.hst;
    out.k = full.k;
    out.w_left = left.w;
    out.w_right = right.w;
    out.hst_left = left.hst;
    out.hst_right = right.hst;
    out.k_left = left.k;
    out.k_right = right.k;
    out.gap = left.hst - right.hst;

    const CellSums s = accumulate(grid, dt, 0, m);
    out.int_w2 = s.int_w2; // grid[0] == 0, already based at the origin
    out.int_uw = s.int_uw;
    out.sst = 0.5 * (s.int_w2 - h * full.w * full.w / 3.0 - h * full.w * full.hst);
    return out;
}

} // namespace pathsplit::oracle

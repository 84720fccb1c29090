#include "pathsplit/brownian.hpp"

#include <cstring>
#include <ostream>
#include <stdexcept>

namespace pathsplit {

StepIncrement sample_increment(RngStream& rng, double h, int d, bool with_k) {
    if (!(h > 0.0)) throw std::domain_error("sample_increment: step length must be positive");
    if (d < 1) throw std::domain_error("sample_increment: dimension must be at least 1");
    StepIncrement inc;
    inc.h = h;
    inc.w.resize(d);
    inc.hst.resize(d);
    inc.gap.resize(d);
    if (with_k) inc.k.emplace(d);
    for (int j = 0; j < d; ++j) {
        const CoordStats c = levy::sample_coord(rng, h, with_k);
        inc.w[j] = c.w;
        inc.hst[j] = c.hst;
        inc.gap[j] = c.gap;
        if (with_k) (*inc.k)[j] = c.k;
    }
    return inc;
}

double sample_conditional_swing_gap(RngStream& rng, double n_sign, double h) {
    if (!(h > 0.0)) throw std::domain_error("sample_conditional_swing_gap: h must be positive");
    if (n_sign != 1.0 && n_sign != -1.0)
        throw std::domain_error("sample_conditional_swing_gap: n must be +1 or -1");
    return n_sign * std::abs(rng.normal(levy::gap_stddev(h)));
}

StepIncrement increment_from_whn(RngStream& rng, double h, const Eigen::ArrayXd& w,
                                 const Eigen::ArrayXd& hst, const Eigen::ArrayXd& n) {
    if (w.size() != hst.size() || w.size() != n.size())
        throw std::domain_error("increment_from_whn: mismatched coordinate counts");
    StepIncrement inc;
    inc.h = h;
    inc.w = w;
    inc.hst = hst;
    inc.gap.resize(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j)
        inc.gap[j] = sample_conditional_swing_gap(rng, n[j], h);
    return inc;
}

std::pair<StepIncrement, StepIncrement> refine(const StepIncrement& parent, RngStream& rng) {
    if (!(parent.h > 0.0)) throw std::domain_error("refine: parent step length must be positive");
    if (parent.k)
        throw std::invalid_argument(
            "refine: increments carrying k cannot be refined; generate fine-first");
    const int d = parent.dim();
    StepIncrement left, right;
    left.h = right.h = 0.5 * parent.h;
    left.w.resize(d); left.hst.resize(d); left.gap.resize(d);
    right.w.resize(d); right.hst.resize(d); right.gap.resize(d);
    for (int j = 0; j < d; ++j) {
        CoordStats p{parent.w[j], parent.hst[j], parent.gap[j], 0.0};
        auto [cl, cr] = levy::refine_coord(rng, parent.h, p);
        left.w[j] = cl.w; left.hst[j] = cl.hst; left.gap[j] = cl.gap;
        right.w[j] = cr.w; right.hst[j] = cr.hst; right.gap[j] = cr.gap;
    }
    return {left, right};
}

StepIncrement merge(const StepIncrement& left, const StepIncrement& right) {
    if (left.h != right.h)
        throw std::domain_error("merge: child step lengths differ");
    if (left.dim() != right.dim())
        throw std::domain_error("merge: child dimensions differ");
    if (left.k.has_value() != right.k.has_value())
        throw std::invalid_argument("merge: children must both carry k or both omit it");
    const int d = left.dim();
    const bool with_k = left.k.has_value();
    StepIncrement out;
    out.h = left.h + right.h;
    out.w.resize(d); out.hst.resize(d); out.gap.resize(d);
    if (with_k) out.k.emplace(d);
    for (int j = 0; j < d; ++j) {
        CoordStats cl{left.w[j], left.hst[j], left.gap[j], with_k ? (*left.k)[j] : 0.0};
        CoordStats cr{right.w[j], right.hst[j], right.gap[j], with_k ? (*right.k)[j] : 0.0};
        const CoordStats c = levy::merge_coord(cl, cr, with_k);
        out.w[j] = c.w;
        out.hst[j] = c.hst;
        out.gap[j] = c.gap;
        if (with_k) (*out.k)[j] = c.k;
    }
    return out;
}

void DyadicBrownianTree::generate(std::uint64_t seed, std::uint64_t path_index, int num_leaves,
                                  double leaf_h, int d, int depth, StatLevel stats) {
    if (!(leaf_h > 0.0)) throw std::domain_error("DyadicBrownianTree: leaf_h must be positive");
    if (d < 1) throw std::domain_error("DyadicBrownianTree: dimension must be at least 1");
    if (depth < 0 || num_leaves <= 0 || num_leaves % (1 << depth) != 0)
        throw std::domain_error("DyadicBrownianTree: num_leaves must be divisible by 2^depth");
    leaf_h_ = leaf_h;
    dim_ = d;
    depth_ = depth;
    stats_ = stats;
    const bool use_k = with_k();
    levels_.resize(depth + 1);

    Level& leaves = levels_[0];
    leaves.w.resize(d, num_leaves);
    leaves.hst.resize(d, num_leaves);
    leaves.gap.resize(d, num_leaves);
    if (use_k) leaves.k.resize(d, num_leaves);
    for (int i = 0; i < num_leaves; ++i) {
        RngStream rng = stream_for(seed, path_index, static_cast<std::uint64_t>(i), 0);
        for (int j = 0; j < d; ++j) {
            const CoordStats c = levy::sample_coord(rng, leaf_h, stats);
            leaves.w(j, i) = c.w;
            leaves.hst(j, i) = c.hst;
            leaves.gap(j, i) = c.gap;
            if (use_k) leaves.k(j, i) = c.k;
        }
    }

    for (int l = 1; l <= depth; ++l) {
        const Level& fine = levels_[l - 1];
        Level& coarse = levels_[l];
        const int n = static_cast<int>(fine.w.cols()) / 2;
        coarse.w.resize(d, n);
        coarse.hst.resize(d, n);
        coarse.gap.resize(d, n);
        if (use_k) coarse.k.resize(d, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) {
                CoordStats cl{fine.w(j, 2 * i), fine.hst(j, 2 * i), fine.gap(j, 2 * i),
                                    use_k ? fine.k(j, 2 * i) : 0.0};
                CoordStats cr{fine.w(j, 2 * i + 1), fine.hst(j, 2 * i + 1),
                                    fine.gap(j, 2 * i + 1), use_k ? fine.k(j, 2 * i + 1) : 0.0};
                const CoordStats c = levy::merge_coord(cl, cr, use_k);
                coarse.w(j, i) = c.w;
                coarse.hst(j, i) = c.hst;
                coarse.gap(j, i) = c.gap;
                if (use_k) coarse.k(j, i) = c.k;
            }
        }
    }
}

StepIncrement DyadicBrownianTree::increment(int level, int i) const {
    const Level& lv = levels_[level];
    StepIncrement inc;
    inc.h = step_h(level);
    inc.w = lv.w.col(i);
    inc.hst = lv.hst.col(i);
    inc.gap = lv.gap.col(i);
    if (with_k()) inc.k = Eigen::ArrayXd(lv.k.col(i));
    return inc;
}

namespace {

void write_le_double(std::ostream& os, double x) {
    // Serialise as little-endian IEEE-754 regardless of host order.
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    unsigned char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

} // namespace

void dump_increments_csv(std::ostream& os, const std::vector<IncrementRecord>& records) {
    if (records.empty()) return;
    const int d = records.front().inc.dim();
    const bool with_k = records.front().inc.k.has_value();
    os << "path,step,h";
    for (int j = 1; j <= d; ++j) os << ",w_" << j;
    for (int j = 1; j <= d; ++j) os << ",hst_" << j;
    if (with_k)
        for (int j = 1; j <= d; ++j) os << ",k_" << j;
    for (int j = 1; j <= d; ++j) os << ",n_" << j;
    os << '\n';
    os.precision(17);
    for (const IncrementRecord& r : records) {
        os << r.path << ',' << r.step << ',' << r.inc.h;
        for (int j = 0; j < d; ++j) os << ',' << r.inc.w[j];
        for (int j = 0; j < d; ++j) os << ',' << r.inc.hst[j];
        if (with_k)
            for (int j = 0; j < d; ++j) os << ',' << (*r.inc.k)[j];
        for (int j = 0; j < d; ++j) os << ',' << r.inc.n(j);
        os << '\n';
    }
}

void dump_increments_binary(std::ostream& os, const std::vector<IncrementRecord>& records) {
    for (const IncrementRecord& r : records) {
        const int d = r.inc.dim();
        write_le_double(os, static_cast<double>(r.path));
        write_le_double(os, static_cast<double>(r.step));
        write_le_double(os, r.inc.h);
        for (int j = 0; j < d; ++j) write_le_double(os, r.inc.w[j]);
        for (int j = 0; j < d; ++j) write_le_double(os, r.inc.hst[j]);
        if (r.inc.k)
            for (int j = 0; j < d; ++j) write_le_double(os, (*r.inc.k)[j]);
        for (int j = 0; j < d; ++j) write_le_double(os, r.inc.n(j));
    }
}

} // namespace pathsplit

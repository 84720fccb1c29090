#include "pathsplit/estimators.hpp"

#include <sstream>
#include <stdexcept>

namespace pathsplit {
namespace estimators {

double l_cond_var(const ScalarStepStats& s) {
    const double h = s.h;
    const double v = 11.0 / 25200.0 * h * h * h * h
                   + (1.0 / 720.0 - 1.0 / (384.0 * kPi)) * h * h * h * s.w * s.w
                   + h * h * h * s.hst * s.hst / 700.0
                   - s.n * std::pow(h, 3.5) * s.w / (320.0 * kSqrt6Pi);
    if (v < 0.0) {
        std::ostringstream msg;
        msg << "l_cond_var: negative value " << v << " at h=" << h << " w=" << s.w
            << " hst=" << s.hst << " n=" << s.n;
        throw std::logic_error(msg.str());
    }
    return v;
}

namespace {
[[noreturn]] void throw_negative_radicand(const char* fn, double r, const ScalarStepStats& s) {
    std::ostringstream msg;
    msg << fn << ": negative radicand " << r << " at h=" << s.h << " w=" << s.w
        << " hst=" << s.hst << " n=" << s.n;
    throw std::logic_error(msg.str());
}
} // namespace

double c_hs2(const ScalarStepStats& s) {
    const double r = c_hs2_radicand(s);
    if (r < 0.0) throw_negative_radicand("c_hs2", r, s);
    return epsilon_sign(s) * std::sqrt(r);
}

double c_so2(const ScalarStepStats& s) {
    const double r = c_so2_radicand(s);
    if (r < 0.0) throw_negative_radicand("c_so2", r, s);
    return epsilon_sign(s) * std::sqrt(r);
}

} // namespace estimators
} // namespace pathsplit

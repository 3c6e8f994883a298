#include "conewhit/eval.hpp"

#include <cmath>

namespace conewhit {

const char* to_string(EvalMethod m) {
    switch (m) {
        case EvalMethod::quadrature: return "quadrature";
        case EvalMethod::mc_importance: return "mc-importance";
        case EvalMethod::series: return "series";
        case EvalMethod::closed_form: return "closed-form";
    }
    return "unknown";
}

void SignedLogSum::accumulate(double& shift, double& s, double lw) {
    if (lw == -std::numeric_limits<double>::infinity()) return;
    if (lw > shift) {
        s = s * std::exp(shift - lw) + 1.0;
        shift = lw;
    } else {
        s += std::exp(lw - shift);
    }
}

void SignedLogSum::add(double log_abs, int sign) {
    if (sign >= 0)
        accumulate(pos_shift_, pos_, log_abs);
    else
        accumulate(neg_shift_, neg_, log_abs);
}

SignedLogValue SignedLogSum::total() const {
    const double lp = pos_ > 0.0 ? pos_shift_ + std::log(pos_)
                                 : -std::numeric_limits<double>::infinity();
    const double ln = neg_ > 0.0 ? neg_shift_ + std::log(neg_)
                                 : -std::numeric_limits<double>::infinity();
    SignedLogValue out = log_diff_exp(lp, ln);
    return out;
}

SignedLogValue log_diff_exp(double a, double b) {
    SignedLogValue v;
    if (a == b) {  // includes both -inf
        v.log_abs = -std::numeric_limits<double>::infinity();
        v.sign = 1;
        return v;
    }
    const double hi = std::max(a, b), lo = std::min(a, b);
    v.sign = a > b ? 1 : -1;
    v.log_abs = hi + std::log1p(-std::exp(lo - hi));
    return v;
}

}  // namespace conewhit

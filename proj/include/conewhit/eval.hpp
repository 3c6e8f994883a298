#pragma once

// Uniform numeric return of every evaluator: the value as (sign, log-magnitude)
// so extreme gamma-function magnitudes survive, an error estimate for the
// value itself (not the log), and an effort/method tag.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "conewhit/random.hpp"

namespace conewhit {

enum class EvalMethod { quadrature, mc_importance, series, closed_form };

const char* to_string(EvalMethod m);

struct EvalResult {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 1;               // +1 / -1; exact zero is (sign=+1, log_abs=-inf)
    double abs_err = 0.0;       // absolute error of the value (one SE for MC)
    EvalMethod method = EvalMethod::closed_form;
    long long effort = 0;       // node count or sample count
    bool statistical = false;   // abs_err is a standard error, not a bound
    std::string warning;

    double value() const { return sign * std::exp(log_abs); }
    double rel_err() const { return abs_err * std::exp(-log_abs); }

    static EvalResult from_value(double v, double err, EvalMethod m, long long effort,
                                 bool statistical = false) {
        EvalResult r;
        r.sign = v < 0.0 ? -1 : 1;
        r.log_abs = std::log(std::abs(v));
        r.abs_err = err;
        r.method = m;
        r.effort = effort;
        r.statistical = statistical;
        return r;
    }

    static EvalResult from_log(double log_abs, int sign, double err, EvalMethod m,
                               long long effort, bool statistical = false) {
        EvalResult r;
        r.log_abs = log_abs;
        r.sign = sign;
        r.abs_err = err;
        r.method = m;
        r.effort = effort;
        r.statistical = statistical;
        return r;
    }
};

// Effort/tuning knob shared by all evaluators.  Evaluators are pure functions
// of (inputs, settings): the Monte Carlo base stream is part of the settings.
struct EvalSettings {
    long long samples = 200000;  // MC default for p >= 2
    double tol = 1e-9;           // quadrature two-grid relative tolerance
    int workers = 1;             // threads over MC blocks; does not change results
    int min_nodes = 32;
    int max_nodes = 1024;
    double importance_scale = 1.0;  // importance-law rate multiplier (verification use)
    enum class Force { automatic, quadrature, mc } force = Force::automatic;
    RandomStream stream{0, 0};

    EvalSettings with_stream(RandomStream s) const {
        EvalSettings e = *this;
        e.stream = s;
        return e;
    }
    EvalSettings with_samples(long long n) const {
        EvalSettings e = *this;
        e.samples = n;
        return e;
    }
};

// ---------------------------------------------------------------------------
// Accumulators.  All support merge() so blocked parallel reductions combine
// partials in fixed block order (bit-identical for any worker count).

// Mean / standard error of plain (possibly signed) values.
struct MeanAccumulator {
    double sum = 0.0, sumsq = 0.0;
    long long n = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    void merge(const MeanAccumulator& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double variance() const {
        const double m = mean();
        const double v = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double se() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

// Mean / SE of positive values supplied in log space, with a running max
// shift so magnitudes like exp(+-900) are representable.
struct LogMeanAccumulator {
    double shift = -std::numeric_limits<double>::infinity();
    double s1 = 0.0;  // sum exp(lw - shift)
    double s2 = 0.0;  // sum exp(2(lw - shift))
    long long n = 0;

    void add(double lw) {
        if (lw > shift) {
            if (n > 0) {
                const double c = std::exp(shift - lw);
                s1 *= c;
                s2 *= c * c;
            }
            shift = lw;
        }
        const double v = std::exp(lw - shift);
        s1 += v;
        s2 += v * v;
        ++n;
    }
    void merge(const LogMeanAccumulator& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        double m = shift, os1 = o.s1, os2 = o.s2, ts1 = s1, ts2 = s2;
        if (o.shift > m) {
            const double c = std::exp(m - o.shift);
            ts1 *= c;
            ts2 *= c * c;
            m = o.shift;
        } else {
            const double c = std::exp(o.shift - m);
            os1 *= c;
            os2 *= c * c;
        }
        shift = m;
        s1 = ts1 + os1;
        s2 = ts2 + os2;
        n += o.n;
    }
    // ln(mean of exp(lw))
    double log_mean() const { return shift + std::log(s1 / static_cast<double>(n)); }
    // ln(standard error of that mean)
    double log_se() const {
        const double nn = static_cast<double>(n);
        const double var = (s2 - s1 * s1 / nn) / (nn - 1.0);
        if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
        return shift + 0.5 * std::log(var / nn);
    }
};

// Paired accumulator for ratio estimates (delta method with covariance).
struct PairAccumulator {
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    long long n = 0;

    void add(double x, double y) {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        ++n;
    }
    void merge(const PairAccumulator& o) {
        sx += o.sx;
        sy += o.sy;
        sxx += o.sxx;
        syy += o.syy;
        sxy += o.sxy;
        n += o.n;
    }
    double mean_x() const { return sx / static_cast<double>(n); }
    double mean_y() const { return sy / static_cast<double>(n); }
    double var_x() const {
        const double nn = static_cast<double>(n);
        return std::max(0.0, (sxx - sx * sx / nn) / (nn - 1.0));
    }
    double var_y() const {
        const double nn = static_cast<double>(n);
        return std::max(0.0, (syy - sy * sy / nn) / (nn - 1.0));
    }
    double cov_xy() const {
        const double nn = static_cast<double>(n);
        return (sxy - sx * sy / nn) / (nn - 1.0);
    }
    // ratio mean_x / mean_y with a delta-method standard error
    double ratio() const { return mean_x() / mean_y(); }
    double ratio_se() const {
        const double nn = static_cast<double>(n);
        const double mx = mean_x(), my = mean_y();
        const double v = var_x() / (mx * mx) + var_y() / (my * my) -
                         2.0 * cov_xy() / (mx * my);
        const double r = std::abs(mx / my);
        return r * std::sqrt(std::max(0.0, v) / nn);
    }
};

// ---------------------------------------------------------------------------
// Signed log-space sums (quadrature with signed integrands).

struct SignedLogValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 1;
};

// Accumulates sum of sign*exp(log_abs) terms as separate positive/negative
// log sums; resolves to a SignedLogValue at the end.
class SignedLogSum {
  public:
    void add(double log_abs, int sign);
    void add(const SignedLogValue& v) { add(v.log_abs, v.sign); }
    SignedLogValue total() const;

  private:
    static void accumulate(double& shift, double& s, double lw);
    double pos_shift_ = -std::numeric_limits<double>::infinity(), pos_ = 0.0;
    double neg_shift_ = -std::numeric_limits<double>::infinity(), neg_ = 0.0;
};

// log |e^a - e^b| with sign(e^a - e^b)
SignedLogValue log_diff_exp(double a, double b);

}  // namespace conewhit

#include "conewhit/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

#include "conewhit/errors.hpp"

namespace conewhit {

namespace {

std::uint64_t double_bits(double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof(u));
    return u;
}

LaguerreRule build_rule(double alpha, int n) {
    if (!(alpha > -1.0)) throw DomainError("laguerre_rule: weight exponent must be > -1");
    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
    for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k * (k + alpha));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(std::max(0, n - 1)),
                              Eigen::ComputeEigenvectors);
    LaguerreRule rule;
    rule.alpha = alpha;
    rule.x.resize(n);
    rule.log_w.resize(n);
    const double log_mu0 = std::lgamma(alpha + 1.0);
    for (int i = 0; i < n; ++i) {
        rule.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.log_w[i] = log_mu0 + 2.0 * std::log(std::abs(v0));
    }
    return rule;
}

}  // namespace

const LaguerreRule& laguerre_rule(double alpha, int n) {
    using Key = std::pair<std::uint64_t, int>;
    static std::map<Key, std::unique_ptr<LaguerreRule>> cache;
    static std::shared_mutex mutex;
    const Key key{double_bits(alpha), n};
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    std::unique_lock lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<LaguerreRule>(build_rule(alpha, n))).first;
    return *it->second;
}

SignedLogValue glq_fixed(double alpha, double rate, const LogIntegrand& g, int nodes) {
    if (!(rate > 0.0)) throw DomainError("glq: rate must be positive");
    const LaguerreRule& rule = laguerre_rule(alpha, nodes);
    const double log_scale = -(alpha + 1.0) * std::log(rate);
    SignedLogSum sum;
    for (int i = 0; i < nodes; ++i) {
        const SignedLogValue gv = g(rule.x[i] / rate);
        sum.add(rule.log_w[i] + log_scale + gv.log_abs, gv.sign);
    }
    return sum.total();
}

EvalResult glq_log_integrate(double alpha, double rate, const LogIntegrand& g,
                             const EvalSettings& settings) {
    int n = settings.min_nodes;
    SignedLogValue prev = glq_fixed(alpha, rate, g, n);
    long long effort = n;
    for (;;) {
        const int n2 = 2 * n;
        if (n2 > settings.max_nodes) {
            EvalResult r = EvalResult::from_log(prev.log_abs, prev.sign, 0.0,
                                                EvalMethod::quadrature, effort);
            r.abs_err = std::exp(prev.log_abs);  // no convergence evidence
            r.warning = "quadrature did not reach two-grid tolerance";
            return r;
        }
        const SignedLogValue cur = glq_fixed(alpha, rate, g, n2);
        effort += n2;
        // two-grid difference of the signed values
        double log_d;
        if (cur.sign == prev.sign) {
            log_d = log_diff_exp(cur.log_abs, prev.log_abs).log_abs;
        } else {
            // opposite signs: |cur - prev| = |cur| + |prev|
            const double hi = std::max(cur.log_abs, prev.log_abs);
            log_d = hi + std::log1p(std::exp(std::min(cur.log_abs, prev.log_abs) - hi));
        }
        const double rel = std::exp(log_d - cur.log_abs);
        if (rel < settings.tol || log_d == -std::numeric_limits<double>::infinity()) {
            EvalResult r = EvalResult::from_log(cur.log_abs, cur.sign, std::exp(log_d),
                                                EvalMethod::quadrature, effort);
            return r;
        }
        prev = cur;
        n = n2;
    }
}

}  // namespace conewhit

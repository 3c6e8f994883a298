#pragma once

// Generalized Gauss-Laguerre quadrature (weight t^a e^{-t} on (0,inf)) via
// Golub-Welsch, with node-doubling drivers that report a two-grid Richardson
// error estimate.  Rules are cached per (a, n); weights are kept in log form
// so near-singular exponents (a close to -1) stay representable.

#include <functional>
#include <vector>

#include "conewhit/eval.hpp"

namespace conewhit {

struct LaguerreRule {
    double alpha = 0.0;  // weight exponent a > -1
    std::vector<double> x;
    std::vector<double> log_w;  // sum of exp(log_w) = Gamma(a + 1)
};

// Shared cache; thread-safe (single-writer construction, read-only after).
const LaguerreRule& laguerre_rule(double alpha, int n);

// Integrand supplied in signed log form: g(t) = sign * exp(log_abs).
using LogIntegrand = std::function<SignedLogValue(double)>;

// Evaluates I = \int_0^inf t^alpha e^{-rate t} g(t) dt at a fixed node count.
SignedLogValue glq_fixed(double alpha, double rate, const LogIntegrand& g, int nodes);

// Adaptive version: doubles nodes from settings.min_nodes until two-grid
// relative agreement < settings.tol (or max_nodes reached; the result then
// carries a warning and the last two-grid difference as abs_err).
EvalResult glq_log_integrate(double alpha, double rate, const LogIntegrand& g,
                             const EvalSettings& settings = {});

}  // namespace conewhit

#pragma once

// Partitions, zonal polynomials in C-normalization (sum over |kappa| = k of
// C_kappa(X) equals (tr X)^k), generalized Pochhammer symbols, and the
// truncated zonal series for the Gauss 2F1 of matrix argument.
//
// Zonal polynomials are expanded in monomial symmetric functions with the
// classical recurrence on partitions; the coefficient table is cached per
// (weight, variable count).

#include <vector>

#include "conewhit/eval.hpp"
#include "conewhit/linalg.hpp"

namespace conewhit {

struct Partition {
    std::vector<int> parts;  // non-increasing, positive entries

    Partition() = default;
    Partition(std::initializer_list<int> p) : parts(p) {}
    explicit Partition(std::vector<int> p) : parts(std::move(p)) {}

    int weight() const {
        int s = 0;
        for (int x : parts) s += x;
        return s;
    }
    int length() const { return static_cast<int>(parts.size()); }
    bool operator==(const Partition& o) const { return parts == o.parts; }
};

// All partitions of k into at most max_parts parts, reverse-lexicographic
// order (so any partition appears before everything it dominates).
std::vector<Partition> partitions(int k, int max_parts);

// (a)_kappa = prod_i (a - (i-1)/2)_{k_i} (rising factorials).
double gen_pochhammer(double a, const Partition& kappa);

struct LogPochhammer {
    double log_abs;
    int sign;  // 0 when the product hits an exact zero
};
LogPochhammer gen_pochhammer_log(double a, const Partition& kappa);

// Monomial symmetric polynomial m_lambda; zero when lambda has more parts
// than there are variables.
double monomial_sym(const Partition& lambda, const std::vector<double>& vars);

// C_kappa as a function of eigenvalues.
double zonal_C(const Partition& kappa, const std::vector<double>& eigenvalues);

struct SeriesParams {
    double a = 0.0, b = 0.0, c = 0.0;
    int max_degree = 30;
    double tail_tol = 1e-10;
};

// 2F1(a,b;c;X) truncated zonal series; requires spectral radius of X < 1.
// Converged when the last whole-degree contribution drops below tail_tol;
// throws NotConverged past max_degree, DomainError on argument or
// denominator-breakpoint violations.
EvalResult hyp2f1_matrix(const SeriesParams& sp, const SymMatrix& X);
EvalResult hyp2f1_matrix(const SeriesParams& sp, const std::vector<double>& eigenvalues);

EvalResult hyp2f1_scalar(double a, double b, double c, double x,
                         double tail_tol = 1e-14, int max_terms = 10000);

}  // namespace conewhit

#pragma once

// Growth-decay residual distributions for Y = X1 - X2 with independent
// (matrix-variate) gamma inputs: the scalar two-branch Whittaker density, the
// oriented matrix residual density (real and complex), samplers, orientation
// probabilities, and a two-path conditional moment check.
//
// The oriented density is the law of Y conditional on the orientation event
// {Y PD or -Y PD}: branch kernels
//   h1(Y) = Gamma_p(a2) e^{tr((B2-B1)Y)/2} |Y|^{(a1+a2)/2-(p+1)/2}
//           W_{(a1-a2)/2,(a1+a2)/2-(p+1)/4}((B1+B2)^{1/2} Y (B1+B2)^{1/2})
// (mirrored for -Y with a1<->a2, B1<->B2), normalized by c = c1 + c2 with
// c_j the cone integrals of the kernels.  The Gamma_p branch weights come
// from the residual derivation, so at p = 1 the normalized density equals
// the unconditional scalar density exactly.

#include "conewhit/eval.hpp"
#include "conewhit/linalg.hpp"
#include "conewhit/matrix_gamma.hpp"
#include "conewhit/whittaker.hpp"

namespace conewhit {

// ---------------------------------------------------------------------------
// Scalar case.  Scale convention of the inputs: density ~ x^{a-1} e^{-x/beta}.

struct ScalarResidualParams {
    ScalarResidualParams(double alpha1, double alpha2, double beta1, double beta2);

    double alpha1, alpha2, beta1, beta2;
    double beta0;            // 1/beta1 + 1/beta2
    double log_c1, log_c2;   // branch constants
};

// Two-branch Whittaker density of y = x1 - x2, evaluated through the scalar
// Whittaker oracle.  y = 0 is the closed-form limit when alpha1+alpha2 >= 2
// and refused (DomainError) when the density is singular there.
double scalar_residual_density(const ScalarResidualParams& params, double y,
                               const EvalSettings& settings = {});

// ---------------------------------------------------------------------------
// Matrix case (real).

struct MatrixResidualParams {
    MatrixResidualParams(double alpha1, double alpha2, SpdMatrix B1, SpdMatrix B2);

    int p;
    double alpha1, alpha2;
    SpdMatrix B1, B2;
    SpdMatrix S;        // B1 + B2
    SpdMatrix sqrt_S;
    double log_delta;   // ln of delta = |B1|^{a1}|B2|^{a2} / (Gamma_p(a1) Gamma_p(a2))
    double lg1, lg2;    // ln Gamma_p(alpha1), ln Gamma_p(alpha2)
};

struct OrientedDensityParts {
    EvalResult c1, c2;        // branch normalizers with error estimates
    EvalSettings settings;    // effort echo; stream reused for W evaluations
    double log_c() const;     // ln(c1 + c2)
    double c_err() const;     // combined error estimate of c1 + c2
};

// Branch normalizers c1, c2.  p = 1 uses deterministic quadrature by default;
// p >= 2 (or force=mc) importance-samples a type-2-beta reduction of the
// cone integral (the Whittaker factor is integrated out exactly).
OrientedDensityParts compute_normalizers(const MatrixResidualParams& params,
                                         const EvalSettings& settings = {});

// log of the oriented density at strictly definite Y; OrientationError
// otherwise.  Value-only: the MC uncertainty of the normalizer and of the
// p >= 2 Whittaker factor is a documented systematic (parts carries it).
double matrix_residual_log_density(const MatrixResidualParams& params,
                                   const SymMatrix& Y,
                                   const OrientedDensityParts& parts);

SymMatrix residual_sample(const MatrixResidualParams& params, RandomStream& rng);

struct OrientationEstimate {
    double p_pos = 0, p_neg = 0, p_other = 0;
    double se_pos = 0, se_neg = 0, se_other = 0;
    long long n = 0;
};
OrientationEstimate orientation_probability(const MatrixResidualParams& params,
                                            long long n, const RandomStream& rng,
                                            int workers = 1);

enum class Functional { unit, trace, logdet };
enum class Orientation { positive, negative };

struct MomentCheckReport {
    double empirical = 0, empirical_se = 0;  // filtered sample mean of f
    double weighted = 0, weighted_se = 0;    // density-weighted cone integral
    double z = 0;
    long long n_class = 0;  // draws that landed in the orientation class
    long long n = 0;
};

// Compares E[f(Y) | orientation] estimated two ways: filtering residual
// draws, and integrating f against the oriented density with the
// normalizer importance scheme.  For the negative class, trace means tr(Y)
// and logdet means ln det(-Y).
MomentCheckReport conditional_moment_check(const MatrixResidualParams& params,
                                           Functional f, Orientation orientation,
                                           long long n, const RandomStream& rng,
                                           const EvalSettings& settings = {});

// ---------------------------------------------------------------------------
// Complex (Hermitian) case; mirrors the real one with exponent shifts p/2
// and the complex Whittaker function.

struct ComplexResidualParams {
    ComplexResidualParams(double alpha1, double alpha2, HpdMatrix B1, HpdMatrix B2);

    int p;
    double alpha1, alpha2;
    HpdMatrix B1, B2;
    HpdMatrix S;
    HpdMatrix sqrt_S;
    double lg1, lg2;  // ln Gamma~_p
};

OrientedDensityParts compute_normalizers_complex(const ComplexResidualParams& params,
                                                 const EvalSettings& settings = {});

double complex_residual_log_density(const ComplexResidualParams& params,
                                    const HermMatrix& Y,
                                    const OrientedDensityParts& parts);

HermMatrix residual_sample_complex(const ComplexResidualParams& params,
                                   RandomStream& rng);

OrientationEstimate orientation_probability_complex(const ComplexResidualParams& params,
                                                    long long n, const RandomStream& rng,
                                                    int workers = 1);

MomentCheckReport conditional_moment_check_complex(const ComplexResidualParams& params,
                                                   Functional f, Orientation orientation,
                                                   long long n, const RandomStream& rng,
                                                   const EvalSettings& settings = {});

}  // namespace conewhit

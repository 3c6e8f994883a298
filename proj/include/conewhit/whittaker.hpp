#pragma once

// The M-function
//   M(alpha, beta; A) = \int_{X>0} |X|^{alpha-(p+1)/2} |I+X|^{beta-(p+1)/2}
//                       e^{-tr(A X)} dX
// and the Whittaker function of matrix argument derived from it:
//   M(mu, nu; A) = |A|^{-(mu+nu)/2} Gamma_p(mu) e^{tr(A)/2}
//                  W_{(nu-mu)/2, (nu+mu-(p+1)/2)/2}(A).
// Engines: generalized Gauss-Laguerre quadrature for p = 1, importance-sampled
// Monte Carlo over the cone (law MG(mu, A), weight |I+X|^{nu-(p+1)/2}) for any
// p.  The complex analogue mirrors this with exponent shifts p/2 and the
// complex gamma.  tricomi_u is the classical scalar oracle used for p = 1
// cross-checks.

#include "conewhit/eval.hpp"
#include "conewhit/linalg.hpp"
#include "conewhit/matrix_gamma.hpp"
#include "conewhit/mc.hpp"

#include <functional>

namespace conewhit {

struct MFunctionParams {
    MFunctionParams(double alpha_in, double beta_in, int p_in);
    double alpha;  // must exceed (p-1)/2
    double beta;   // unrestricted
    int p;
};

// Index pair (a, b) of W_{a,b}; the M-function reparametrization is
// mu = b - a + (p+1)/4, nu = a + b + (p+1)/4.
struct WhittakerIndices {
    double a = 0.0;
    double b = 0.0;
    int p = 1;

    double mu() const { return b - a + 0.25 * (p + 1); }
    double nu() const { return a + b + 0.25 * (p + 1); }
    static WhittakerIndices from_mu_nu(double mu, double nu, int p) {
        return {0.5 * (nu - mu), 0.5 * (nu + mu - 0.5 * (p + 1)), p};
    }
    bool admissible() const { return mu() > 0.5 * (p - 1); }
};

EvalResult m_function(const MFunctionParams& params, const SpdMatrix& A,
                      const EvalSettings& settings = {});

// Complex M-function with exponents |det Z|^{mu-p} |det(I+Z)|^{nu-p};
// requires mu > p-1.
EvalResult m_function_complex(double mu, double nu, const HpdMatrix& A,
                              const EvalSettings& settings = {});

EvalResult whittaker_w(const WhittakerIndices& idx, const SpdMatrix& A,
                       const EvalSettings& settings = {});

// Complex Whittaker W~_{a,b}; integral representation requires b - a > p/2 - 1.
EvalResult whittaker_w_complex(const WhittakerIndices& idx, const HpdMatrix& A,
                               const EvalSettings& settings = {});

// Tricomi confluent U(a,b,z) = (1/Gamma(a)) \int_0^inf t^{a-1} (1+t)^{b-a-1}
// e^{-z t} dt for a > 0, z > 0, by adaptive Gauss-Laguerre.
EvalResult tricomi_u(double a, double b, double z, const EvalSettings& settings = {});

// Classical scalar W_{kappa,mu}(z) through U, using W_{k,mu} = W_{k,-mu}.
EvalResult scalar_whittaker_w(double kappa, double mu, double z,
                              const EvalSettings& settings = {});

// Mean and standard error of f over n MG(law) samples; deterministic under a
// fixed stream, independent of worker count.
EvalResult mc_cone_expectation(const std::function<double(const SpdMatrix&)>& f,
                               const MatrixGammaParams& law, long long n,
                               const RandomStream& rng, int workers = 1);

}  // namespace conewhit

#pragma once

// Matrix-variate gamma function and density, real and complex, with exact
// Bartlett samplers.  MG(alpha, B) has density
//   |B|^alpha / Gamma_p(alpha) * |X|^{alpha-(p+1)/2} exp(-tr(B X))
// on the SPD cone; it coincides with Wishart(2*alpha, (2B)^{-1}).  The
// complex analogue uses exponent alpha - p and the complex gamma.

#include "conewhit/linalg.hpp"
#include "conewhit/random.hpp"

namespace conewhit {

// ln Gamma_p(alpha) = p(p-1)/4 ln pi + sum_{j=0}^{p-1} ln Gamma(alpha - j/2);
// requires alpha > (p-1)/2.
double log_gamma_p(int p, double alpha);

// ln Gamma~_p(alpha) = p(p-1)/2 ln pi + sum_{j=0}^{p-1} ln Gamma(alpha - j);
// requires alpha > p - 1.
double log_gamma_p_complex(int p, double alpha);

struct MatrixGammaParams {
    MatrixGammaParams(double alpha, SpdMatrix scale);

    int p;
    double alpha;
    SpdMatrix B;
    double log_det_B;
    double log_gamma;  // ln Gamma_p(alpha)

    // ln of the normalizing constant: alpha ln|B| - ln Gamma_p(alpha)
    double log_norm() const { return alpha * log_det_B - log_gamma; }
};

struct ComplexGammaParams {
    ComplexGammaParams(double alpha, HpdMatrix scale);

    int p;
    double alpha;
    HpdMatrix B;
    double log_det_B;
    double log_gamma;

    double log_norm() const { return alpha * log_det_B - log_gamma; }
};

double log_density(const MatrixGammaParams& params, const SpdMatrix& x);
double log_density_complex(const ComplexGammaParams& params, const HpdMatrix& x);

// Allocation-light sampler for Monte Carlo loops.  draw() writes an SPD p x p
// matrix; thread-safe given distinct workspaces and streams.
class MatrixGammaSampler {
  public:
    explicit MatrixGammaSampler(const MatrixGammaParams& params);
    // direct construction from (alpha, B) without the params wrapper
    MatrixGammaSampler(double alpha, const SpdMatrix& scale);

    struct Workspace {
        Matrix t, c;
    };
    void draw(Matrix& out, Workspace& ws, RandomStream& rng) const;
    int dim() const { return p_; }

  private:
    int p_;
    double alpha_;
    Matrix a_;  // A A^T = (2B)^{-1}
};

class ComplexGammaSampler {
  public:
    explicit ComplexGammaSampler(const ComplexGammaParams& params);
    ComplexGammaSampler(double alpha, const HpdMatrix& scale);

    struct Workspace {
        CMatrix t, c;
    };
    void draw(CMatrix& out, Workspace& ws, RandomStream& rng) const;
    int dim() const { return p_; }

  private:
    int p_;
    double alpha_;
    CMatrix a_;  // A A^* = B^{-1}
};

SpdMatrix sample(const MatrixGammaParams& params, RandomStream& rng);
HpdMatrix sample_complex(const ComplexGammaParams& params, RandomStream& rng);

// Matrix-variate type-2 beta (matrix F) with density
//   Gamma_p(a+b) / (Gamma_p(a) Gamma_p(b)) |X|^{a-(p+1)/2} |I+X|^{-(a+b)};
// sampled as W2^{-1/2} W1 W2^{-T/2} from two unit-scale gamma draws.
class MatrixBeta2Sampler {
  public:
    MatrixBeta2Sampler(int p, double a, double b);

    struct Workspace {
        Matrix w1, w2, l2;
        MatrixGammaSampler::Workspace g;
    };
    void draw(Matrix& out, Workspace& ws, RandomStream& rng) const;
    double log_density_const() const;  // ln of the density normalizing constant

  private:
    int p_;
    double a_, b_;
    MatrixGammaSampler s1_, s2_;
};

class ComplexBeta2Sampler {
  public:
    ComplexBeta2Sampler(int p, double a, double b);

    struct Workspace {
        CMatrix w1, w2, l2;
        ComplexGammaSampler::Workspace g;
    };
    void draw(CMatrix& out, Workspace& ws, RandomStream& rng) const;
    double log_density_const() const;

  private:
    int p_;
    double a_, b_;
    ComplexGammaSampler s1_, s2_;
};

}  // namespace conewhit

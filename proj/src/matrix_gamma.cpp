#include "conewhit/matrix_gamma.hpp"

#include <cmath>
#include <numbers>

namespace conewhit {

double log_gamma_p(int p, double alpha) {
    if (p < 1) throw std::invalid_argument("log_gamma_p: p must be >= 1");
    if (!(alpha > 0.5 * (p - 1)))
        throw DomainError("log_gamma_p: requires alpha > (p-1)/2");
    double s = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
    for (int j = 0; j < p; ++j) s += std::lgamma(alpha - 0.5 * j);
    return s;
}

double log_gamma_p_complex(int p, double alpha) {
    if (p < 1) throw std::invalid_argument("log_gamma_p_complex: p must be >= 1");
    if (!(alpha > p - 1))
        throw DomainError("log_gamma_p_complex: requires alpha > p-1");
    double s = 0.5 * p * (p - 1) * std::log(std::numbers::pi);
    for (int j = 0; j < p; ++j) s += std::lgamma(alpha - j);
    return s;
}

MatrixGammaParams::MatrixGammaParams(double alpha_in, SpdMatrix scale)
    : p(scale.dim()),
      alpha(alpha_in),
      B(std::move(scale)),
      log_det_B(B.log_det()),
      log_gamma(log_gamma_p(p, alpha_in)) {}

ComplexGammaParams::ComplexGammaParams(double alpha_in, HpdMatrix scale)
    : p(scale.dim()),
      alpha(alpha_in),
      B(std::move(scale)),
      log_det_B(B.log_det()),
      log_gamma(log_gamma_p_complex(p, alpha_in)) {}

double log_density(const MatrixGammaParams& params, const SpdMatrix& x) {
    if (x.dim() != params.p) throw std::invalid_argument("log_density: dimension mismatch");
    const double tr_bx = params.B.mat().cwiseProduct(x.mat()).sum();
    return params.log_norm() + (params.alpha - 0.5 * (params.p + 1)) * x.log_det() - tr_bx;
}

double log_density_complex(const ComplexGammaParams& params, const HpdMatrix& x) {
    if (x.dim() != params.p)
        throw std::invalid_argument("log_density_complex: dimension mismatch");
    const double tr_bx =
        params.B.mat().cwiseProduct(x.mat().conjugate()).sum().real();
    return params.log_norm() + (params.alpha - params.p) * x.log_det() - tr_bx;
}

MatrixGammaSampler::MatrixGammaSampler(const MatrixGammaParams& params)
    : MatrixGammaSampler(params.alpha, params.B) {}

MatrixGammaSampler::MatrixGammaSampler(double alpha, const SpdMatrix& scale)
    : p_(scale.dim()), alpha_(alpha) {
    if (!(2.0 * alpha > p_ - 1))
        throw DomainError("MatrixGammaSampler: requires 2*alpha > p-1");
    // A A^T = (2B)^{-1} with B = L L^T  =>  A = L^{-T} / sqrt(2)
    const Matrix& l = scale.chol().lower();
    a_ = l.transpose().triangularView<Eigen::Upper>().solve(
             Matrix::Identity(p_, p_)) /
         std::numbers::sqrt2;
}

void MatrixGammaSampler::draw(Matrix& out, Workspace& ws, RandomStream& rng) const {
    ws.t.setZero(p_, p_);
    for (int i = 0; i < p_; ++i) {
        ws.t(i, i) = std::sqrt(rng.chi_square(2.0 * alpha_ - i));
        for (int j = 0; j < i; ++j) ws.t(i, j) = rng.normal();
    }
    ws.c.noalias() = a_ * ws.t;
    out.noalias() = ws.c * ws.c.transpose();
}

ComplexGammaSampler::ComplexGammaSampler(const ComplexGammaParams& params)
    : ComplexGammaSampler(params.alpha, params.B) {}

ComplexGammaSampler::ComplexGammaSampler(double alpha, const HpdMatrix& scale)
    : p_(scale.dim()), alpha_(alpha) {
    if (!(alpha > p_ - 1))
        throw DomainError("ComplexGammaSampler: requires alpha > p-1");
    // A A^* = B^{-1} with B = L L^*  =>  A = L^{-*}
    const CMatrix& l = scale.chol().lower();
    a_ = l.adjoint().triangularView<Eigen::Upper>().solve(CMatrix::Identity(p_, p_));
}

void ComplexGammaSampler::draw(CMatrix& out, Workspace& ws, RandomStream& rng) const {
    ws.t.setZero(p_, p_);
    for (int i = 0; i < p_; ++i) {
        // |T_ii|^2 ~ chi2(2(alpha-i)) / 2 = gamma(alpha-i, 1)
        ws.t(i, i) = std::sqrt(rng.gamma(alpha_ - i));
        for (int j = 0; j < i; ++j) ws.t(i, j) = rng.complex_normal();
    }
    ws.c.noalias() = a_ * ws.t;
    out.noalias() = ws.c * ws.c.adjoint();
}

SpdMatrix sample(const MatrixGammaParams& params, RandomStream& rng) {
    MatrixGammaSampler sampler(params);
    MatrixGammaSampler::Workspace ws;
    Matrix out;
    sampler.draw(out, ws, rng);
    return SpdMatrix(std::move(out));
}

HpdMatrix sample_complex(const ComplexGammaParams& params, RandomStream& rng) {
    ComplexGammaSampler sampler(params);
    ComplexGammaSampler::Workspace ws;
    CMatrix out;
    sampler.draw(out, ws, rng);
    return HpdMatrix(std::move(out));
}

MatrixBeta2Sampler::MatrixBeta2Sampler(int p, double a, double b)
    : p_(p), a_(a), b_(b), s1_(a, SpdMatrix::identity(p)), s2_(b, SpdMatrix::identity(p)) {}

void MatrixBeta2Sampler::draw(Matrix& out, Workspace& ws, RandomStream& rng) const {
    s1_.draw(ws.w1, ws.g, rng);
    s2_.draw(ws.w2, ws.g, rng);
    if (!try_cholesky(ws.w2, ws.l2))
        throw NotPositiveDefinite("MatrixBeta2Sampler: denominator draw left the cone");
    // X = L2^{-1} W1 L2^{-T}
    Matrix y = ws.l2.triangularView<Eigen::Lower>().solve(ws.w1);
    Matrix z = ws.l2.triangularView<Eigen::Lower>().solve(Matrix(y.transpose()));
    out = 0.5 * (z + z.transpose());
}

double MatrixBeta2Sampler::log_density_const() const {
    return log_gamma_p(p_, a_ + b_) - log_gamma_p(p_, a_) - log_gamma_p(p_, b_);
}

ComplexBeta2Sampler::ComplexBeta2Sampler(int p, double a, double b)
    : p_(p), a_(a), b_(b), s1_(a, HpdMatrix::identity(p)), s2_(b, HpdMatrix::identity(p)) {}

void ComplexBeta2Sampler::draw(CMatrix& out, Workspace& ws, RandomStream& rng) const {
    s1_.draw(ws.w1, ws.g, rng);
    s2_.draw(ws.w2, ws.g, rng);
    if (!try_cholesky(ws.w2, ws.l2))
        throw NotPositiveDefinite("ComplexBeta2Sampler: denominator draw left the cone");
    CMatrix y = ws.l2.triangularView<Eigen::Lower>().solve(ws.w1);
    CMatrix z = ws.l2.triangularView<Eigen::Lower>().solve(CMatrix(y.adjoint()));
    out = 0.5 * (z + z.adjoint());
}

double ComplexBeta2Sampler::log_density_const() const {
    return log_gamma_p_complex(p_, a_ + b_) - log_gamma_p_complex(p_, a_) -
           log_gamma_p_complex(p_, b_);
}

}  // namespace conewhit

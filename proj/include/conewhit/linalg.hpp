#pragma once

// Value types and operations on the cone of symmetric / Hermitian positive
// definite matrices.  All types are immutable after construction and safe to
// share across threads.  Determinants are only ever formed in log space from
// Cholesky diagonals.

#include <Eigen/Dense>
#include <complex>

#include "conewhit/errors.hpp"

namespace conewhit {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;

enum class Definiteness { positive, negative, indefinite_or_singular };

// ---------------------------------------------------------------------------
// Low-level kernels on raw Eigen matrices (hot paths; no wrapper overhead).

// Lower Cholesky with explicit pivot check; returns false if any pivot <= 0
// or non-finite.  `L` is resized and only its lower triangle is meaningful.
bool try_cholesky(const Matrix& a, Matrix& l);
bool try_cholesky(const CMatrix& a, CMatrix& l);

// ln det of a positive definite matrix; throws NotPositiveDefinite.
double logdet_pd(const Matrix& a);
double logdet_pd(const CMatrix& a);
bool try_logdet_pd(const Matrix& a, double& out);
bool try_logdet_pd(const CMatrix& a, double& out);

// ---------------------------------------------------------------------------

class CholeskyFactor {
  public:
    explicit CholeskyFactor(Matrix l) : l_(std::move(l)) {}
    int dim() const { return static_cast<int>(l_.rows()); }
    const Matrix& lower() const { return l_; }
    double log_det() const;             // of L L^T
    Matrix reconstruct() const { return l_ * l_.transpose(); }
    Matrix solve(const Matrix& rhs) const;  // (L L^T)^{-1} rhs
    Matrix inverse() const;

  private:
    Matrix l_;
};

class CholeskyFactorC {
  public:
    explicit CholeskyFactorC(CMatrix l) : l_(std::move(l)) {}
    int dim() const { return static_cast<int>(l_.rows()); }
    const CMatrix& lower() const { return l_; }
    double log_det() const;             // of L L^*, real
    CMatrix reconstruct() const { return l_ * l_.adjoint(); }
    CMatrix solve(const CMatrix& rhs) const;
    CMatrix inverse() const;

  private:
    CMatrix l_;
};

// Real symmetric matrix.  Symmetrized as (m + m^T)/2 on construction;
// relative asymmetry beyond 1e-9 is a construction error.
class SymMatrix {
  public:
    explicit SymMatrix(Matrix m);
    static SymMatrix identity(int p);
    static SymMatrix diag(const Vector& d);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    double trace() const { return m_.trace(); }

    SymMatrix operator-() const { return SymMatrix(Matrix(-m_)); }
    SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(Matrix(m_ + o.m_)); }
    SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(Matrix(m_ - o.m_)); }
    SymMatrix scaled(double s) const { return SymMatrix(Matrix(s * m_)); }

  private:
    Matrix m_;
};

// Symmetric positive definite matrix; construction runs the Cholesky and
// caches the factor.
class SpdMatrix {
  public:
    explicit SpdMatrix(SymMatrix m);
    explicit SpdMatrix(Matrix m) : SpdMatrix(SymMatrix(std::move(m))) {}
    static SpdMatrix identity(int p);

    int dim() const { return sym_.dim(); }
    const SymMatrix& sym() const { return sym_; }
    const Matrix& mat() const { return sym_.mat(); }
    const CholeskyFactor& chol() const { return chol_; }
    double log_det() const { return chol_.log_det(); }
    double trace() const { return sym_.trace(); }

  private:
    SymMatrix sym_;
    CholeskyFactor chol_;
};

// Complex Hermitian matrix, (m + m^*)/2 on construction.
class HermMatrix {
  public:
    explicit HermMatrix(CMatrix m);
    static HermMatrix identity(int p);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& mat() const { return m_; }
    double trace() const { return m_.trace().real(); }

    HermMatrix operator-() const { return HermMatrix(CMatrix(-m_)); }
    HermMatrix operator+(const HermMatrix& o) const { return HermMatrix(CMatrix(m_ + o.m_)); }
    HermMatrix operator-(const HermMatrix& o) const { return HermMatrix(CMatrix(m_ - o.m_)); }

  private:
    CMatrix m_;
};

class HpdMatrix {
  public:
    explicit HpdMatrix(HermMatrix m);
    explicit HpdMatrix(CMatrix m) : HpdMatrix(HermMatrix(std::move(m))) {}
    static HpdMatrix identity(int p);

    int dim() const { return herm_.dim(); }
    const HermMatrix& herm() const { return herm_; }
    const CMatrix& mat() const { return herm_.mat(); }
    const CholeskyFactorC& chol() const { return chol_; }
    double log_det() const { return chol_.log_det(); }
    double trace() const { return herm_.trace(); }

  private:
    HermMatrix herm_;
    CholeskyFactorC chol_;
};

// ---------------------------------------------------------------------------
// Cone operations.

CholeskyFactor cholesky(const SymMatrix& m);    // throws NotPositiveDefinite
CholeskyFactorC cholesky(const HermMatrix& m);
inline CholeskyFactor cholesky(const SpdMatrix& m) { return m.chol(); }
inline CholeskyFactorC cholesky(const HpdMatrix& m) { return m.chol(); }

inline double logdet(const SpdMatrix& m) { return m.log_det(); }
inline double logdet(const HpdMatrix& m) { return m.log_det(); }

// Symmetric square root via eigendecomposition; S*S = m.
SpdMatrix sqrt_spd(const SpdMatrix& m);
HpdMatrix sqrt_hpd(const HpdMatrix& m);

// a^{1/2} x a^{1/2}; preserves the inertia of x.
SymMatrix congruence(const SpdMatrix& a, const SymMatrix& x);
HermMatrix congruence(const HpdMatrix& a, const HermMatrix& x);

Definiteness is_pd(const SymMatrix& m);
Definiteness is_pd(const HermMatrix& m);

// Eigenvalues in increasing order.
Vector sym_eigenvalues(const SymMatrix& m);
Vector herm_eigenvalues(const HermMatrix& m);

// max |eig| / min |eig| of an SPD/HPD matrix (for conditioning warnings).
double eigenvalue_spread(const SpdMatrix& m);
double eigenvalue_spread(const HpdMatrix& m);

}  // namespace conewhit

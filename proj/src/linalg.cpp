#include "conewhit/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace conewhit {

namespace {

constexpr double kAsymmetryTol = 1e-9;

inline double conj_value(double x) { return x; }
inline std::complex<double> conj_value(const std::complex<double>& x) {
    return std::conj(x);
}

template <class Mat>
bool cholesky_loop(const Mat& a, Mat& l) {
    const int p = static_cast<int>(a.rows());
    l.setZero(p, p);
    for (int j = 0; j < p; ++j) {
        double d = std::real(a(j, j));
        for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0) || !std::isfinite(d)) return false;  // pivot <= 0, NaN
        const double root = std::sqrt(d);
        l(j, j) = root;
        for (int i = j + 1; i < p; ++i) {
            auto s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * conj_value(l(j, k));
            l(i, j) = s / root;
        }
    }
    return true;
}

}  // namespace

bool try_cholesky(const Matrix& a, Matrix& l) { return cholesky_loop(a, l); }
bool try_cholesky(const CMatrix& a, CMatrix& l) { return cholesky_loop(a, l); }

double logdet_pd(const Matrix& a) {
    double out;
    if (!try_logdet_pd(a, out)) throw NotPositiveDefinite("logdet: matrix is not positive definite");
    return out;
}

double logdet_pd(const CMatrix& a) {
    double out;
    if (!try_logdet_pd(a, out)) throw NotPositiveDefinite("logdet: matrix is not positive definite");
    return out;
}

namespace {
template <class Mat>
bool logdet_impl(const Mat& a, double& out) {
    thread_local Mat l;
    if (!cholesky_loop(a, l)) return false;
    double s = 0.0;
    for (int i = 0; i < l.rows(); ++i) s += std::log(std::real(l(i, i)));
    out = 2.0 * s;
    return true;
}
}  // namespace

bool try_logdet_pd(const Matrix& a, double& out) { return logdet_impl(a, out); }
bool try_logdet_pd(const CMatrix& a, double& out) { return logdet_impl(a, out); }

double CholeskyFactor::log_det() const {
    double s = 0.0;
    for (int i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
}

Matrix CholeskyFactor::solve(const Matrix& rhs) const {
    Matrix y = l_.triangularView<Eigen::Lower>().solve(rhs);
    return l_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::inverse() const { return solve(Matrix::Identity(dim(), dim())); }

double CholeskyFactorC::log_det() const {
    double s = 0.0;
    for (int i = 0; i < l_.rows(); ++i) s += std::log(std::real(l_(i, i)));
    return 2.0 * s;
}

CMatrix CholeskyFactorC::solve(const CMatrix& rhs) const {
    CMatrix y = l_.triangularView<Eigen::Lower>().solve(rhs);
    return l_.adjoint().triangularView<Eigen::Upper>().solve(y);
}

CMatrix CholeskyFactorC::inverse() const { return solve(CMatrix::Identity(dim(), dim())); }

SymMatrix::SymMatrix(Matrix m) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw std::invalid_argument("SymMatrix: square non-empty matrix required");
    if (!m.allFinite()) throw std::invalid_argument("SymMatrix: non-finite entries");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose().eval()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > kAsymmetryTol * scale)
        throw std::invalid_argument("SymMatrix: input asymmetric beyond tolerance");
    m_ = 0.5 * (m + m.transpose().eval());
}

SymMatrix SymMatrix::identity(int p) { return SymMatrix(Matrix(Matrix::Identity(p, p))); }

SymMatrix SymMatrix::diag(const Vector& d) {
    Matrix m = Matrix::Zero(d.size(), d.size());
    m.diagonal() = d;
    return SymMatrix(std::move(m));
}

SpdMatrix::SpdMatrix(SymMatrix m) : sym_(std::move(m)), chol_(cholesky(sym_)) {}

SpdMatrix SpdMatrix::identity(int p) { return SpdMatrix(SymMatrix::identity(p)); }

HermMatrix::HermMatrix(CMatrix m) {
    if (m.rows() == 0 || m.rows() != m.cols())
        throw std::invalid_argument("HermMatrix: square non-empty matrix required");
    if (!m.allFinite()) throw std::invalid_argument("HermMatrix: non-finite entries");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > kAsymmetryTol * scale)
        throw std::invalid_argument("HermMatrix: input not Hermitian within tolerance");
    m_ = 0.5 * (m + m.adjoint().eval());  // forces real diagonal
}

HermMatrix HermMatrix::identity(int p) { return HermMatrix(CMatrix(CMatrix::Identity(p, p))); }

HpdMatrix::HpdMatrix(HermMatrix m) : herm_(std::move(m)), chol_(cholesky(herm_)) {}

HpdMatrix HpdMatrix::identity(int p) { return HpdMatrix(HermMatrix::identity(p)); }

CholeskyFactor cholesky(const SymMatrix& m) {
    Matrix l;
    if (!try_cholesky(m.mat(), l))
        throw NotPositiveDefinite("cholesky: pivot <= 0, input left the cone");
    return CholeskyFactor(std::move(l));
}

CholeskyFactorC cholesky(const HermMatrix& m) {
    CMatrix l;
    if (!try_cholesky(m.mat(), l))
        throw NotPositiveDefinite("cholesky: pivot <= 0, input left the cone");
    return CholeskyFactorC(std::move(l));
}

SpdMatrix sqrt_spd(const SpdMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
    Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    return SpdMatrix(std::move(s));
}

HpdMatrix sqrt_hpd(const HpdMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.mat());
    Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    CMatrix s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
    return HpdMatrix(std::move(s));
}

SymMatrix congruence(const SpdMatrix& a, const SymMatrix& x) {
    if (a.dim() != x.dim()) throw std::invalid_argument("congruence: dimension mismatch");
    const Matrix r = sqrt_spd(a).mat();
    return SymMatrix(Matrix(r * x.mat() * r));
}

HermMatrix congruence(const HpdMatrix& a, const HermMatrix& x) {
    if (a.dim() != x.dim()) throw std::invalid_argument("congruence: dimension mismatch");
    const CMatrix r = sqrt_hpd(a).mat();
    return HermMatrix(CMatrix(r * x.mat() * r));
}

Definiteness is_pd(const SymMatrix& m) {
    Matrix l;
    if (try_cholesky(m.mat(), l)) return Definiteness::positive;
    if (try_cholesky(Matrix(-m.mat()), l)) return Definiteness::negative;
    return Definiteness::indefinite_or_singular;
}

Definiteness is_pd(const HermMatrix& m) {
    CMatrix l;
    if (try_cholesky(m.mat(), l)) return Definiteness::positive;
    if (try_cholesky(CMatrix(-m.mat()), l)) return Definiteness::negative;
    return Definiteness::indefinite_or_singular;
}

Vector sym_eigenvalues(const SymMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Vector herm_eigenvalues(const HermMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.mat(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double eigenvalue_spread(const SpdMatrix& m) {
    Vector e = sym_eigenvalues(m.sym());
    return e(e.size() - 1) / e(0);
}

double eigenvalue_spread(const HpdMatrix& m) {
    Vector e = herm_eigenvalues(m.herm());
    return e(e.size() - 1) / e(0);
}

}  // namespace conewhit

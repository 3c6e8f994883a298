#include "conewhit/residual.hpp"

#include <cmath>

#include "conewhit/mc.hpp"
#include "conewhit/quadrature.hpp"
#include "conewhit/special.hpp"

namespace conewhit {

namespace {

double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalar case.

ScalarResidualParams::ScalarResidualParams(double a1, double a2, double b1, double b2)
    : alpha1(a1), alpha2(a2), beta1(b1), beta2(b2) {
    if (!(a1 > 0.0 && a2 > 0.0 && b1 > 0.0 && b2 > 0.0))
        throw DomainError("ScalarResidualParams: all parameters must be positive");
    beta0 = 1.0 / b1 + 1.0 / b2;
    const double shared = 0.5 * (a1 - a2) * std::log(b1) +
                          0.5 * (a2 - a1) * std::log(b2) +
                          0.5 * (a1 + a2) * std::log(b1 + b2);
    log_c1 = -(std::lgamma(a1) + shared);
    log_c2 = -(std::lgamma(a2) + shared);
}

double scalar_residual_density(const ScalarResidualParams& params, double y,
                               const EvalSettings& settings) {
    const double a1 = params.alpha1, a2 = params.alpha2;
    if (y == 0.0) {
        if (a1 + a2 < 2.0)
            throw DomainError(
                "scalar_residual_density: integrable singularity at y = 0");
        // limit from the convolution form
        const double lf = std::lgamma(a1 + a2 - 1.0) -
                          (a1 + a2 - 1.0) * std::log(params.beta0) -
                          a1 * std::log(params.beta1) - a2 * std::log(params.beta2) -
                          std::lgamma(a1) - std::lgamma(a2);
        return std::exp(lf);
    }
    const double mu = 0.5 * (1.0 - a1 - a2);
    double log_f;
    if (y > 0.0) {
        const EvalResult w =
            scalar_whittaker_w(0.5 * (a1 - a2), mu, params.beta0 * y, settings);
        log_f = params.log_c1 + (0.5 * (a1 + a2) - 1.0) * std::log(y) -
                0.5 * y * (1.0 / params.beta1 - 1.0 / params.beta2) + w.log_abs;
    } else {
        const double v = -y;
        const EvalResult w =
            scalar_whittaker_w(0.5 * (a2 - a1), mu, params.beta0 * v, settings);
        log_f = params.log_c2 + (0.5 * (a1 + a2) - 1.0) * std::log(v) -
                0.5 * v * (1.0 / params.beta2 - 1.0 / params.beta1) + w.log_abs;
    }
    return std::exp(log_f);
}

// ---------------------------------------------------------------------------
// Matrix case.

MatrixResidualParams::MatrixResidualParams(double a1, double a2, SpdMatrix b1,
                                           SpdMatrix b2)
    : p(b1.dim()),
      alpha1(a1),
      alpha2(a2),
      B1(std::move(b1)),
      B2(std::move(b2)),
      S(Matrix(B1.mat() + B2.mat())),
      sqrt_S(sqrt_spd(S)),
      log_delta(0.0),
      lg1(log_gamma_p(p, a1)),
      lg2(log_gamma_p(p, a2)) {
    if (B2.dim() != p) throw std::invalid_argument("MatrixResidualParams: dim mismatch");
    if (!(a1 > 0.5 * (p - 1) && a2 > 0.5 * (p - 1)))
        throw DomainError("MatrixResidualParams: shapes must exceed (p-1)/2");
    log_delta = a1 * B1.log_det() + a2 * B2.log_det() - lg1 - lg2;
}

double OrientedDensityParts::log_c() const { return logaddexp(c1.log_abs, c2.log_abs); }

double OrientedDensityParts::c_err() const {
    return std::sqrt(c1.abs_err * c1.abs_err + c2.abs_err * c2.abs_err);
}

namespace {

// log of the branch kernel h~ at strictly PD argument (positive branch when
// swap = false; the negative branch is the same kernel with parameters
// swapped, evaluated at -Y).
double log_branch_kernel(const MatrixResidualParams& params, const Matrix& y,
                         bool swap, const EvalSettings& settings) {
    const double a_first = swap ? params.alpha2 : params.alpha1;
    const double a_second = swap ? params.alpha1 : params.alpha2;
    const double lg_branch = swap ? params.lg1 : params.lg2;  // Gamma_p(second shape)
    const Matrix& b_first = swap ? params.B2.mat() : params.B1.mat();
    const Matrix& b_second = swap ? params.B1.mat() : params.B2.mat();
    const int p = params.p;

    const Matrix& r = params.sqrt_S.mat();
    Matrix t = r * y * r;
    SpdMatrix targ(0.5 * (t + t.transpose()));

    const WhittakerIndices idx{0.5 * (a_first - a_second),
                               0.5 * (a_first + a_second) - 0.25 * (p + 1), p};
    const EvalResult w = whittaker_w(idx, targ, settings);

    const double half_tr = 0.5 * (b_second - b_first).cwiseProduct(y).sum();
    const double log_det_y = logdet_pd(y);
    return lg_branch + half_tr +
           (0.5 * (a_first + a_second) - 0.5 * (p + 1)) * log_det_y + w.log_abs;
}

}  // namespace

double matrix_residual_log_density(const MatrixResidualParams& params,
                                   const SymMatrix& Y,
                                   const OrientedDensityParts& parts) {
    if (Y.dim() != params.p)
        throw std::invalid_argument("matrix_residual_log_density: dim mismatch");
    const Definiteness d = is_pd(Y);
    if (d == Definiteness::indefinite_or_singular)
        throw OrientationError(
            "matrix_residual_log_density: Y must be strictly definite");
    const bool negative = d == Definiteness::negative;
    const Matrix arg = negative ? Matrix(-Y.mat()) : Y.mat();
    const double log_h = log_branch_kernel(params, arg, negative, parts.settings);
    return log_h - parts.log_c();
}

namespace {

// c1 = |S|^{(a1+a2)/2} Gamma_p(a1+a2) / r *
//      E_{X ~ Beta2(a_inner, gamma)} [ exp((a1+a2)(ln|I+X| - ln|B_keep + S^{1/2} X S^{1/2}|)) ]
// with a_inner = a2 for the positive branch (a1 for the mirrored one),
// B_keep the branch's own rate, gamma = (p+1)/2, and r the Beta2 density
// constant.  Obtained by integrating the Whittaker factor's cone variable
// jointly with Y; the proposal matches both endpoint behaviours, so the
// weights are bounded.
EvalResult normalizer_mc(const MatrixResidualParams& params, bool swap,
                         const EvalSettings& settings) {
    const int p = params.p;
    const double a_inner = swap ? params.alpha1 : params.alpha2;
    const Matrix& b_keep = swap ? params.B2.mat() : params.B1.mat();
    const double s_ab = params.alpha1 + params.alpha2;
    const double gamma = 0.5 * (p + 1);

    const MatrixBeta2Sampler sampler(p, a_inner, gamma);
    const Matrix& r = params.sqrt_S.mat();

    auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
        MatrixBeta2Sampler::Workspace ws;
        Matrix x, ipx, m;
        for (long long i = 0; i < count; ++i) {
            sampler.draw(x, ws, rng);
            ipx = x;
            ipx.diagonal().array() += 1.0;
            m.noalias() = r * x * r;
            m += b_keep;
            acc.add(s_ab * (logdet_pd(ipx) - logdet_pd(m)));
        }
    };
    const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
        settings.samples, settings.stream, settings.workers, body);

    const double log_pref = 0.5 * s_ab * params.S.log_det() + log_gamma_p(p, s_ab) -
                            sampler.log_density_const();
    EvalResult out;
    out.log_abs = log_pref + acc.log_mean();
    out.sign = 1;
    out.abs_err = std::exp(log_pref + acc.log_se());
    out.method = EvalMethod::mc_importance;
    out.effort = settings.samples;
    out.statistical = true;
    return out;
}

// p = 1 deterministic normalizer:
//   c1 = Gamma(a2) S^{mu'+1/2} \int y^{ahat} e^{-B1 y} U(aU, bU, S y) dy.
// U(a,b,z) carries a z^{1-b} branch at the origin, so the Laguerre weight
// absorbs the lower of the integrand's two endpoint exponents.
EvalResult normalizer_quadrature(const MatrixResidualParams& params, bool swap,
                                 const EvalSettings& settings) {
    const double a_first = swap ? params.alpha2 : params.alpha1;
    const double a_inner = swap ? params.alpha1 : params.alpha2;
    const double lg_branch = swap ? params.lg1 : params.lg2;
    const double b_keep = (swap ? params.B2.mat() : params.B1.mat())(0, 0);
    const double s = params.S.mat()(0, 0);

    const double bw = 0.5 * (a_first + a_inner) - 0.5;
    const double mup = std::abs(bw);
    const double a_u = mup - 0.5 * (a_first - a_inner) + 0.5;
    const double b_u = 1.0 + 2.0 * mup;
    const double ahat = 0.5 * (a_first + a_inner) - 1.0 + mup + 0.5;
    const double weight_pow = std::min(ahat, ahat + 1.0 - b_u);
    const double extra_pow = ahat - weight_pow;

    EvalSettings inner = settings;
    EvalResult res = glq_log_integrate(
        weight_pow, b_keep,
        [&](double y) {
            const EvalResult u = tricomi_u(a_u, b_u, s * y, inner);
            return SignedLogValue{
                (mup + 0.5) * std::log(s) + extra_pow * std::log(y) + u.log_abs, 1};
        },
        settings);
    res.log_abs += lg_branch;
    res.abs_err = res.abs_err > 0.0 ? std::exp(std::log(res.abs_err) + lg_branch) : 0.0;
    return res;
}

}  // namespace

OrientedDensityParts compute_normalizers(const MatrixResidualParams& params,
                                         const EvalSettings& settings) {
    OrientedDensityParts parts;
    parts.settings = settings;
    const bool quad = params.p == 1 && settings.force != EvalSettings::Force::mc;
    if (quad) {
        parts.c1 = normalizer_quadrature(params, false, settings);
        parts.c2 = normalizer_quadrature(params, true, settings);
    } else {
        parts.c1 = normalizer_mc(params, false, settings.with_stream(settings.stream.substream(0)));
        parts.c2 = normalizer_mc(params, true, settings.with_stream(settings.stream.substream(1)));
    }
    // density evaluations reuse a dedicated child stream
    parts.settings = settings.with_stream(settings.stream.substream(2));
    return parts;
}

namespace {

struct ResidualSampler {
    explicit ResidualSampler(const MatrixResidualParams& params)
        : s1(params.alpha1, params.B1), s2(params.alpha2, params.B2) {}
    MatrixGammaSampler s1, s2;
    void draw(Matrix& out, MatrixGammaSampler::Workspace& ws, Matrix& tmp,
              RandomStream& rng) const {
        s1.draw(out, ws, rng);
        s2.draw(tmp, ws, rng);
        out -= tmp;
    }
};

struct CountAccumulator {
    long long pos = 0, neg = 0, other = 0;
    void merge(const CountAccumulator& o) {
        pos += o.pos;
        neg += o.neg;
        other += o.other;
    }
};

Definiteness classify(const Matrix& y, Matrix& scratch) {
    if (try_cholesky(y, scratch)) return Definiteness::positive;
    if (try_cholesky(Matrix(-y), scratch)) return Definiteness::negative;
    return Definiteness::indefinite_or_singular;
}

}  // namespace

SymMatrix residual_sample(const MatrixResidualParams& params, RandomStream& rng) {
    const ResidualSampler sampler(params);
    MatrixGammaSampler::Workspace ws;
    Matrix out, tmp;
    sampler.draw(out, ws, tmp, rng);
    return SymMatrix(std::move(out));
}

OrientationEstimate orientation_probability(const MatrixResidualParams& params,
                                            long long n, const RandomStream& rng,
                                            int workers) {
    if (n < 100) throw std::invalid_argument("orientation_probability: n must be >= 100");
    const ResidualSampler sampler(params);
    auto body = [&](RandomStream& stream, long long count, CountAccumulator& acc) {
        MatrixGammaSampler::Workspace ws;
        Matrix y, tmp, scratch;
        for (long long i = 0; i < count; ++i) {
            sampler.draw(y, ws, tmp, stream);
            switch (classify(y, scratch)) {
                case Definiteness::positive: ++acc.pos; break;
                case Definiteness::negative: ++acc.neg; break;
                default: ++acc.other; break;
            }
        }
    };
    const CountAccumulator acc = mc_blocked<CountAccumulator>(n, rng, workers, body);
    OrientationEstimate est;
    est.n = n;
    const double nn = static_cast<double>(n);
    est.p_pos = static_cast<double>(acc.pos) / nn;
    est.p_neg = static_cast<double>(acc.neg) / nn;
    est.p_other = 1.0 - est.p_pos - est.p_neg;  // sums to one exactly
    auto se = [nn](double p) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / nn); };
    est.se_pos = se(est.p_pos);
    est.se_neg = se(est.p_neg);
    est.se_other = se(est.p_other);
    return est;
}

namespace {

struct FilteredAccumulator {
    MeanAccumulator vals;
    long long total = 0;
    void merge(const FilteredAccumulator& o) {
        vals.merge(o.vals);
        total += o.total;
    }
};

double apply_functional(Functional f, const Matrix& y, Matrix& scratch, bool negate) {
    switch (f) {
        case Functional::unit: return 1.0;
        case Functional::trace: return y.trace();
        case Functional::logdet: {
            scratch = negate ? Matrix(-y) : y;
            return logdet_pd(scratch);
        }
    }
    return 0.0;
}

}  // namespace

MomentCheckReport conditional_moment_check(const MatrixResidualParams& params,
                                           Functional f, Orientation orientation,
                                           long long n, const RandomStream& rng,
                                           const EvalSettings& settings) {
    const bool want_neg = orientation == Orientation::negative;
    const int p = params.p;
    const double s_ab = params.alpha1 + params.alpha2;

    // (i) filtered empirical estimate
    const ResidualSampler sampler(params);
    auto body = [&](RandomStream& stream, long long count, FilteredAccumulator& acc) {
        MatrixGammaSampler::Workspace ws;
        Matrix y, tmp, scratch;
        for (long long i = 0; i < count; ++i) {
            sampler.draw(y, ws, tmp, stream);
            acc.total += 1;
            const Definiteness d = classify(y, scratch);
            if (d == Definiteness::positive && !want_neg)
                acc.vals.add(apply_functional(f, y, scratch, false));
            else if (d == Definiteness::negative && want_neg)
                acc.vals.add(apply_functional(f, y, scratch, true));
        }
    };
    const FilteredAccumulator filtered =
        mc_blocked<FilteredAccumulator>(n, rng.substream(0), settings.workers, body);
    if (filtered.vals.n < 100)
        throw InsufficientSamples(
            "conditional_moment_check: fewer than 100 draws in the orientation class");

    // (ii) density-weighted cone integral E[f | class] = (f h~) / c_branch,
    // by the same type-2-beta scheme as compute_normalizers, with the inner
    // MG(s_ab, M) moments of the functional in closed form.
    const bool swap = want_neg;
    const double a_inner = swap ? params.alpha1 : params.alpha2;
    const Matrix& b_keep = swap ? params.B2.mat() : params.B1.mat();
    const double gamma = 0.5 * (p + 1);
    const MatrixBeta2Sampler b2(p, a_inner, gamma);
    const Matrix& r = params.sqrt_S.mat();

    double psi_sum = 0.0;
    for (int j = 0; j < p; ++j) psi_sum += digamma(s_ab - 0.5 * j);
    const double trace_sign = want_neg ? -1.0 : 1.0;

    auto body2 = [&](RandomStream& stream, long long count, PairAccumulator& acc) {
        MatrixBeta2Sampler::Workspace ws;
        Matrix x, ipx, m, l;
        for (long long i = 0; i < count; ++i) {
            b2.draw(x, ws, stream);
            ipx = x;
            ipx.diagonal().array() += 1.0;
            m.noalias() = r * x * r;
            m += b_keep;
            if (!try_cholesky(m, l))
                throw NotPositiveDefinite("conditional_moment_check: shifted matrix");
            double log_det_m = 0.0;
            for (int d = 0; d < p; ++d) log_det_m += std::log(l(d, d));
            log_det_m *= 2.0;
            const double lw = s_ab * (logdet_pd(ipx) - log_det_m);
            const double w = std::exp(lw);
            double phi = 1.0;
            if (f == Functional::trace) {
                // E[tr Y] under MG(s_ab, M) = s_ab tr(M^{-1})
                const Matrix minv = CholeskyFactor(l).inverse();
                phi = trace_sign * s_ab * minv.trace();
            } else if (f == Functional::logdet) {
                phi = psi_sum - log_det_m;
            }
            acc.add(w * phi, w);
        }
    };
    const PairAccumulator weighted = mc_blocked<PairAccumulator>(
        settings.samples, rng.substream(1), settings.workers, body2);

    MomentCheckReport report;
    report.n = filtered.total;
    report.n_class = filtered.vals.n;
    report.empirical = filtered.vals.mean();
    report.empirical_se = filtered.vals.se();
    report.weighted = weighted.ratio();
    report.weighted_se = weighted.ratio_se();
    const double denom = std::sqrt(report.empirical_se * report.empirical_se +
                                   report.weighted_se * report.weighted_se);
    const double diff = report.empirical - report.weighted;
    report.z = denom > 0.0 ? diff / denom : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    return report;
}

// ---------------------------------------------------------------------------
// Complex case.

ComplexResidualParams::ComplexResidualParams(double a1, double a2, HpdMatrix b1,
                                             HpdMatrix b2)
    : p(b1.dim()),
      alpha1(a1),
      alpha2(a2),
      B1(std::move(b1)),
      B2(std::move(b2)),
      S(CMatrix(B1.mat() + B2.mat())),
      sqrt_S(sqrt_hpd(S)),
      lg1(log_gamma_p_complex(p, a1)),
      lg2(log_gamma_p_complex(p, a2)) {
    if (B2.dim() != p) throw std::invalid_argument("ComplexResidualParams: dim mismatch");
    if (!(a1 > p - 1 && a2 > p - 1))
        throw DomainError("ComplexResidualParams: shapes must exceed p-1");
}

namespace {

double log_branch_kernel_complex(const ComplexResidualParams& params, const CMatrix& y,
                                 bool swap, const EvalSettings& settings) {
    const double a_first = swap ? params.alpha2 : params.alpha1;
    const double a_second = swap ? params.alpha1 : params.alpha2;
    const double lg_branch = swap ? params.lg1 : params.lg2;
    const CMatrix& b_first = swap ? params.B2.mat() : params.B1.mat();
    const CMatrix& b_second = swap ? params.B1.mat() : params.B2.mat();
    const int p = params.p;

    const CMatrix& r = params.sqrt_S.mat();
    CMatrix t = r * y * r;
    HpdMatrix targ(CMatrix(0.5 * (t + t.adjoint())));

    const WhittakerIndices idx{0.5 * (a_first - a_second),
                               0.5 * (a_first + a_second - p), p};
    const EvalResult w = whittaker_w_complex(idx, targ, settings);

    const double half_tr =
        0.5 * (b_second - b_first).cwiseProduct(y.conjugate()).sum().real();
    const double log_det_y = logdet_pd(y);
    return lg_branch + half_tr + (0.5 * (a_first + a_second) - p) * log_det_y +
           w.log_abs;
}

EvalResult normalizer_mc_complex(const ComplexResidualParams& params, bool swap,
                                 const EvalSettings& settings) {
    const int p = params.p;
    const double a_inner = swap ? params.alpha1 : params.alpha2;
    const CMatrix& b_keep = swap ? params.B2.mat() : params.B1.mat();
    const double s_ab = params.alpha1 + params.alpha2;
    const double gamma = p;

    const ComplexBeta2Sampler sampler(p, a_inner, gamma);
    const CMatrix& r = params.sqrt_S.mat();

    auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
        ComplexBeta2Sampler::Workspace ws;
        CMatrix x, ipx, m;
        for (long long i = 0; i < count; ++i) {
            sampler.draw(x, ws, rng);
            ipx = x;
            ipx.diagonal().array() += 1.0;
            m.noalias() = r * x * r;
            m += b_keep;
            acc.add(s_ab * (logdet_pd(ipx) - logdet_pd(m)));
        }
    };
    const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
        settings.samples, settings.stream, settings.workers, body);

    const double log_pref = 0.5 * s_ab * params.S.log_det() +
                            log_gamma_p_complex(p, s_ab) - sampler.log_density_const();
    EvalResult out;
    out.log_abs = log_pref + acc.log_mean();
    out.sign = 1;
    out.abs_err = std::exp(log_pref + acc.log_se());
    out.method = EvalMethod::mc_importance;
    out.effort = settings.samples;
    out.statistical = true;
    return out;
}

// p = 1 complex reduces to the scalar integral (1x1 HPD = positive real).
EvalResult normalizer_quadrature_complex(const ComplexResidualParams& params, bool swap,
                                         const EvalSettings& settings) {
    const double a_first = swap ? params.alpha2 : params.alpha1;
    const double a_inner = swap ? params.alpha1 : params.alpha2;
    const double lg_branch = swap ? params.lg1 : params.lg2;
    const double b_keep = (swap ? params.B2.mat() : params.B1.mat())(0, 0).real();
    const double s = params.S.mat()(0, 0).real();

    const double bw = 0.5 * (a_first + a_inner) - 0.5;
    const double mup = std::abs(bw);
    const double a_u = mup - 0.5 * (a_first - a_inner) + 0.5;
    const double b_u = 1.0 + 2.0 * mup;
    const double ahat = 0.5 * (a_first + a_inner) - 1.0 + mup + 0.5;
    const double weight_pow = std::min(ahat, ahat + 1.0 - b_u);
    const double extra_pow = ahat - weight_pow;

    EvalResult res = glq_log_integrate(
        weight_pow, b_keep,
        [&](double y) {
            const EvalResult u = tricomi_u(a_u, b_u, s * y, settings);
            return SignedLogValue{
                (mup + 0.5) * std::log(s) + extra_pow * std::log(y) + u.log_abs, 1};
        },
        settings);
    res.log_abs += lg_branch;
    res.abs_err = res.abs_err > 0.0 ? std::exp(std::log(res.abs_err) + lg_branch) : 0.0;
    return res;
}

struct ComplexResidualSampler {
    explicit ComplexResidualSampler(const ComplexResidualParams& params)
        : s1(params.alpha1, params.B1), s2(params.alpha2, params.B2) {}
    ComplexGammaSampler s1, s2;
    void draw(CMatrix& out, ComplexGammaSampler::Workspace& ws, CMatrix& tmp,
              RandomStream& rng) const {
        s1.draw(out, ws, rng);
        s2.draw(tmp, ws, rng);
        out -= tmp;
    }
};

Definiteness classify_c(const CMatrix& y, CMatrix& scratch) {
    if (try_cholesky(y, scratch)) return Definiteness::positive;
    if (try_cholesky(CMatrix(-y), scratch)) return Definiteness::negative;
    return Definiteness::indefinite_or_singular;
}

}  // namespace

OrientedDensityParts compute_normalizers_complex(const ComplexResidualParams& params,
                                                 const EvalSettings& settings) {
    OrientedDensityParts parts;
    const bool quad = params.p == 1 && settings.force != EvalSettings::Force::mc;
    if (quad) {
        parts.c1 = normalizer_quadrature_complex(params, false, settings);
        parts.c2 = normalizer_quadrature_complex(params, true, settings);
    } else {
        parts.c1 = normalizer_mc_complex(params, false,
                                         settings.with_stream(settings.stream.substream(0)));
        parts.c2 = normalizer_mc_complex(params, true,
                                         settings.with_stream(settings.stream.substream(1)));
    }
    parts.settings = settings.with_stream(settings.stream.substream(2));
    return parts;
}

double complex_residual_log_density(const ComplexResidualParams& params,
                                    const HermMatrix& Y,
                                    const OrientedDensityParts& parts) {
    if (Y.dim() != params.p)
        throw std::invalid_argument("complex_residual_log_density: dim mismatch");
    const Definiteness d = is_pd(Y);
    if (d == Definiteness::indefinite_or_singular)
        throw OrientationError(
            "complex_residual_log_density: Y must be strictly definite");
    const bool negative = d == Definiteness::negative;
    const CMatrix arg = negative ? CMatrix(-Y.mat()) : Y.mat();
    const double log_h = log_branch_kernel_complex(params, arg, negative, parts.settings);
    return log_h - parts.log_c();
}

HermMatrix residual_sample_complex(const ComplexResidualParams& params,
                                   RandomStream& rng) {
    const ComplexResidualSampler sampler(params);
    ComplexGammaSampler::Workspace ws;
    CMatrix out, tmp;
    sampler.draw(out, ws, tmp, rng);
    return HermMatrix(std::move(out));
}

OrientationEstimate orientation_probability_complex(const ComplexResidualParams& params,
                                                    long long n, const RandomStream& rng,
                                                    int workers) {
    if (n < 100)
        throw std::invalid_argument("orientation_probability_complex: n must be >= 100");
    const ComplexResidualSampler sampler(params);
    auto body = [&](RandomStream& stream, long long count, CountAccumulator& acc) {
        ComplexGammaSampler::Workspace ws;
        CMatrix y, tmp, scratch;
        for (long long i = 0; i < count; ++i) {
            sampler.draw(y, ws, tmp, stream);
            switch (classify_c(y, scratch)) {
                case Definiteness::positive: ++acc.pos; break;
                case Definiteness::negative: ++acc.neg; break;
                default: ++acc.other; break;
            }
        }
    };
    const CountAccumulator acc = mc_blocked<CountAccumulator>(n, rng, workers, body);
    OrientationEstimate est;
    est.n = n;
    const double nn = static_cast<double>(n);
    est.p_pos = static_cast<double>(acc.pos) / nn;
    est.p_neg = static_cast<double>(acc.neg) / nn;
    est.p_other = 1.0 - est.p_pos - est.p_neg;
    auto se = [nn](double p) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / nn); };
    est.se_pos = se(est.p_pos);
    est.se_neg = se(est.p_neg);
    est.se_other = se(est.p_other);
    return est;
}

MomentCheckReport conditional_moment_check_complex(const ComplexResidualParams& params,
                                                   Functional f, Orientation orientation,
                                                   long long n, const RandomStream& rng,
                                                   const EvalSettings& settings) {
    const bool want_neg = orientation == Orientation::negative;
    const int p = params.p;
    const double s_ab = params.alpha1 + params.alpha2;

    const ComplexResidualSampler sampler(params);
    auto body = [&](RandomStream& stream, long long count, FilteredAccumulator& acc) {
        ComplexGammaSampler::Workspace ws;
        CMatrix y, tmp, scratch;
        for (long long i = 0; i < count; ++i) {
            sampler.draw(y, ws, tmp, stream);
            acc.total += 1;
            const Definiteness d = classify_c(y, scratch);
            const bool match = (d == Definiteness::positive && !want_neg) ||
                               (d == Definiteness::negative && want_neg);
            if (!match) continue;
            double v = 1.0;
            if (f == Functional::trace) {
                v = y.trace().real();
            } else if (f == Functional::logdet) {
                scratch = want_neg ? CMatrix(-y) : y;
                v = logdet_pd(scratch);
            }
            acc.vals.add(v);
        }
    };
    const FilteredAccumulator filtered =
        mc_blocked<FilteredAccumulator>(n, rng.substream(0), settings.workers, body);
    if (filtered.vals.n < 100)
        throw InsufficientSamples(
            "conditional_moment_check_complex: fewer than 100 draws in class");

    const bool swap = want_neg;
    const double a_inner = swap ? params.alpha1 : params.alpha2;
    const CMatrix& b_keep = swap ? params.B2.mat() : params.B1.mat();
    const double gamma = p;
    const ComplexBeta2Sampler b2(p, a_inner, gamma);
    const CMatrix& r = params.sqrt_S.mat();

    double psi_sum = 0.0;
    for (int j = 0; j < p; ++j) psi_sum += digamma(s_ab - j);
    const double trace_sign = want_neg ? -1.0 : 1.0;

    auto body2 = [&](RandomStream& stream, long long count, PairAccumulator& acc) {
        ComplexBeta2Sampler::Workspace ws;
        CMatrix x, ipx, m, l;
        for (long long i = 0; i < count; ++i) {
            b2.draw(x, ws, stream);
            ipx = x;
            ipx.diagonal().array() += 1.0;
            m.noalias() = r * x * r;
            m += b_keep;
            if (!try_cholesky(m, l))
                throw NotPositiveDefinite("conditional_moment_check_complex: shifted matrix");
            double log_det_m = 0.0;
            for (int d = 0; d < p; ++d) log_det_m += std::log(l(d, d).real());
            log_det_m *= 2.0;
            const double lw = s_ab * (logdet_pd(ipx) - log_det_m);
            const double w = std::exp(lw);
            double phi = 1.0;
            if (f == Functional::trace) {
                const CMatrix minv = CholeskyFactorC(l).inverse();
                phi = trace_sign * s_ab * minv.trace().real();
            } else if (f == Functional::logdet) {
                phi = psi_sum - log_det_m;
            }
            acc.add(w * phi, w);
        }
    };
    const PairAccumulator weighted = mc_blocked<PairAccumulator>(
        settings.samples, rng.substream(1), settings.workers, body2);

    MomentCheckReport report;
    report.n = filtered.total;
    report.n_class = filtered.vals.n;
    report.empirical = filtered.vals.mean();
    report.empirical_se = filtered.vals.se();
    report.weighted = weighted.ratio();
    report.weighted_se = weighted.ratio_se();
    const double denom = std::sqrt(report.empirical_se * report.empirical_se +
                                   report.weighted_se * report.weighted_se);
    const double diff = report.empirical - report.weighted;
    report.z = denom > 0.0 ? diff / denom : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    return report;
}

}  // namespace conewhit

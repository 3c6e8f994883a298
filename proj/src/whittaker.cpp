#include "conewhit/whittaker.hpp"

#include <cmath>

#include "conewhit/quadrature.hpp"

namespace conewhit {

namespace {

constexpr double kSpreadWarnThreshold = 1e8;

std::string conditioning_warning(double spread) {
    return "argument eigenvalue spread " + std::to_string(spread) +
           " exceeds 1e8; results may lose accuracy";
}

// prefactor * mean(exp(lw)) with lw accumulated in log space
EvalResult assemble_mc(double log_prefactor, const LogMeanAccumulator& acc,
                       long long effort) {
    EvalResult r;
    r.log_abs = log_prefactor + acc.log_mean();
    r.sign = 1;
    const double lse = acc.log_se();
    r.abs_err = std::exp(log_prefactor + lse);
    r.method = EvalMethod::mc_importance;
    r.effort = effort;
    r.statistical = true;
    return r;
}

}  // namespace

MFunctionParams::MFunctionParams(double alpha_in, double beta_in, int p_in)
    : alpha(alpha_in), beta(beta_in), p(p_in) {
    if (p < 1) throw std::invalid_argument("MFunctionParams: p must be >= 1");
    if (!(alpha > 0.5 * (p - 1)))
        throw DomainError("MFunctionParams: requires alpha > (p-1)/2");
}

EvalResult m_function(const MFunctionParams& params, const SpdMatrix& A,
                      const EvalSettings& settings) {
    if (A.dim() != params.p) throw std::invalid_argument("m_function: dimension mismatch");
    const double spread = eigenvalue_spread(A);

    const bool use_quadrature =
        settings.force == EvalSettings::Force::quadrature ||
        (params.p == 1 && settings.force != EvalSettings::Force::mc);
    if (use_quadrature && params.p != 1)
        throw DomainError("m_function: quadrature engine only available at p = 1");

    EvalResult result;
    if (use_quadrature) {
        const double a = A.mat()(0, 0);
        const double c = params.beta - 1.0;
        result = glq_log_integrate(
            params.alpha - 1.0, a,
            [c](double x) { return SignedLogValue{c * std::log1p(x), 1}; }, settings);
    } else {
        const double zeta = settings.importance_scale;
        const SpdMatrix scale(Matrix(zeta * A.mat()));
        const MatrixGammaSampler sampler(params.alpha, scale);
        const double cw = params.beta - 0.5 * (params.p + 1);
        const double one_minus_zeta = 1.0 - zeta;
        const Matrix& amat = A.mat();
        const int p = params.p;

        auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
            MatrixGammaSampler::Workspace ws;
            Matrix x, ipx;
            for (long long i = 0; i < count; ++i) {
                sampler.draw(x, ws, rng);
                ipx = x;
                ipx.diagonal().array() += 1.0;
                double lw = cw * logdet_pd(ipx);
                if (one_minus_zeta != 0.0)
                    lw -= one_minus_zeta * amat.cwiseProduct(x).sum();
                acc.add(lw);
            }
        };
        const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
            settings.samples, settings.stream, settings.workers, body);
        const double pref = log_gamma_p(p, params.alpha) -
                            params.alpha * (A.log_det() + p * std::log(zeta));
        result = assemble_mc(pref, acc, settings.samples);
    }
    if (spread > kSpreadWarnThreshold) result.warning = conditioning_warning(spread);
    return result;
}

EvalResult m_function_complex(double mu, double nu, const HpdMatrix& A,
                              const EvalSettings& settings) {
    const int p = A.dim();
    if (!(mu > p - 1)) throw DomainError("m_function_complex: requires mu > p-1");
    const double spread = eigenvalue_spread(A);

    EvalResult result;
    const bool use_quadrature =
        settings.force == EvalSettings::Force::quadrature ||
        (p == 1 && settings.force != EvalSettings::Force::mc);
    if (use_quadrature && p != 1)
        throw DomainError("m_function_complex: quadrature engine only available at p = 1");
    if (use_quadrature) {
        const double a = A.mat()(0, 0).real();
        const double c = nu - 1.0;
        result = glq_log_integrate(
            mu - 1.0, a, [c](double x) { return SignedLogValue{c * std::log1p(x), 1}; },
            settings);
    } else {
        const double zeta = settings.importance_scale;
        const HpdMatrix scale(CMatrix(zeta * A.mat()));
        const ComplexGammaSampler sampler(mu, scale);
        const double cw = nu - p;
        const double one_minus_zeta = 1.0 - zeta;
        const CMatrix& amat = A.mat();

        auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
            ComplexGammaSampler::Workspace ws;
            CMatrix z, ipz;
            for (long long i = 0; i < count; ++i) {
                sampler.draw(z, ws, rng);
                ipz = z;
                ipz.diagonal().array() += 1.0;
                double lw = cw * logdet_pd(ipz);
                if (one_minus_zeta != 0.0)
                    lw -= one_minus_zeta *
                          amat.cwiseProduct(z.conjugate()).sum().real();
                acc.add(lw);
            }
        };
        const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
            settings.samples, settings.stream, settings.workers, body);
        const double pref = log_gamma_p_complex(p, mu) -
                            mu * (A.log_det() + p * std::log(zeta));
        result = assemble_mc(pref, acc, settings.samples);
    }
    if (spread > kSpreadWarnThreshold) result.warning = conditioning_warning(spread);
    return result;
}

EvalResult whittaker_w(const WhittakerIndices& idx, const SpdMatrix& A,
                       const EvalSettings& settings) {
    const double mu = idx.mu(), nu = idx.nu();
    if (!(mu > 0.5 * (idx.p - 1)))
        throw DomainError(
            "whittaker_w: integral representation requires b - a > (p-3)/4");
    const MFunctionParams mparams(mu, nu, idx.p);
    EvalResult m = m_function(mparams, A, settings);
    const double pref = 0.5 * (mu + nu) * A.log_det() - log_gamma_p(idx.p, mu) -
                        0.5 * A.trace();
    EvalResult r = m;
    r.log_abs = m.log_abs + pref;
    r.abs_err = m.abs_err > 0.0 ? std::exp(std::log(m.abs_err) + pref) : 0.0;
    return r;
}

EvalResult whittaker_w_complex(const WhittakerIndices& idx, const HpdMatrix& A,
                               const EvalSettings& settings) {
    const int p = idx.p;
    const double mu = idx.b - idx.a + 0.5 * p;
    const double nu = idx.a + idx.b + 0.5 * p;
    if (!(mu > p - 1))
        throw DomainError(
            "whittaker_w_complex: integral representation requires b - a > p/2 - 1");
    EvalResult m = m_function_complex(mu, nu, A, settings);
    const double pref = 0.5 * (mu + nu) * A.log_det() - log_gamma_p_complex(p, mu) -
                        0.5 * A.trace();
    EvalResult r = m;
    r.log_abs = m.log_abs + pref;
    r.abs_err = m.abs_err > 0.0 ? std::exp(std::log(m.abs_err) + pref) : 0.0;
    return r;
}

EvalResult tricomi_u(double a, double b, double z, const EvalSettings& settings) {
    if (!(a > 0.0)) throw DomainError("tricomi_u: requires a > 0");
    if (!(z > 0.0)) throw DomainError("tricomi_u: requires z > 0");
    const double c = b - a - 1.0;
    EvalResult r = glq_log_integrate(
        a - 1.0, z, [c](double t) { return SignedLogValue{c * std::log1p(t), 1}; },
        settings);
    const double lg = std::lgamma(a);
    r.log_abs -= lg;
    r.abs_err = r.abs_err > 0.0 ? std::exp(std::log(r.abs_err) - lg) : 0.0;
    return r;
}

EvalResult scalar_whittaker_w(double kappa, double mu, double z,
                              const EvalSettings& settings) {
    const double mup = std::abs(mu);  // W_{k,mu} = W_{k,-mu}
    const double a = mup - kappa + 0.5;
    if (!(a > 0.0))
        throw DomainError("scalar_whittaker_w: index pair outside the integral domain");
    EvalResult u = tricomi_u(a, 1.0 + 2.0 * mup, z, settings);
    const double pref = -0.5 * z + (mup + 0.5) * std::log(z);
    EvalResult r = u;
    r.log_abs = u.log_abs + pref;
    r.abs_err = u.abs_err > 0.0 ? std::exp(std::log(u.abs_err) + pref) : 0.0;
    return r;
}

EvalResult mc_cone_expectation(const std::function<double(const SpdMatrix&)>& f,
                               const MatrixGammaParams& law, long long n,
                               const RandomStream& rng, int workers) {
    if (n < 2) throw std::invalid_argument("mc_cone_expectation: n must be >= 2");
    const MatrixGammaSampler sampler(law);
    auto body = [&](RandomStream& stream, long long count, MeanAccumulator& acc) {
        MatrixGammaSampler::Workspace ws;
        Matrix x;
        for (long long i = 0; i < count; ++i) {
            sampler.draw(x, ws, stream);
            acc.add(f(SpdMatrix(x)));
        }
    };
    const MeanAccumulator acc = mc_blocked<MeanAccumulator>(n, rng, workers, body);
    return EvalResult::from_value(acc.mean(), acc.se(), EvalMethod::mc_importance, n,
                                  /*statistical=*/true);
}

}  // namespace conewhit

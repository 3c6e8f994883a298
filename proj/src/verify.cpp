#include "conewhit/verify.hpp"

#include <chrono>
#include <cmath>

#include "conewhit/matrix_gamma.hpp"
#include "conewhit/mc.hpp"
#include "conewhit/quadrature.hpp"
#include "conewhit/whittaker.hpp"
#include "conewhit/zonal.hpp"
#include "verify_defaults_embedded.hpp"

namespace conewhit::verify {

namespace {

// fixed stream ids per identity so each report depends only on (seed, identity)
enum : std::uint64_t {
    kStreamEq22 = 1,
    kStreamThm21 = 2,
    kStreamThm23 = 3,
    kStreamThm31 = 4,
    kStreamThm32 = 5,
    kStreamScalarReduction = 6,
};

EvalSettings make_settings(const RunConfig& cfg, std::uint64_t identity_stream,
                           std::uint64_t side) {
    EvalSettings s;
    s.samples = cfg.samples;
    s.tol = cfg.tol;
    s.workers = cfg.workers;
    s.min_nodes = cfg.min_nodes;
    s.max_nodes = cfg.max_nodes;
    s.stream = RandomStream(cfg.seed, identity_stream).substream(side);
    return s;
}

PairCheck check_pair(const std::string& a, const EvalResult& ea, const std::string& b,
                     const EvalResult& eb, double atol) {
    PairCheck pc;
    pc.first = a;
    pc.second = b;
    pc.abs_diff = std::abs(ea.value() - eb.value());
    double stat2 = 0.0, det = 0.0;
    for (const EvalResult* e : {&ea, &eb}) {
        if (e->statistical)
            stat2 += e->abs_err * e->abs_err;
        else
            det += e->abs_err;
    }
    pc.stat_err = std::sqrt(stat2);
    pc.det_err = det;
    pc.gate = pc.stat_err > 0.0 ? 3.0 * pc.stat_err + pc.det_err
                                : std::max(atol, pc.det_err);
    pc.pass = pc.abs_diff <= pc.gate;
    return pc;
}

void finalize(VerificationReport& report, const RunConfig& cfg) {
    report.seed = cfg.seed;
    report.samples = cfg.samples;
    report.pass = !report.pairs.empty();
    const PairCheck* worst = nullptr;
    for (const PairCheck& pc : report.pairs) {
        report.pass = report.pass && pc.pass;
        if (!worst || pc.abs_diff > worst->abs_diff) worst = &pc;
    }
    if (worst) {
        report.abs_diff = worst->abs_diff;
        report.combined_err = worst->stat_err + worst->det_err;
        report.z_or_ratio = worst->stat_err > 0.0
                                ? worst->abs_diff / worst->stat_err
                                : worst->abs_diff / cfg.atol;
    }
}

json eval_to_json(const EvalResult& e) {
    json j;
    j["value"] = e.value();
    j["log_abs"] = e.log_abs;
    j["sign"] = e.sign;
    j["err"] = e.abs_err;
    j["method"] = to_string(e.method);
    j["effort"] = e.effort;
    j["statistical"] = e.statistical;
    if (!e.warning.empty()) j["warning"] = e.warning;
    return j;
}

EvalResult eval_from_json(const json& j) {
    EvalResult e;
    e.log_abs = j.at("log_abs").get<double>();
    e.sign = j.at("sign").get<int>();
    e.abs_err = j.at("err").get<double>();
    const std::string m = j.at("method").get<std::string>();
    if (m == "quadrature") e.method = EvalMethod::quadrature;
    else if (m == "mc-importance") e.method = EvalMethod::mc_importance;
    else if (m == "series") e.method = EvalMethod::series;
    else e.method = EvalMethod::closed_form;
    e.effort = j.at("effort").get<long long>();
    e.statistical = j.at("statistical").get<bool>();
    if (j.contains("warning")) e.warning = j.at("warning").get<std::string>();
    return e;
}

json matrix_to_json(const Matrix& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
    return a;
}

// Timer that reports 0 unless timings were requested.
class WallTimer {
  public:
    explicit WallTimer(bool enabled) : enabled_(enabled), start_(clock::now()) {}
    double seconds() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

  private:
    using clock = std::chrono::steady_clock;
    bool enabled_;
    clock::time_point start_;
};

EvalResult closed_form_log(double log_abs, int sign = 1) {
    return EvalResult::from_log(log_abs, sign, 0.0, EvalMethod::closed_form, 0);
}

Matrix half_identity_shift(const Matrix& a, const Matrix& b) { return a + 0.5 * b; }

}  // namespace

json to_json(const VerificationReport& r) {
    json j;
    j["identity_id"] = r.identity_id;
    j["params"] = r.params;
    j["lhs"] = eval_to_json(r.lhs.eval);
    j["lhs"]["label"] = r.lhs.label;
    json rhs = json::array();
    for (const SideValue& s : r.rhs) {
        json e = eval_to_json(s.eval);
        e["label"] = s.label;
        rhs.push_back(e);
    }
    j["rhs"] = rhs;
    json pairs = json::array();
    for (const PairCheck& pc : r.pairs) {
        pairs.push_back(json{{"first", pc.first},
                             {"second", pc.second},
                             {"abs_diff", pc.abs_diff},
                             {"stat_err", pc.stat_err},
                             {"det_err", pc.det_err},
                             {"gate", pc.gate},
                             {"pass", pc.pass}});
    }
    j["pairs"] = pairs;
    j["abs_diff"] = r.abs_diff;
    j["combined_err"] = r.combined_err;
    j["z_or_ratio"] = r.z_or_ratio;
    j["pass"] = r.pass;
    j["seed"] = r.seed;
    j["samples"] = r.samples;
    j["wall_time"] = r.wall_time;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

VerificationReport report_from_json(const json& j) {
    VerificationReport r;
    r.identity_id = j.at("identity_id").get<std::string>();
    r.params = j.at("params");
    r.lhs.eval = eval_from_json(j.at("lhs"));
    r.lhs.label = j.at("lhs").at("label").get<std::string>();
    for (const json& e : j.at("rhs")) {
        SideValue s;
        s.eval = eval_from_json(e);
        s.label = e.at("label").get<std::string>();
        r.rhs.push_back(std::move(s));
    }
    for (const json& p : j.at("pairs")) {
        PairCheck pc;
        pc.first = p.at("first").get<std::string>();
        pc.second = p.at("second").get<std::string>();
        pc.abs_diff = p.at("abs_diff").get<double>();
        pc.stat_err = p.at("stat_err").get<double>();
        pc.det_err = p.at("det_err").get<double>();
        pc.gate = p.at("gate").get<double>();
        pc.pass = p.at("pass").get<bool>();
        r.pairs.push_back(std::move(pc));
    }
    r.abs_diff = j.at("abs_diff").get<double>();
    r.combined_err = j.at("combined_err").get<double>();
    r.z_or_ratio = j.at("z_or_ratio").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.samples = j.at("samples").get<long long>();
    r.wall_time = j.at("wall_time").get<double>();
    if (j.contains("notes"))
        for (const json& n : j.at("notes")) r.notes.push_back(n.get<std::string>());
    return r;
}

// ---------------------------------------------------------------------------

VerificationReport verify_eq_2_2(int p, double alpha, const SpdMatrix& A,
                                 const RunConfig& cfg) {
    WallTimer timer(cfg.timings);
    VerificationReport report;
    report.identity_id = "eq2.2";
    report.params = json{{"p", p}, {"alpha", alpha}, {"A", matrix_to_json(A.mat())}};

    // LHS through the generic M-function engine; at p >= 2 the importance law
    // is reshaped (rate A/2) so the weight does not cancel identically
    // against the closed form.
    EvalSettings settings = make_settings(cfg, kStreamEq22, 0);
    if (p > 1) settings.importance_scale = 0.8;
    const MFunctionParams params(alpha, 0.5 * (p + 1), p);
    report.lhs = {"lhs", m_function(params, A, settings)};

    const double rhs_log = log_gamma_p(p, alpha) - alpha * A.log_det();
    report.rhs.push_back({"closed-form", closed_form_log(rhs_log)});

    report.pairs.push_back(check_pair("lhs", report.lhs.eval, "closed-form",
                                      report.rhs[0].eval, cfg.atol));
    finalize(report, cfg);
    report.wall_time = timer.seconds();
    return report;
}

VerificationReport verify_thm_2_1(int p, double alpha, double beta, const SpdMatrix& A,
                                  const RunConfig& cfg) {
    if (!(beta - alpha > 0.25 * (p - 3)))
        throw DomainError("verify_thm_2_1: requires beta - alpha > (p-3)/4");
    WallTimer timer(cfg.timings);
    VerificationReport report;
    report.identity_id = "thm2.1";
    report.params = json{{"p", p}, {"alpha", alpha}, {"beta", beta},
                         {"A", matrix_to_json(A.mat())}};

    const double quarter = 0.25 * (p + 1);
    const double m = beta - alpha + quarter;

    EvalSettings lhs_settings = make_settings(cfg, kStreamThm21, 0);
    EvalResult lhs;
    if (p == 1) {
        const double a = A.mat()(0, 0);
        const double c = alpha + beta - 0.5;
        lhs = glq_log_integrate(
            beta - alpha - 0.5, a,
            [c](double z) { return SignedLogValue{c * std::log1p(z), 1}; },
            lhs_settings);
    } else {
        // raw integrand with a differently shaped importance law MG(m, A/2):
        // leftover weight |I+Z|^{alpha+beta-(p+1)/4} e^{-tr(AZ)/2}
        const SpdMatrix half_a(Matrix(0.5 * A.mat()));
        const MatrixGammaSampler sampler(m, half_a);
        const double cw = alpha + beta - quarter;
        const Matrix& amat = A.mat();
        auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
            MatrixGammaSampler::Workspace ws;
            Matrix z, ipz;
            for (long long i = 0; i < count; ++i) {
                sampler.draw(z, ws, rng);
                ipz = z;
                ipz.diagonal().array() += 1.0;
                acc.add(cw * logdet_pd(ipz) - 0.5 * amat.cwiseProduct(z).sum());
            }
        };
        const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
            cfg.samples, lhs_settings.stream, cfg.workers, body);
        const double pref =
            log_gamma_p(p, m) - m * (A.log_det() + p * std::log(0.5));
        lhs.log_abs = pref + acc.log_mean();
        lhs.sign = 1;
        lhs.abs_err = std::exp(pref + acc.log_se());
        lhs.method = EvalMethod::mc_importance;
        lhs.effort = cfg.samples;
        lhs.statistical = true;
    }
    report.lhs = {"lhs", lhs};

    const WhittakerIndices idx{alpha, beta, p};
    const EvalResult w = whittaker_w(idx, A, make_settings(cfg, kStreamThm21, 1));
    const double pref = -(beta + quarter) * A.log_det() + log_gamma_p(p, m) +
                        0.5 * A.trace();
    EvalResult rhs = w;
    rhs.log_abs = w.log_abs + pref;
    rhs.abs_err = w.abs_err > 0.0 ? std::exp(std::log(w.abs_err) + pref) : 0.0;
    report.rhs.push_back({"whittaker", rhs});

    report.pairs.push_back(
        check_pair("lhs", report.lhs.eval, "whittaker", rhs, cfg.atol));
    finalize(report, cfg);
    report.wall_time = timer.seconds();
    return report;
}

VerificationReport verify_thm_2_3(int p, double alpha, double beta, double gamma,
                                  const SpdMatrix& A, const SpdMatrix& B,
                                  const RunConfig& cfg) {
    const double quarter = 0.25 * (p + 1);
    if (!(gamma + beta > 0.25 * (p - 3)) || !(gamma - beta > 0.25 * (p - 3)))
        throw DomainError("verify_thm_2_3: requires gamma +- beta > (p-3)/4");
    if (!(beta - alpha > 0.25 * (p - 3)))
        throw DomainError("verify_thm_2_3: requires beta - alpha > (p-3)/4");
    if (!(gamma > 0.5 * (p - 1)))
        throw DomainError("verify_thm_2_3: Monte Carlo route requires gamma > (p-1)/2");

    WallTimer timer(cfg.timings);
    VerificationReport report;
    report.identity_id = "thm2.3";
    report.params = json{{"p", p},           {"alpha", alpha},
                         {"beta", beta},     {"gamma", gamma},
                         {"A", matrix_to_json(A.mat())}, {"B", matrix_to_json(B.mat())}};

    const double mu = beta - alpha + quarter;  // W integral-representation shape
    const double nu = alpha + beta + quarter;

    // LHS: \int |Z|^{gamma-(p+1)/2} e^{-tr(AZ)} W_{alpha,beta}(BZ) dZ
    EvalSettings lhs_settings = make_settings(cfg, kStreamThm23, 0);
    EvalResult lhs;
    if (p == 1) {
        const double a = A.mat()(0, 0);
        const double b = B.mat()(0, 0);
        EvalSettings node_settings = lhs_settings;
        lhs = glq_log_integrate(
            gamma - 1.0, a,
            [&](double z) {
                const EvalResult w = scalar_whittaker_w(alpha, beta, b * z, node_settings);
                return SignedLogValue{w.log_abs, w.sign};
            },
            lhs_settings);
    } else {
        // joint sample (Z, X): Z ~ MG(gamma, A); X | Z ~ MG(mu, T), T = B^{1/2} Z B^{1/2};
        // E[|T|^a e^{-tr T/2} |I+X|^{nu-(p+1)/2} | Z] = W_{alpha,beta}(BZ) exactly.
        const MatrixGammaSampler z_sampler(gamma, A);
        const Matrix rb = sqrt_spd(B).mat();
        const double cw = nu - 0.5 * (p + 1);
        auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
            MatrixGammaSampler::Workspace ws;
            Matrix z, t, ipx, x;
            for (long long i = 0; i < count; ++i) {
                z_sampler.draw(z, ws, rng);
                t.noalias() = rb * z * rb;
                t = 0.5 * (t + t.transpose().eval());
                const SpdMatrix tm(t);
                const MatrixGammaSampler x_sampler(mu, tm);
                x_sampler.draw(x, ws, rng);
                ipx = x;
                ipx.diagonal().array() += 1.0;
                const double lw = alpha * tm.log_det() - 0.5 * tm.trace() +
                                  cw * logdet_pd(ipx);
                acc.add(lw);
            }
        };
        const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
            cfg.samples, lhs_settings.stream, cfg.workers, body);
        const double pref = log_gamma_p(p, gamma) - gamma * A.log_det();
        lhs.log_abs = pref + acc.log_mean();
        lhs.sign = 1;
        lhs.abs_err = std::exp(pref + acc.log_se());
        lhs.method = EvalMethod::mc_importance;
        lhs.effort = cfg.samples;
        lhs.statistical = true;
    }
    report.lhs = {"lhs", lhs};

    // Right sides.
    const Matrix rb = sqrt_spd(B).mat();
    const Matrix shifted = half_identity_shift(A.mat(), B.mat());  // A + B/2
    const SpdMatrix shifted_spd(shifted);
    const Matrix w28 = rb * shifted_spd.chol().solve(Matrix::Identity(p, p)) * rb;
    const SymMatrix w28_sym(Matrix(0.5 * (w28 + w28.transpose())));
    const Vector eig_w = sym_eigenvalues(w28_sym);
    const bool cond_28 = eig_w(0) > 0.0 && eig_w(eig_w.size() - 1) < 1.0;

    const Matrix binv_sqrt =
        B.chol().solve(Matrix::Identity(p, p));  // B^{-1}
    const SpdMatrix binv(Matrix(0.5 * (binv_sqrt + binv_sqrt.transpose())));
    const Matrix rbi = sqrt_spd(binv).mat();
    Matrix cmat = rbi * A.mat() * rbi;
    cmat = 0.5 * (cmat + cmat.transpose().eval());
    cmat.diagonal().array() -= 0.5;
    const SymMatrix c_sym(cmat);
    const Vector eig_c = sym_eigenvalues(c_sym);
    const double c_radius = std::max(std::abs(eig_c(0)), std::abs(eig_c(eig_c.size() - 1)));
    const bool cond_29 = c_radius < 1.0;

    if (!cond_28 && !cond_29)
        throw DomainError("verify_thm_2_3: neither representation condition holds");

    const double log_gammas_shared = log_gamma_p(p, gamma + beta + quarter) +
                                     log_gamma_p(p, gamma - beta + quarter) -
                                     log_gamma_p(p, gamma - alpha + 0.5 * (p + 1));
    SeriesParams sp;
    sp.max_degree = 60;
    sp.tail_tol = 1e-12;

    if (cond_28) {
        sp.a = quarter + beta - alpha;
        sp.b = quarter + gamma + beta;
        sp.c = 0.5 * (p + 1) + gamma - alpha;
        const SymMatrix arg(Matrix(Matrix::Identity(p, p) - w28_sym.mat()));
        const EvalResult f = hyp2f1_matrix(sp, arg);
        const double pref = -(gamma + beta + quarter) * shifted_spd.log_det() +
                            log_gammas_shared;
        EvalResult rhs = f;
        rhs.log_abs = f.log_abs + pref;
        rhs.abs_err = f.abs_err > 0.0 ? std::exp(std::log(f.abs_err) + pref) : 0.0;
        report.rhs.push_back({"eq2.8", rhs});
    } else {
        report.notes.push_back("eq2.8 argument condition not satisfied; skipped");
    }

    if (cond_29) {
        sp.a = quarter + gamma - beta;
        sp.b = quarter + gamma + beta;
        sp.c = 0.5 * (p + 1) + gamma - alpha;
        const SymMatrix arg(Matrix(-c_sym.mat()));
        const EvalResult f = hyp2f1_matrix(sp, arg);
        const double pref = -(gamma + beta + quarter) * B.log_det() + log_gammas_shared;
        EvalResult rhs = f;
        rhs.log_abs = f.log_abs + pref;
        rhs.abs_err = f.abs_err > 0.0 ? std::exp(std::log(f.abs_err) + pref) : 0.0;
        report.rhs.push_back({"eq2.9", rhs});
    } else {
        report.notes.push_back("eq2.9 norm condition ||C|| < 1 not satisfied; skipped");
    }

    for (const SideValue& s : report.rhs)
        report.pairs.push_back(check_pair("lhs", lhs, s.label, s.eval, cfg.atol));
    if (report.rhs.size() == 2)
        report.pairs.push_back(check_pair(report.rhs[0].label, report.rhs[0].eval,
                                          report.rhs[1].label, report.rhs[1].eval,
                                          cfg.atol));
    finalize(report, cfg);
    report.wall_time = timer.seconds();
    return report;
}

VerificationReport verify_thm_3_1(int p, double alpha, const HpdMatrix& A,
                                  const RunConfig& cfg) {
    WallTimer timer(cfg.timings);
    VerificationReport report;
    report.identity_id = "thm3.1";
    json amat = json::array();
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            amat.push_back(A.mat()(i, j).real());
            if (A.mat()(i, j).imag() != 0.0) report.notes.push_back("A has complex entries");
        }
    report.params = json{{"p", p}, {"alpha", alpha}, {"A", amat}};

    EvalSettings lhs_settings = make_settings(cfg, kStreamThm31, 0);
    EvalResult lhs;
    if (p == 1) {
        const double a = A.mat()(0, 0).real();
        lhs = glq_log_integrate(
            0.0, a, [alpha](double z) { return SignedLogValue{-alpha * std::log1p(z), 1}; },
            lhs_settings);
    } else {
        // raw integrand, importance law CMG(p, A/2)
        const HpdMatrix half_a(CMatrix(0.5 * A.mat()));
        const ComplexGammaSampler sampler(p, half_a);
        const CMatrix& am = A.mat();
        auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
            ComplexGammaSampler::Workspace ws;
            CMatrix z, ipz;
            for (long long i = 0; i < count; ++i) {
                sampler.draw(z, ws, rng);
                ipz = z;
                ipz.diagonal().array() += 1.0;
                acc.add(-alpha * logdet_pd(ipz) -
                        0.5 * am.cwiseProduct(z.conjugate()).sum().real());
            }
        };
        const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
            cfg.samples, lhs_settings.stream, cfg.workers, body);
        const double pref = log_gamma_p_complex(p, p) -
                            static_cast<double>(p) * (A.log_det() + p * std::log(0.5));
        lhs.log_abs = pref + acc.log_mean();
        lhs.sign = 1;
        lhs.abs_err = std::exp(pref + acc.log_se());
        lhs.method = EvalMethod::mc_importance;
        lhs.effort = cfg.samples;
        lhs.statistical = true;
    }
    report.lhs = {"lhs", lhs};

    const WhittakerIndices idx{-0.5 * alpha, 0.5 * (p - alpha), p};
    const EvalResult w = whittaker_w_complex(idx, A, make_settings(cfg, kStreamThm31, 1));
    const double pref = (0.5 * alpha - p) * A.log_det() + log_gamma_p_complex(p, p) +
                        0.5 * A.trace();
    EvalResult rhs = w;
    rhs.log_abs = w.log_abs + pref;
    rhs.abs_err = w.abs_err > 0.0 ? std::exp(std::log(w.abs_err) + pref) : 0.0;
    report.rhs.push_back({"whittaker", rhs});

    report.pairs.push_back(check_pair("lhs", lhs, "whittaker", rhs, cfg.atol));
    finalize(report, cfg);
    report.wall_time = timer.seconds();
    return report;
}

VerificationReport verify_thm_3_2(int p, double alpha, double q, const HpdMatrix& B,
                                  const HpdMatrix& U, const HpdMatrix& M,
                                  const RunConfig& cfg) {
    // statement bound Re(q) > p/2; proof's gamma condition Re(2q) > p-1
    if (!(q > 0.5 * p)) throw DomainError("verify_thm_3_2: requires q > p/2");
    if (!(2.0 * q > p - 1)) throw DomainError("verify_thm_3_2: requires 2q > p-1");

    WallTimer timer(cfg.timings);
    VerificationReport report;
    report.identity_id = "thm3.2";
    auto cm = [&](const HpdMatrix& x) {
        json a = json::array();
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) a.push_back(x.mat()(i, j).real());
        return a;
    };
    report.params = json{{"p", p},      {"alpha", alpha}, {"q", q},
                         {"B", cm(B)},  {"U", cm(U)},     {"M", cm(M)}};
    report.notes.push_back(
        "bounds enforced: q > p/2 (statement) and 2q > p-1 (proof); the statement "
        "bound binds");

    const double tr_mu = M.mat().cwiseProduct(U.mat().conjugate()).sum().real();
    const CMatrix ub = U.mat() + B.mat();
    const HpdMatrix ub_h{CMatrix(ub)};

    EvalSettings lhs_settings = make_settings(cfg, kStreamThm32, 0);
    EvalResult lhs;
    if (p == 1) {
        const double m = M.mat()(0, 0).real();
        const double shift = ub(0, 0).real();
        const double c = 2.0 * alpha - 1.0;
        EvalResult integral = glq_log_integrate(
            2.0 * q - 1.0, m,
            [c, shift](double y) {
                return SignedLogValue{c * std::log(y + shift), 1};
            },
            lhs_settings);
        lhs = integral;
        lhs.log_abs = integral.log_abs - tr_mu;
        lhs.abs_err = integral.abs_err > 0.0
                          ? std::exp(std::log(integral.abs_err) - tr_mu)
                          : 0.0;
    } else {
        // shift X = U + Y; importance CMG(2q, M) leaves weight |det(Y+U+B)|^{2a-p}
        const ComplexGammaSampler sampler(2.0 * q, M);
        const double cw = 2.0 * alpha - p;
        auto body = [&](RandomStream& rng, long long count, LogMeanAccumulator& acc) {
            ComplexGammaSampler::Workspace ws;
            CMatrix y, s;
            for (long long i = 0; i < count; ++i) {
                sampler.draw(y, ws, rng);
                s = y + ub;
                acc.add(cw * logdet_pd(s));
            }
        };
        const LogMeanAccumulator acc = mc_blocked<LogMeanAccumulator>(
            cfg.samples, lhs_settings.stream, cfg.workers, body);
        const double pref =
            log_gamma_p_complex(p, 2.0 * q) - 2.0 * q * M.log_det() - tr_mu;
        lhs.log_abs = pref + acc.log_mean();
        lhs.sign = 1;
        lhs.abs_err = std::exp(pref + acc.log_se());
        lhs.method = EvalMethod::mc_importance;
        lhs.effort = cfg.samples;
        lhs.statistical = true;
    }
    report.lhs = {"lhs", lhs};

    // RHS with T~ = (U+B)^{1/2} M (U+B)^{1/2}
    const CMatrix rub = sqrt_hpd(ub_h).mat();
    CMatrix targ = rub * M.mat() * rub;
    targ = 0.5 * (targ + targ.adjoint().eval());
    const HpdMatrix t_h(targ);
    const WhittakerIndices idx{alpha - q, alpha + q - 0.5 * p, p};
    const EvalResult w = whittaker_w_complex(idx, t_h, make_settings(cfg, kStreamThm32, 1));
    const double tr_bm_minus_um =
        0.5 * (B.mat() - U.mat()).cwiseProduct(M.mat().conjugate()).sum().real();
    const double pref = log_gamma_p_complex(p, 2.0 * q) +
                        (alpha + q - p) * ub_h.log_det() -
                        (alpha + q) * M.log_det() + tr_bm_minus_um;
    EvalResult rhs = w;
    rhs.log_abs = w.log_abs + pref;
    rhs.abs_err = w.abs_err > 0.0 ? std::exp(std::log(w.abs_err) + pref) : 0.0;
    report.rhs.push_back({"whittaker", rhs});

    report.pairs.push_back(check_pair("lhs", lhs, "whittaker", rhs, cfg.atol));
    finalize(report, cfg);
    report.wall_time = timer.seconds();
    return report;
}

VerificationReport verify_scalar_reduction(const RunConfig& cfg) {
    return verify_scalar_reduction_cases(
        {0.5, 1.0, 2.0, 5.0},
        {{0.0, 0.5}, {-1.0, 0.5}, {-0.5, 0.0}, {0.5, 1.5}}, cfg);
}

VerificationReport verify_scalar_reduction_cases(
    const std::vector<double>& z_grid,
    const std::vector<std::pair<double, double>>& ab_pairs, const RunConfig& cfg) {
    WallTimer timer(cfg.timings);
    VerificationReport report;
    report.identity_id = "scalar-reduction";
    json zs = json::array(), abs = json::array();
    for (double z : z_grid) zs.push_back(z);
    for (const auto& [a, b] : ab_pairs) abs.push_back(json::array({a, b}));
    report.params = json{{"z_grid", zs}, {"ab_pairs", abs}};

    const EvalSettings settings = make_settings(cfg, kStreamScalarReduction, 0);
    const double gate = 1e-8;

    double worst = -1.0;
    EvalResult worst_matrix, worst_classical, worst_complex;
    json worst_case;
    bool all_pass = true;
    for (const auto& [a, b] : ab_pairs) {
        for (double z : z_grid) {
            const SpdMatrix az(Matrix(Matrix::Constant(1, 1, z)));
            const HpdMatrix azc(CMatrix(CMatrix::Constant(1, 1, z)));
            const WhittakerIndices idx{a, b, 1};
            const EvalResult wm = whittaker_w(idx, az, settings);
            const EvalResult wc = whittaker_w_complex(idx, azc, settings);
            const EvalResult cl = scalar_whittaker_w(a, b, z, settings);
            const double d1 = std::abs(wm.value() - cl.value());
            const double d2 = std::abs(wc.value() - cl.value());
            const double d = std::max(d1, d2);
            all_pass = all_pass && d <= gate;
            if (d > worst) {
                worst = d;
                worst_matrix = wm;
                worst_classical = cl;
                worst_complex = wc;
                worst_case = json{{"a", a}, {"b", b}, {"z", z}};
            }
        }
    }
    report.params["cases"] = static_cast<int>(z_grid.size() * ab_pairs.size());
    report.params["worst_case"] = worst_case;
    report.lhs = {"matrix-engine", worst_matrix};
    report.rhs.push_back({"classical-oracle", worst_classical});
    report.rhs.push_back({"complex-engine", worst_complex});
    PairCheck pc;
    pc.first = "worst-case";
    pc.second = "classical-oracle";
    pc.abs_diff = worst;
    pc.det_err = worst_classical.abs_err + worst_matrix.abs_err;
    pc.gate = gate;
    pc.pass = all_pass;
    report.pairs.push_back(pc);
    finalize(report, cfg);
    report.pass = all_pass;
    report.z_or_ratio = worst / gate;
    report.wall_time = timer.seconds();
    return report;
}

// ---------------------------------------------------------------------------

const char* default_config() { return kDefaultVerifyConfig; }

namespace {

SpdMatrix spd_from_json(const json& entries, int p) {
    Matrix m(p, p);
    int k = 0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = entries.at(k++).get<double>();
    return SpdMatrix(m);
}

HpdMatrix hpd_from_json(const json& entries, int p) {
    CMatrix m(p, p);
    int k = 0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = entries.at(k++).get<double>();
    return HpdMatrix(m);
}

}  // namespace

std::vector<VerificationReport> verify_identity(const std::string& identity,
                                                const json& config,
                                                const RunConfig& cfg) {
    std::vector<VerificationReport> out;
    if (!config.contains(identity))
        throw std::invalid_argument("verify: unknown identity '" + identity + "'");
    for (const json& c : config.at(identity)) {
        if (identity == "eq2.2") {
            const int p = c.at("p").get<int>();
            out.push_back(verify_eq_2_2(p, c.at("alpha").get<double>(),
                                        spd_from_json(c.at("A"), p), cfg));
        } else if (identity == "thm2.1") {
            const int p = c.at("p").get<int>();
            out.push_back(verify_thm_2_1(p, c.at("alpha").get<double>(),
                                         c.at("beta").get<double>(),
                                         spd_from_json(c.at("A"), p), cfg));
        } else if (identity == "thm2.3") {
            const int p = c.at("p").get<int>();
            out.push_back(verify_thm_2_3(
                p, c.at("alpha").get<double>(), c.at("beta").get<double>(),
                c.at("gamma").get<double>(), spd_from_json(c.at("A"), p),
                spd_from_json(c.at("B"), p), cfg));
        } else if (identity == "thm3.1") {
            const int p = c.at("p").get<int>();
            out.push_back(verify_thm_3_1(p, c.at("alpha").get<double>(),
                                         hpd_from_json(c.at("A"), p), cfg));
        } else if (identity == "thm3.2") {
            const int p = c.at("p").get<int>();
            out.push_back(verify_thm_3_2(
                p, c.at("alpha").get<double>(), c.at("q").get<double>(),
                hpd_from_json(c.at("B"), p), hpd_from_json(c.at("U"), p),
                hpd_from_json(c.at("M"), p), cfg));
        } else if (identity == "scalar-reduction") {
            std::vector<double> z_grid;
            for (const json& z : c.at("z_grid")) z_grid.push_back(z.get<double>());
            std::vector<std::pair<double, double>> ab;
            for (const json& pr : c.at("ab_pairs"))
                ab.emplace_back(pr.at(0).get<double>(), pr.at(1).get<double>());
            out.push_back(verify_scalar_reduction_cases(z_grid, ab, cfg));
        } else {
            throw std::invalid_argument("verify: unknown identity '" + identity + "'");
        }
    }
    return out;
}

std::vector<VerificationReport> verify_all(const json& config, const RunConfig& cfg) {
    std::vector<VerificationReport> out;
    for (const char* id :
         {"eq2.2", "thm2.1", "thm2.3", "thm3.1", "thm3.2", "scalar-reduction"}) {
        if (!config.contains(id)) continue;
        std::vector<VerificationReport> part = verify_identity(id, config, cfg);
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return out;
}

}  // namespace conewhit::verify

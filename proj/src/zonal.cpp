#include "conewhit/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace conewhit {

namespace {

void gen_partitions(int remaining, int max_part, int slots, std::vector<int>& cur,
                    std::vector<Partition>& out) {
    if (remaining == 0) {
        out.emplace_back(cur);
        return;
    }
    if (slots == 0) return;
    for (int first = std::min(remaining, max_part); first >= 1; --first) {
        // the remaining weight must fit into the slots left at size <= first
        if (static_cast<long long>(first) * (slots - 1) < remaining - first) continue;
        cur.push_back(first);
        gen_partitions(remaining - first, first, slots - 1, cur, out);
        cur.pop_back();
    }
}

// rho_kappa = sum_i k_i (k_i - i), 1-based i
long long rho(const Partition& k) {
    long long s = 0;
    for (int i = 0; i < k.length(); ++i)
        s += static_cast<long long>(k.parts[i]) * (k.parts[i] - (i + 1));
    return s;
}

// kappa dominates lambda (same weight): partial sums of kappa >= those of lambda
bool dominates(const Partition& kappa, const Partition& lambda) {
    int sk = 0, sl = 0;
    const int n = std::max(kappa.length(), lambda.length());
    for (int i = 0; i < n; ++i) {
        sk += i < kappa.length() ? kappa.parts[i] : 0;
        sl += i < lambda.length() ? lambda.parts[i] : 0;
        if (sk < sl) return false;
    }
    return true;
}

// leading coefficient of m_kappa in C_kappa: 2^k k! / prod_cells (2(arm+1)+leg)
double leading_coefficient(const Partition& kappa) {
    const int k = kappa.weight();
    double denom = 1.0;
    for (int i = 0; i < kappa.length(); ++i) {
        for (int j = 1; j <= kappa.parts[i]; ++j) {
            const int arm = kappa.parts[i] - j;
            int leg = 0;
            for (int r = i + 1; r < kappa.length(); ++r)
                if (kappa.parts[r] >= j) ++leg;
            denom *= 2.0 * (arm + 1) + leg;
        }
    }
    return std::exp2(k) * std::tgamma(k + 1.0) / denom;
}

struct ZonalTable {
    int k = 0, p = 0;
    std::vector<Partition> kappas;                 // weight k, <= p parts, rev-lex
    std::vector<std::vector<double>> coeff;        // coeff[i][j]: m_{kappas[j]} in C_{kappas[i]}
    std::map<std::vector<int>, int> index;
};

ZonalTable build_table(int k, int p) {
    ZonalTable t;
    t.k = k;
    t.p = p;
    t.kappas = partitions(k, p);
    const int n = static_cast<int>(t.kappas.size());
    for (int i = 0; i < n; ++i) t.index[t.kappas[i].parts] = i;
    t.coeff.assign(n, std::vector<double>(n, 0.0));

    for (int ik = 0; ik < n; ++ik) {
        const Partition& kappa = t.kappas[ik];
        const long long rho_k = rho(kappa);
        auto& row = t.coeff[ik];
        row[ik] = leading_coefficient(kappa);
        // walk down in reverse-lex order; everything lambda strictly dominated
        // by kappa appears after it
        for (int jl = ik + 1; jl < n; ++jl) {
            const Partition& lambda = t.kappas[jl];
            if (!dominates(kappa, lambda)) continue;
            double sum = 0.0;
            std::vector<int> mu;
            for (int jpos = 1; jpos < lambda.length(); ++jpos) {
                for (int ipos = 0; ipos < jpos; ++ipos) {
                    for (int step = 1; step <= lambda.parts[jpos]; ++step) {
                        mu = lambda.parts;
                        mu[ipos] += step;
                        mu[jpos] -= step;
                        std::sort(mu.begin(), mu.end(), std::greater<int>());
                        while (!mu.empty() && mu.back() == 0) mu.pop_back();
                        auto it = t.index.find(mu);
                        if (it == t.index.end()) continue;  // > p parts impossible here
                        const double c_mu = row[it->second];
                        if (c_mu == 0.0) continue;  // mu not below kappa
                        sum += (lambda.parts[ipos] - lambda.parts[jpos] + 2.0 * step) * c_mu;
                    }
                }
            }
            row[jl] = sum / static_cast<double>(rho_k - rho(lambda));
        }
    }
    return t;
}

const ZonalTable& zonal_table(int k, int p) {
    using Key = std::pair<int, int>;
    static std::map<Key, std::unique_ptr<ZonalTable>> cache;
    static std::shared_mutex mutex;
    const Key key{k, p};
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    std::unique_lock lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<ZonalTable>(build_table(k, p))).first;
    return *it->second;
}

double ipow(double x, int n) {
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

}  // namespace

std::vector<Partition> partitions(int k, int max_parts) {
    if (k < 0) throw std::invalid_argument("partitions: k must be >= 0");
    if (k == 0) return {Partition{}};
    if (max_parts < 1) return {};
    std::vector<Partition> out;
    std::vector<int> cur;
    gen_partitions(k, k, max_parts, cur, out);
    return out;
}

double gen_pochhammer(double a, const Partition& kappa) {
    double prod = 1.0;
    for (int i = 0; i < kappa.length(); ++i) {
        const double base = a - 0.5 * i;
        for (int j = 0; j < kappa.parts[i]; ++j) prod *= base + j;
    }
    return prod;
}

LogPochhammer gen_pochhammer_log(double a, const Partition& kappa) {
    double log_abs = 0.0;
    int sign = 1;
    for (int i = 0; i < kappa.length(); ++i) {
        const double base = a - 0.5 * i;
        for (int j = 0; j < kappa.parts[i]; ++j) {
            const double f = base + j;
            if (f == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
            if (f < 0.0) sign = -sign;
            log_abs += std::log(std::abs(f));
        }
    }
    return {log_abs, sign};
}

double monomial_sym(const Partition& lambda, const std::vector<double>& vars) {
    const int n = static_cast<int>(vars.size());
    if (lambda.length() > n) return 0.0;
    std::vector<int> expo(lambda.parts);
    expo.resize(n, 0);
    std::sort(expo.begin(), expo.end());  // ascending for next_permutation
    double sum = 0.0;
    do {
        double term = 1.0;
        for (int i = 0; i < n; ++i)
            if (expo[i] != 0) term *= ipow(vars[i], expo[i]);
        sum += term;
    } while (std::next_permutation(expo.begin(), expo.end()));
    return sum;
}

double zonal_C(const Partition& kappa, const std::vector<double>& eigenvalues) {
    const int p = static_cast<int>(eigenvalues.size());
    if (kappa.length() > p) return 0.0;
    const ZonalTable& t = zonal_table(kappa.weight(), p);
    auto it = t.index.find(kappa.parts);
    if (it == t.index.end()) throw std::invalid_argument("zonal_C: not a partition");
    const auto& row = t.coeff[it->second];
    double sum = 0.0;
    for (std::size_t j = 0; j < t.kappas.size(); ++j)
        if (row[j] != 0.0) sum += row[j] * monomial_sym(t.kappas[j], eigenvalues);
    return sum;
}

EvalResult hyp2f1_matrix(const SeriesParams& sp, const SymMatrix& X) {
    const Vector e = sym_eigenvalues(X);
    return hyp2f1_matrix(sp, std::vector<double>(e.data(), e.data() + e.size()));
}

EvalResult hyp2f1_matrix(const SeriesParams& sp, const std::vector<double>& eigenvalues) {
    if (sp.max_degree < 1) throw std::invalid_argument("hyp2f1_matrix: max_degree >= 1");
    const int p = static_cast<int>(eigenvalues.size());
    double radius = 0.0;
    for (double e : eigenvalues) radius = std::max(radius, std::abs(e));
    if (!(radius < 1.0))
        throw DomainError("hyp2f1_matrix: spectral radius of the argument must be < 1");

    double total = 1.0;  // degree-0 term
    long long terms = 1;
    for (int k = 1; k <= sp.max_degree; ++k) {
        const ZonalTable& table = zonal_table(k, p);
        const double log_kfac = std::lgamma(k + 1.0);
        double degree_sum = 0.0;
        for (const Partition& kappa : table.kappas) {
            const LogPochhammer la = gen_pochhammer_log(sp.a, kappa);
            if (la.sign == 0) continue;
            const LogPochhammer lb = gen_pochhammer_log(sp.b, kappa);
            if (lb.sign == 0) continue;
            const LogPochhammer lc = gen_pochhammer_log(sp.c, kappa);
            if (lc.sign == 0)
                throw DomainError(
                    "hyp2f1_matrix: denominator Pochhammer (c)_kappa vanishes");
            const double coef = la.sign * lb.sign * lc.sign *
                                std::exp(la.log_abs + lb.log_abs - lc.log_abs - log_kfac);
            degree_sum += coef * zonal_C(kappa, eigenvalues);
            ++terms;
        }
        total += degree_sum;
        if (std::abs(degree_sum) < sp.tail_tol) {
            EvalResult r = EvalResult::from_value(total, std::abs(degree_sum),
                                                  EvalMethod::series, terms);
            return r;
        }
    }
    throw NotConverged("hyp2f1_matrix: tail above tolerance at max degree");
}

EvalResult hyp2f1_scalar(double a, double b, double c, double x, double tail_tol,
                         int max_terms) {
    if (!(std::abs(x) < 1.0)) throw DomainError("hyp2f1_scalar: requires |x| < 1");
    double term = 1.0, total = 1.0;
    for (int k = 0; k < max_terms; ++k) {
        const double denom = (c + k) * (k + 1.0);
        if (denom == 0.0)
            throw DomainError("hyp2f1_scalar: denominator parameter breakpoint");
        term *= (a + k) * (b + k) / denom * x;
        total += term;
        if (std::abs(term) < tail_tol)
            return EvalResult::from_value(total, std::abs(term), EvalMethod::series, k + 2);
    }
    throw NotConverged("hyp2f1_scalar: series did not converge");
}

}  // namespace conewhit

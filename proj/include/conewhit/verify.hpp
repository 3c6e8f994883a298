#pragma once

// One verifier per integral identity: each evaluates the left side by a route
// that is numerically independent of the right side (raw-integrand Monte
// Carlo with a differently shaped importance law, or quadrature at p = 1),
// and gates the difference at max(atol, 3 * statistical error + deterministic
// error).  Reports are self-contained and serializable; identical
// (identity, seed, samples) runs are bit-identical regardless of workers.

#include <json.hpp>
#include <string>
#include <vector>

#include "conewhit/eval.hpp"
#include "conewhit/linalg.hpp"

namespace conewhit::verify {

using json = nlohmann::ordered_json;

struct RunConfig {
    std::uint64_t seed = 0;
    long long samples = 200000;
    double tol = 1e-9;
    int workers = 1;
    double atol = 1e-9;   // floor for purely deterministic comparisons
    int min_nodes = 32;   // quadrature node-doubling bounds
    int max_nodes = 1024;
    bool timings = false; // emit measured wall time (off by default so reports
                          // are byte-stable)
};

struct SideValue {
    std::string label;  // "lhs", "eq2.8", ...
    EvalResult eval;
};

struct PairCheck {
    std::string first, second;
    double abs_diff = 0.0;
    double stat_err = 0.0;  // combined one-sigma statistical error
    double det_err = 0.0;   // summed deterministic error bounds
    double gate = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string identity_id;
    json params;
    SideValue lhs;
    std::vector<SideValue> rhs;
    std::vector<PairCheck> pairs;
    double abs_diff = 0.0;      // worst pair
    double combined_err = 0.0;  // stat + det error of the worst pair
    double z_or_ratio = 0.0;    // diff / stat error (MC) or diff / atol
    bool pass = false;
    std::uint64_t seed = 0;
    long long samples = 0;
    double wall_time = 0.0;
    std::vector<std::string> notes;
};

json to_json(const VerificationReport& report);
VerificationReport report_from_json(const json& j);

// M(alpha, (p+1)/2; A) = Gamma_p(alpha) |A|^{-alpha}
VerificationReport verify_eq_2_2(int p, double alpha, const SpdMatrix& A,
                                 const RunConfig& cfg);

// Laplace-type integral representation of W_{alpha,beta}(A)
VerificationReport verify_thm_2_1(int p, double alpha, double beta, const SpdMatrix& A,
                                  const RunConfig& cfg);

// Whittaker-weighted Laplace transform vs its two 2F1 representations
VerificationReport verify_thm_2_3(int p, double alpha, double beta, double gamma,
                                  const SpdMatrix& A, const SpdMatrix& B,
                                  const RunConfig& cfg);

// complex cone integral of |det(I+Z)|^{-alpha} e^{-tr(AZ)}
VerificationReport verify_thm_3_1(int p, double alpha, const HpdMatrix& A,
                                  const RunConfig& cfg);

// shifted complex integral over X > U with two determinant kernels
VerificationReport verify_thm_3_2(int p, double alpha, double q, const HpdMatrix& B,
                                  const HpdMatrix& U, const HpdMatrix& M,
                                  const RunConfig& cfg);

// p = 1 engines vs the classical U-based Whittaker oracle over an index grid
VerificationReport verify_scalar_reduction(const RunConfig& cfg);
VerificationReport verify_scalar_reduction_cases(
    const std::vector<double>& z_grid,
    const std::vector<std::pair<double, double>>& ab_pairs, const RunConfig& cfg);

// Shipped default parameter sets (versioned); identity ids as in the CLI.
const char* default_config();
std::vector<VerificationReport> verify_identity(const std::string& identity,
                                                const json& config, const RunConfig& cfg);
std::vector<VerificationReport> verify_all(const json& config, const RunConfig& cfg);

}  // namespace conewhit::verify

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "conewhit/random.hpp"
#include "conewhit/zonal.hpp"

using namespace conewhit;

TEST_CASE("partition enumeration") {
    const auto p32 = partitions(3, 2);
    REQUIRE(p32.size() == 2);
    CHECK(p32[0] == Partition{3});
    CHECK(p32[1] == Partition{2, 1});

    CHECK(partitions(1, 5) == std::vector<Partition>{Partition{1}});
    CHECK(partitions(5, 2).size() == 3);  // (5),(4,1),(3,2)
    CHECK(partitions(0, 3).size() == 1);  // empty partition
    CHECK(partitions(4, 1) == std::vector<Partition>{Partition{4}});
}

TEST_CASE("generalized pochhammer") {
    CHECK(gen_pochhammer(2.5, Partition{1}) == doctest::Approx(2.5));
    CHECK(gen_pochhammer(2.0, Partition{2}) == doctest::Approx(6.0));
    CHECK(gen_pochhammer(2.0, Partition{1, 1}) == doctest::Approx(3.0));
    // breakpoint: (-1)_{(2)} = (-1)(0) = 0
    CHECK(gen_pochhammer(-1.0, Partition{2}) == doctest::Approx(0.0));
    CHECK(gen_pochhammer_log(-1.0, Partition{2}).sign == 0);
    // sign tracking: (-1.5)_{(1)} < 0
    const auto lp = gen_pochhammer_log(-1.5, Partition{1});
    CHECK(lp.sign == -1);
    CHECK(std::exp(lp.log_abs) == doctest::Approx(1.5));
}

TEST_CASE("zonal polynomials at weight 1 and 2") {
    CHECK(zonal_C(Partition{1}, {1.0, 2.0}) == doctest::Approx(3.0).epsilon(1e-14));

    // C_{(2)}(I_2) = 8/3, C_{(1,1)}(I_2) = 4/3 (monomial expansion:
    // C_{(2)} = m_2 + (2/3) m_{11}, C_{(1,1)} = (4/3) m_{11})
    const std::vector<double> ones{1.0, 1.0};
    CHECK(zonal_C(Partition{2}, ones) == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
    CHECK(zonal_C(Partition{1, 1}, ones) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK(zonal_C(Partition{2}, ones) + zonal_C(Partition{1, 1}, ones) ==
          doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("zonal normalization at weight 3") {
    const std::vector<double> e{0.5, 0.25};
    double sum = 0.0;
    for (const Partition& k : partitions(3, 2)) sum += zonal_C(k, e);
    CHECK(sum == doctest::Approx(0.421875).epsilon(1e-13));  // 0.75^3
}

TEST_CASE("zonal normalization sums to (tr X)^k") {
    RandomStream rng(100, 0);
    for (int p = 1; p <= 3; ++p) {
        for (int k = 1; k <= 6; ++k) {
            for (int rep = 0; rep < 100; ++rep) {
                std::vector<double> e(p);
                double tr = 0.0;
                for (double& x : e) {
                    x = 0.1 + 1.9 * rng.uniform();  // eigenvalues on the cone
                    tr += x;
                }
                double sum = 0.0;
                for (const Partition& kappa : partitions(k, p)) sum += zonal_C(kappa, e);
                const double expected = std::pow(tr, k);
                CHECK(std::abs(sum - expected) / expected < 1e-10);
            }
        }
    }
}

TEST_CASE("zonal normalization with signed eigenvalues (condition-aware gate)") {
    // cancellation makes (tr X)^k ill-conditioned when tr is small; gate the
    // defect against the total mass sum |C_kappa|(|e|) instead
    RandomStream rng(100, 1);
    for (int rep = 0; rep < 50; ++rep) {
        const int p = 2 + static_cast<int>(rng.next_u32() % 2);
        const int k = 2 + static_cast<int>(rng.next_u32() % 5);
        std::vector<double> e(p), abs_e(p);
        double tr = 0.0;
        for (int i = 0; i < p; ++i) {
            e[i] = rng.uniform() * 2.0 - 0.5;
            abs_e[i] = std::abs(e[i]);
            tr += e[i];
        }
        double sum = 0.0, mass = 0.0;
        for (const Partition& kappa : partitions(k, p)) {
            sum += zonal_C(kappa, e);
            mass += zonal_C(kappa, abs_e);
        }
        CHECK(std::abs(sum - std::pow(tr, k)) < 1e-12 * std::max(1.0, mass));
    }
}

TEST_CASE("zonal symmetry under eigenvalue permutation") {
    RandomStream rng(101, 0);
    std::vector<double> e{0.3, 1.7, 0.9};
    for (const Partition& kappa : partitions(4, 3)) {
        const double base = zonal_C(kappa, e);
        std::vector<double> perm = e;
        std::sort(perm.begin(), perm.end());
        do {
            CHECK(zonal_C(kappa, perm) == doctest::Approx(base).epsilon(1e-12));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("hyp2f1_scalar basics") {
    CHECK(hyp2f1_scalar(1.3, 0.7, 2.1, 0.0).value() == doctest::Approx(1.0));
    // 2F1(1,1;2;x) = -ln(1-x)/x
    CHECK(hyp2f1_scalar(1, 1, 2, 0.5).value() ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(hyp2f1_scalar(0.5, 0.5, 1.5, 1e-8).value() == doctest::Approx(1.0).epsilon(1e-7));
    CHECK_THROWS_AS(hyp2f1_scalar(1, 1, 2, 1.0), DomainError);
}

TEST_CASE("hyp2f1_matrix basics") {
    SeriesParams sp{1.0, 1.0, 2.0, 30, 1e-10};
    CHECK(hyp2f1_matrix(sp, SymMatrix(Matrix::Zero(2, 2))).value() ==
          doctest::Approx(1.0));

    // p = 1 equals the scalar series
    const SymMatrix x(Matrix::Constant(1, 1, 0.5));
    CHECK(hyp2f1_matrix(sp, x).value() ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));

    // a = c: 2F1(c,1;c;X) = det(I - X)^{-1}
    Vector d(2);
    d << 0.5, 0.2;
    SeriesParams det_sp{1.7, 1.0, 1.7, 30, 1e-8};
    const EvalResult r = hyp2f1_matrix(det_sp, SymMatrix::diag(d));
    CHECK(r.value() == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("hyp2f1_matrix p = 1 collapse onto the scalar series") {
    RandomStream rng(102, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const double a = rng.uniform() * 3.0 - 1.0;
        const double b = rng.uniform() * 3.0;
        const double c = 0.5 + rng.uniform() * 3.0;
        const double x = (rng.uniform() * 1.4 - 0.7);
        SeriesParams sp{a, b, c, 300, 1e-14};
        const double matrix_val =
            hyp2f1_matrix(sp, SymMatrix(Matrix::Constant(1, 1, x))).value();
        const double scalar_val = hyp2f1_scalar(a, b, c, x, 1e-15, 400).value();
        CHECK(std::abs(matrix_val - scalar_val) <=
              1e-12 * std::max(1.0, std::abs(scalar_val)));
    }
}

TEST_CASE("determinant identity 1F0 via a = c at p = 3") {
    // 2F1(c, b; c; X) = det(I - X)^{-b}: exercises every partition weight
    // with nontrivial coefficients
    Vector d(3);
    d << 0.4, 0.1, -0.3;
    const double b = 2.5;
    SeriesParams sp{4.2, b, 4.2, 200, 1e-13};
    const EvalResult r = hyp2f1_matrix(sp, SymMatrix::diag(d));
    const double expected = std::pow((1 - 0.4) * (1 - 0.1) * (1 + 0.3), -b);
    CHECK(r.value() == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("negative-integer numerator terminates the series") {
    // (-1)_kappa vanishes for every kappa with first part >= 2, so only
    // vertical strips (1^m), m <= p survive: the series is a polynomial and
    // converges exactly at degree p
    Vector d(2);
    d << 0.3, 0.6;
    SeriesParams sp{-1.0, 1.3, 2.7, 30, 1e-30};
    const EvalResult r = hyp2f1_matrix(sp, SymMatrix::diag(d));
    CHECK(r.effort < 20);  // terminated early, not at max degree
    // analytic sum of the surviving terms:
    // 1 + (-1)(b/c) C_(1) + [(-1)(-1/2)] (b)_{11}/(c)_{11} C_{(1,1)} / 2
    const std::vector<double> e{0.3, 0.6};
    const double t1 = -1.0 * 1.3 / 2.7 * zonal_C(Partition{1}, e);
    const double t2 = gen_pochhammer(-1.0, Partition{1, 1}) *
                      gen_pochhammer(1.3, Partition{1, 1}) /
                      gen_pochhammer(2.7, Partition{1, 1}) *
                      zonal_C(Partition{1, 1}, e) / 2.0;
    CHECK(r.value() == doctest::Approx(1.0 + t1 + t2).epsilon(1e-12));
}

TEST_CASE("series error paths") {
    SeriesParams sp{1.0, 1.0, 2.0, 30, 1e-10};
    CHECK_THROWS_AS(hyp2f1_matrix(sp, SymMatrix::identity(2)), DomainError);
    SeriesParams slow{3.0, 3.0, 0.5, 3, 1e-12};
    CHECK_THROWS_AS(hyp2f1_matrix(slow, SymMatrix(Matrix::Constant(1, 1, 0.9))),
                    NotConverged);
    // denominator breakpoint: (c)_kappa = 0 with surviving numerator
    SeriesParams breakp{1.0, 1.0, 0.0, 30, 1e-10};
    CHECK_THROWS_AS(hyp2f1_matrix(breakp, SymMatrix(Matrix::Constant(1, 1, 0.4))),
                    DomainError);
}

TEST_CASE("representation consistency feeds the verifier") {
    // same value through different parameter orders (a <-> b symmetry)
    Vector d(2);
    d << 0.35, -0.15;
    SeriesParams s1{1.2, 0.8, 2.6, 60, 1e-13};
    SeriesParams s2{0.8, 1.2, 2.6, 60, 1e-13};
    const double v1 = hyp2f1_matrix(s1, SymMatrix::diag(d)).value();
    const double v2 = hyp2f1_matrix(s2, SymMatrix::diag(d)).value();
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
}

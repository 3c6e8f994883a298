#include <doctest.h>

#include <cmath>

#include "conewhit/errors.hpp"
#include "conewhit/random.hpp"

using namespace conewhit;

TEST_CASE("philox known-answer vectors") {
    // Random123 reference vectors for philox4x32-10
    {
        const auto out = detail::philox4x32_10({0, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        const auto out = detail::philox4x32_10(
            {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
            {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    {
        // counter and key from the digits of pi
        const auto out = detail::philox4x32_10(
            {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
            {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("streams are deterministic and substreams differ") {
    RandomStream a(42, 0), b(42, 0);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RandomStream c(42, 0);
    RandomStream s0 = c.substream(0), s1 = c.substream(1);
    CHECK(s0.stream() != s1.stream());
    CHECK(s0.next_u64() != s1.next_u64());

    // substream derivation is independent of parent consumption
    RandomStream d(42, 0);
    d.next_u64();
    CHECK(d.substream(0).stream() == s0.stream());
}

TEST_CASE("uniform stays inside the open interval") {
    RandomStream rng(7, 1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal moments") {
    RandomStream rng(7, 2);
    const int n = 200000;
    double s = 0, s2 = 0, s3 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
        s3 += x * x * x;
    }
    CHECK(std::abs(s / n) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(s2 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s3 / n) < 3.0 * std::sqrt(15.0 / n));
}

TEST_CASE("gamma moments across shapes") {
    RandomStream rng(7, 3);
    for (double shape : {0.4, 1.0, 2.5, 7.0}) {
        const int n = 100000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = rng.gamma(shape);
            s += x;
            s2 += x * x;
        }
        const double mean = s / n;
        const double var = s2 / n - mean * mean;
        // Var(mean) = shape/n, Var(sample var) ~ (2 shape (shape + 3))/n-ish
        CHECK(std::abs(mean - shape) < 4.0 * std::sqrt(shape / n));
        CHECK(std::abs(var - shape) < 5.0 * std::sqrt(2.0 * shape * (shape + 3.0) / n));
    }
    CHECK_THROWS_AS(rng.gamma(0.0), DomainError);
}

TEST_CASE("chi-square via gamma supports non-integer degrees") {
    RandomStream rng(7, 4);
    const double df = 3.7;
    const int n = 100000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += rng.chi_square(df);
    CHECK(std::abs(s / n - df) < 4.0 * std::sqrt(2.0 * df / n));
}

TEST_CASE("complex normal has unit second moment") {
    RandomStream rng(7, 5);
    const int n = 100000;
    double s2 = 0;
    std::complex<double> mean{0, 0};
    for (int i = 0; i < n; ++i) {
        const std::complex<double> z = rng.complex_normal();
        mean += z;
        s2 += std::norm(z);
    }
    CHECK(std::abs(mean) / n < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(s2 / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}

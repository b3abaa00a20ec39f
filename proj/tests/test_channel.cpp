#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bicm/channel.hpp"

using namespace bicm;

TEST_CASE("es_n0_to_n0") {
    CHECK(es_n0_to_n0(0.0) == doctest::Approx(1.0));
    CHECK(es_n0_to_n0(10.0) == doctest::Approx(0.1));
    CHECK(es_n0_to_n0(-10.0) == doctest::Approx(10.0));
}

TEST_CASE("eb_n0_db") {
    CHECK(eb_n0_db(6.02, 4.0) == doctest::Approx(0.0).epsilon(0.01));
    CHECK(eb_n0_db(3.77, 1.0) == doctest::Approx(3.77));
    CHECK(eb_n0_db(0.0, 2.0) == doctest::Approx(-3.01).epsilon(0.01));
    CHECK_THROWS(eb_n0_db(0.0, 0.0));
    CHECK_THROWS(eb_n0_db(0.0, -1.0));
}

TEST_CASE("RatePoint ties Eb/N0 to Es/N0 and rate") {
    const RatePoint p = make_rate_point(5.0, 2.0);
    CHECK(p.eb_n0_db == doctest::Approx(p.es_n0_db - 10.0 * std::log10(p.rate)).epsilon(1e-12));
}

TEST_CASE("add_noise moments match N0/2 per component") {
    const double n0 = 0.5;
    const ChannelSpec ch{n0, 2};
    RandomStream rs(42, 0);
    const std::vector<double> x = {0.25, -1.5};
    const std::size_t n = 1000000;
    std::vector<double> mean(2, 0.0), var(2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = add_noise(x, ch, rs);
        for (int d = 0; d < 2; ++d) {
            const double z = y[d] - x[d];
            mean[d] += z;
            var[d] += z * z;
        }
    }
    const double tol_mean = 4.0 * std::sqrt(n0 / 2.0 / static_cast<double>(n));
    for (int d = 0; d < 2; ++d) {
        mean[d] /= static_cast<double>(n);
        var[d] /= static_cast<double>(n);
        CHECK(std::abs(mean[d]) < tol_mean);
        CHECK(var[d] == doctest::Approx(n0 / 2.0).epsilon(0.01));
    }
}

TEST_CASE("vanishing noise leaves the input unchanged") {
    const ChannelSpec ch{1e-30, 3};
    RandomStream rs(7, 1);
    const std::vector<double> x = {1.0, -1.0, 0.5};
    const auto y = add_noise(x, ch, rs);
    for (int d = 0; d < 3; ++d) CHECK(std::abs(y[d] - x[d]) < 1e-14);
}

TEST_CASE("dimension mismatch is rejected") {
    const ChannelSpec ch{1.0, 4};
    RandomStream rs(1, 2);
    const std::vector<double> x = {1.0, 2.0};
    CHECK_THROWS(add_noise(x, ch, rs));
}

TEST_CASE("substreams are reproducible and order-independent") {
    std::vector<double> a, b;
    {
        RandomStream r1(99, 5), r2(99, 6);
        for (int i = 0; i < 16; ++i) {
            a.push_back(r1.gaussian());
            a.push_back(r2.gaussian());
        }
    }
    {
        RandomStream r2(99, 6), r1(99, 5); // construction order swapped
        std::vector<double> s1, s2;
        for (int i = 0; i < 16; ++i) s2.push_back(r2.gaussian());
        for (int i = 0; i < 16; ++i) s1.push_back(r1.gaussian());
        for (int i = 0; i < 16; ++i) {
            b.push_back(s1[i]);
            b.push_back(s2[i]);
        }
    }
    CHECK(a == b);

    RandomStream r1(99, 5), r1b(99, 5), other(100, 5);
    bool differs = false;
    for (int i = 0; i < 8; ++i) {
        const double v = r1.gaussian();
        CHECK(v == r1b.gaussian());
        if (v != other.gaussian()) differs = true;
    }
    CHECK(differs);
}

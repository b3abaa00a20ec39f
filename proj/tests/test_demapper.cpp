#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bicm/channel.hpp"
#include "bicm/demapper.hpp"
#include "bicm/rng.hpp"

using namespace bicm;

namespace {

std::string data_dir() { return BICM_SOURCE_DIR; }

std::vector<double> random_vector(RandomStream& rs, int dims, double spread) {
    std::vector<double> y(static_cast<std::size_t>(dims));
    for (double& v : y) v = spread * rs.gaussian();
    return y;
}

} // namespace

TEST_CASE("2-PAM exact LLR matches the closed form -4ay/N0") {
    const Constellation pam = make_cartesian(make_pam(2), 1, "2pam");
    const std::vector<double> y = {0.5};
    const auto l = llr_exact(pam, y, 1.0);
    REQUIRE(l.size() == 1);
    CHECK(l[0] == doctest::Approx(-2.0).epsilon(1e-12));

    const std::vector<double> zero = {0.0};
    CHECK(llr_exact(pam, zero, 1.0)[0] == doctest::Approx(0.0));

    // maxlog degenerates to the same single-term expression
    CHECK(llr_maxlog(pam, y, 1.0)[0] == doctest::Approx(l[0]).epsilon(1e-12));
}

TEST_CASE("factorized equals exact for PM-QPSK") {
    const auto rc = resolve_constellation("pm-qpsk", data_dir());
    RandomStream rs(11, 0);
    const double n0 = es_n0_to_n0(3.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto y = random_vector(rs, 4, 1.0);
        const auto ex = llr_exact(rc.constellation, y, n0);
        const auto fa = llr_factorized(*rc.dim_pam, y, n0);
        REQUIRE(fa.size() == ex.size());
        for (std::size_t k = 0; k < ex.size(); ++k)
            CHECK(std::abs(ex[k] - fa[k]) < 1e-9);
    }
}

TEST_CASE("factorized equals exact for PM-16QAM") {
    const auto rc = resolve_constellation("pm-16qam", data_dir());
    RandomStream rs(12, 0);
    const double n0 = es_n0_to_n0(8.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto y = random_vector(rs, 4, 1.0);
        const auto ex = llr_exact(rc.constellation, y, n0);
        const auto fa = llr_factorized(*rc.dim_pam, y, n0);
        for (std::size_t k = 0; k < ex.size(); ++k)
            CHECK(std::abs(ex[k] - fa[k]) < 1e-9);
    }
}

TEST_CASE("4-PAM dimension of the factorized demapper matches 1-D exact") {
    const PamAlphabet pam = make_pam(4);
    Constellation pam1d;
    pam1d.name = "4pam";
    pam1d.dims = 1;
    pam1d.points = pam.levels;
    pam1d.labels = pam.labels;
    RandomStream rs(13, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<double> y = {1.5 * rs.gaussian()};
        const auto ex = llr_exact(pam1d, y, 0.3);
        const auto fa = llr_factorized(pam, y, 0.3);
        REQUIRE(fa.size() == 2);
        CHECK(fa[0] == doctest::Approx(ex[0]).epsilon(1e-12));
        CHECK(fa[1] == doctest::Approx(ex[1]).epsilon(1e-12));
    }
}

TEST_CASE("maxlog keeps the exact sign at high SNR") {
    const auto rc = resolve_constellation("pm-qpsk", data_dir());
    RandomStream rs(14, 0);
    const double n0 = es_n0_to_n0(15.0);
    for (int trial = 0; trial < 10000; ++trial) {
        // received point = random symbol + noise
        const int idx = static_cast<int>(rs.next_u64() % 16);
        std::vector<double> y(4);
        for (int d = 0; d < 4; ++d)
            y[static_cast<std::size_t>(d)] =
                rc.constellation.point(idx)[d] + std::sqrt(n0 / 2.0) * rs.gaussian();
        const auto ex = llr_exact(rc.constellation, y, n0);
        const auto ml = llr_maxlog(rc.constellation, y, n0);
        for (std::size_t k = 0; k < ex.size(); ++k)
            CHECK(std::signbit(ex[k]) == std::signbit(ml[k]));
    }
}

TEST_CASE("maxlog deviates from exact for multi-point classes") {
    const auto c416 = resolve_constellation("c4_16", data_dir()).constellation;
    RandomStream rs(15, 0);
    const double n0 = es_n0_to_n0(0.0);
    double mad = 0.0;
    const int trials = 2000;
    for (int trial = 0; trial < trials; ++trial) {
        const auto y = random_vector(rs, 4, 1.0);
        const auto ex = llr_exact(c416, y, n0);
        const auto ml = llr_maxlog(c416, y, n0);
        for (std::size_t k = 0; k < ex.size(); ++k) mad += std::abs(ex[k] - ml[k]);
    }
    mad /= trials * 4;
    CHECK(mad > 1e-3);
}

TEST_CASE("sigmoid of the exact LLR is the bit posterior") {
    const auto c416 = resolve_constellation("c4_16", data_dir()).constellation;
    RandomStream rs(16, 0);
    const double n0 = 1.0;
    const int m = c416.bits();
    for (int trial = 0; trial < 500; ++trial) {
        const auto y = random_vector(rs, 4, 0.8);
        const auto llr = llr_exact(c416, y, n0);
        // posterior from the raw class sums
        std::vector<double> p1(static_cast<std::size_t>(m), 0.0);
        double total = 0.0;
        for (int j = 0; j < c416.num_points(); ++j) {
            double d2 = 0.0;
            for (int d = 0; d < 4; ++d) {
                const double diff = y[static_cast<std::size_t>(d)] - c416.point(j)[d];
                d2 += diff * diff;
            }
            const double w = std::exp(-d2 / n0);
            total += w;
            for (int k = 1; k <= m; ++k)
                if (label_bit(c416.labels[static_cast<std::size_t>(j)], k, m))
                    p1[static_cast<std::size_t>(k - 1)] += w;
        }
        for (int k = 0; k < m; ++k) {
            if (std::abs(llr[static_cast<std::size_t>(k)]) >= kLlrClip) continue;
            const double sigmoid = 1.0 / (1.0 + std::exp(-llr[static_cast<std::size_t>(k)]));
            CHECK(sigmoid == doctest::Approx(p1[static_cast<std::size_t>(k)] / total)
                                 .epsilon(1e-9));
        }
    }
}

TEST_CASE("negating y negates every LLR for PM-QPSK") {
    const auto rc = resolve_constellation("pm-qpsk", data_dir());
    RandomStream rs(17, 0);
    for (int trial = 0; trial < 200; ++trial) {
        auto y = random_vector(rs, 4, 1.0);
        const auto a = llr_exact(rc.constellation, y, 0.5);
        for (double& v : y) v = -v;
        const auto b = llr_exact(rc.constellation, y, 0.5);
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(a[k] == doctest::Approx(-b[k]).epsilon(1e-12));
    }
}

TEST_CASE("noiseless factorized LLR signs reproduce the label") {
    const auto rc = resolve_constellation("pm-qpsk", data_dir());
    const auto& c = rc.constellation;
    const int m = c.bits();
    for (int i = 0; i < c.num_points(); ++i) {
        const auto l = llr_factorized(*rc.dim_pam, c.point(i), 0.1);
        for (int k = 1; k <= m; ++k) {
            const int bit = label_bit(c.labels[static_cast<std::size_t>(i)], k, m);
            CHECK((l[static_cast<std::size_t>(k - 1)] > 0) == (bit == 1));
        }
    }
}

TEST_CASE("LLRs are clipped") {
    const Constellation pam = make_cartesian(make_pam(2), 1, "2pam");
    const std::vector<double> y = {1000.0};
    CHECK(llr_exact(pam, y, 0.01)[0] == doctest::Approx(-kLlrClip));
    CHECK(llr_maxlog(pam, y, 0.01)[0] == doctest::Approx(-kLlrClip));
}

TEST_CASE("demap_block layout and errors") {
    const auto rc = resolve_constellation("pm-qpsk", data_dir());
    RandomStream rs(18, 0);
    std::vector<double> ys;
    for (int i = 0; i < 8; ++i) ys.push_back(rs.gaussian());
    const auto llrs = demap_block(rc, ys, 0.5, DemapMode::exact);
    REQUIRE(llrs.size() == 8); // two symbols, four bits each
    const auto first = llr_exact(rc.constellation, std::span(ys).subspan(0, 4), 0.5);
    for (int k = 0; k < 4; ++k) CHECK(llrs[static_cast<std::size_t>(k)] ==
                                      doctest::Approx(first[static_cast<std::size_t>(k)]));

    std::vector<double> bad(ys.begin(), ys.begin() + 6);
    CHECK_THROWS(demap_block(rc, bad, 0.5, DemapMode::exact));

    const auto c416 = resolve_constellation("c4_16", data_dir());
    CHECK_THROWS(demap_block(c416, ys, 0.5, DemapMode::factorized));

    const std::vector<double> y = {1.0, 0.0};
    CHECK_THROWS(llr_exact(rc.constellation, y, 0.5)); // dims mismatch
    const std::vector<double> y4 = {1.0, 0.0, 0.0, 0.0};
    CHECK_THROWS(llr_exact(rc.constellation, y4, 0.0)); // bad n0
}

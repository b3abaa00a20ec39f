#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bicm/constellation.hpp"
#include "bicm/labeling.hpp"
#include "bicm/rates.hpp"
#include "bicm/rng.hpp"
#include "oracle.hpp"

using namespace bicm;

namespace {

std::string data_dir() { return BICM_SOURCE_DIR; }

Constellation pm_qpsk() { return make_cartesian(make_pam(2), 4, "pm-qpsk"); }

std::vector<std::uint32_t> shuffled_labels(const Constellation& c, std::uint64_t seed) {
    std::vector<std::uint32_t> labels = c.labels;
    RandomStream rs(seed, 0);
    for (std::size_t i = labels.size() - 1; i > 0; --i)
        std::swap(labels[i], labels[rs.next_u64() % (i + 1)]);
    return labels;
}

} // namespace

TEST_CASE("quadrature MI matches the Simpson oracle for scalar 2-PAM") {
    const Constellation pam = make_cartesian(make_pam(2), 1, "2pam");
    const QuadratureGrid grid = make_grid(10, 1);
    for (double es : {-10.0, -3.0, 0.0, 3.0, 6.0, 10.0}) {
        const double n0 = es_n0_to_n0(es);
        const double engine = mi(pam, {n0, 1}, grid);
        const double reference = oracle::mi_1d({1.0, -1.0}, n0);
        CHECK(engine == doctest::Approx(reference).epsilon(1e-8));
    }
}

TEST_CASE("PM-QPSK MI factorizes into four 2-PAM channels") {
    const Constellation qpsk = pm_qpsk();
    const QuadratureGrid grid = make_grid(10, 4);
    for (double es : {-5.0, 0.0, 5.0, 10.0}) {
        const double n0 = es_n0_to_n0(es);
        // Per-dimension amplitude 1/2 with noise N0/2 is unit 2-PAM at 4 N0.
        const double ref = 4.0 * oracle::mi_1d({1.0, -1.0}, 4.0 * n0);
        CHECK(mi(qpsk, {n0, 4}, grid) == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("PM-QPSK per-bit MI equals the per-dimension 2-PAM MI") {
    const Constellation qpsk = pm_qpsk();
    const QuadratureGrid grid = make_grid(10, 4);
    for (double es : {0.0, 5.0}) {
        const double n0 = es_n0_to_n0(es);
        const double ref = oracle::mi_1d({1.0, -1.0}, 4.0 * n0);
        for (int k = 1; k <= 4; ++k)
            CHECK(bit_mi(qpsk, k, {n0, 4}, grid) == doctest::Approx(ref).epsilon(1e-6));
    }
    CHECK_THROWS(bit_mi(qpsk, 0, {1.0, 4}, grid));
    CHECK_THROWS(bit_mi(qpsk, 5, {1.0, 4}, grid));
}

TEST_CASE("PM-16QAM MI and GMI factorize into 4-PAM quantities") {
    const Constellation qam = make_cartesian(make_pam(4), 4, "pm-16qam");
    const QuadratureGrid grid = make_grid(10, 4);
    const PamAlphabet pam = make_pam(4);
    const std::vector<double> levels(pam.levels.begin(), pam.levels.end());
    for (double es : {4.0, 10.0}) {
        const double n0 = es_n0_to_n0(es);
        const RateEval e = eval_rates_quadrature(qam, n0, grid, 0);
        const double ref_mi = 4.0 * oracle::mi_1d(levels, 4.0 * n0);
        CHECK(e.mi == doctest::Approx(ref_mi).epsilon(1e-6));
        const double ref_gmi = 4.0 * (oracle::bit_mi_1d(levels, pam.labels, 1, 4.0 * n0) +
                                      oracle::bit_mi_1d(levels, pam.labels, 2, 4.0 * n0));
        CHECK(e.gmi == doctest::Approx(ref_gmi).epsilon(1e-6));
    }
}

TEST_CASE("MI limits") {
    const Constellation qpsk = pm_qpsk();
    const QuadratureGrid grid = make_grid(10, 4);
    CHECK(mi(qpsk, {es_n0_to_n0(-40.0), 4}, grid) < 0.01);
    CHECK(mi(qpsk, {es_n0_to_n0(25.0), 4}, grid) > 3.999);
    CHECK(bit_mi(qpsk, 2, {es_n0_to_n0(-40.0), 4}, grid) < 0.01);
    CHECK(bit_mi(qpsk, 2, {es_n0_to_n0(30.0), 4}, grid) > 0.999);
}

TEST_CASE("PM-QPSK pays no bit-wise penalty") {
    const Constellation qpsk = pm_qpsk();
    const QuadratureGrid grid = make_grid(10, 4);
    for (double es = -10.0; es <= 16.0; es += 2.0) {
        const RateEval e = eval_rates_quadrature(qpsk, es_n0_to_n0(es), grid, 0);
        CHECK(std::abs(e.mi - e.gmi) < 2e-3);
    }
}

TEST_CASE("chain rule: gmi <= mi for random labelings") {
    Constellation qpsk = pm_qpsk();
    const QuadratureGrid grid = make_grid(10, 4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        qpsk.labels = shuffled_labels(qpsk, seed);
        for (double es : {-5.0, 2.0, 8.0}) {
            const RateEval e = eval_rates_quadrature(qpsk, es_n0_to_n0(es), grid, 0);
            CHECK(e.gmi <= e.mi + 2e-3);
        }
    }
}

TEST_CASE("MI ignores the labeling") {
    const Constellation qpsk = pm_qpsk();
    Constellation shuffled = qpsk;
    shuffled.labels = shuffled_labels(qpsk, 99);
    const QuadratureGrid grid = make_grid(10, 4);
    const double n0 = es_n0_to_n0(4.0);
    CHECK(mi(qpsk, {n0, 4}, grid) == doctest::Approx(mi(shuffled, {n0, 4}, grid)).epsilon(1e-12));
}

TEST_CASE("mi and gmi are non-decreasing in SNR") {
    const auto c416 = resolve_constellation("c4_16", data_dir()).constellation;
    RateCurveConfig cfg;
    cfg.es_n0_db_grid = snr_grid(-10.0, 14.0, 2.0);
    cfg.threads = 0;
    const RateCurve curve = rate_curve(c416, cfg);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].mi >= curve.points[i - 1].mi - 1e-9);
        CHECK(curve.points[i].gmi >= curve.points[i - 1].gmi - 1e-9);
    }
}

TEST_CASE("quadrature order 10 agrees with order 14") {
    const QuadratureGrid g10_4 = make_grid(10, 4);
    const QuadratureGrid g14_4 = make_grid(14, 4);
    for (const auto& name : builtin_constellation_names()) {
        const auto c = resolve_constellation(name, data_dir()).constellation;
        for (double es : {-10.0, 3.0, 15.0}) {
            const double n0 = es_n0_to_n0(es);
            const double a = mi(c, {n0, c.dims}, g10_4, 0);
            const double b = mi(c, {n0, c.dims}, g14_4, 0);
            CHECK(std::abs(a - b) < 1e-4);
        }
    }
}

TEST_CASE("Monte Carlo estimator agrees with quadrature") {
    const Constellation qpsk = pm_qpsk();
    const ChannelSpec ch{es_n0_to_n0(0.0), 4};
    const QuadratureGrid grid = make_grid(10, 4);
    const double mi_q = mi(qpsk, ch, grid, 0);
    const double gmi_q = gmi(qpsk, ch, grid, 0);
    const McEstimate mi_mc = mi_montecarlo(qpsk, ch, 1000000, 7, 0);
    const McEstimate gmi_mc = gmi_montecarlo(qpsk, ch, 1000000, 7, 0);
    CHECK(std::abs(mi_mc.value - mi_q) < 3.0 * mi_mc.standard_error);
    CHECK(std::abs(gmi_mc.value - gmi_q) < 3.0 * gmi_mc.standard_error);
    CHECK(mi_mc.standard_error > 0.0);
}

TEST_CASE("Monte Carlo vanishes in heavy noise and is seed-deterministic") {
    const Constellation qpsk = pm_qpsk();
    const ChannelSpec ch{es_n0_to_n0(-35.0), 4};
    const McEstimate a = mi_montecarlo(qpsk, ch, 200000, 3, 0);
    CHECK(a.value < std::max(0.01, 3.0 * a.standard_error));
    const McEstimate b = mi_montecarlo(qpsk, ch, 200000, 3, 0);
    CHECK(a.value == b.value);
    CHECK(a.standard_error == b.standard_error);
    const McEstimate c = mi_montecarlo(qpsk, ch, 200000, 4, 0);
    CHECK(a.value != c.value);
    CHECK_THROWS(mi_montecarlo(qpsk, ch, 10, 1, 0)); // below minimum samples
}

TEST_CASE("shannon_capacity") {
    CHECK(shannon_capacity(0.0, 4) == doctest::Approx(2.0 * std::log2(1.5)).epsilon(1e-12));
    for (double es : {-7.0, -1.0, 2.5, 8.0, 14.0}) {
        const double expect = 2.0 * std::log2(1.0 + 0.5 * std::pow(10.0, es / 10.0));
        CHECK(shannon_capacity(es, 4) == doctest::Approx(expect).epsilon(1e-12));
        const double expect2 = std::log2(1.0 + std::pow(10.0, es / 10.0));
        CHECK(shannon_capacity(es, 2) == doctest::Approx(expect2).epsilon(1e-12));
    }
    CHECK(shannon_capacity(-400.0, 4) == doctest::Approx(0.0));
    CHECK_THROWS(shannon_capacity(0.0, 3));
    CHECK_THROWS(shannon_capacity(0.0, 0));

    // R -> 0 limit of Eb/N0 is ln 2 = -1.59 dB.
    const double es = -40.0;
    const double r = shannon_capacity(es, 4);
    CHECK(eb_n0_db(es, r) == doctest::Approx(-1.59).epsilon(0.05));
}

TEST_CASE("no overflow or NaN across the full SNR span") {
    const auto c416 = resolve_constellation("c4_16", data_dir()).constellation;
    const QuadratureGrid grid = make_grid(10, 4);
    for (double es = -40.0; es <= 40.0; es += 10.0) {
        const RateEval e = eval_rates_quadrature(c416, es_n0_to_n0(es), grid, 0);
        CHECK(std::isfinite(e.mi));
        CHECK(std::isfinite(e.gmi));
        CHECK(e.mi >= 0.0);
        CHECK(e.mi <= 4.0);
        CHECK(e.gmi <= e.mi + 2e-3);
        for (double b : e.bit_mi) {
            CHECK(std::isfinite(b));
            CHECK(b >= 0.0);
            CHECK(b <= 1.0);
        }
    }
}

TEST_CASE("grid dims must match constellation dims") {
    const Constellation qpsk = pm_qpsk();
    CHECK_THROWS(mi(qpsk, {1.0, 4}, make_grid(10, 2)));
}

TEST_CASE("rate_curve assembly and CSV schema") {
    const Constellation qpsk = pm_qpsk();
    RateCurveConfig cfg;
    cfg.es_n0_db_grid = {0.0, 2.0, 4.0};
    cfg.quad_order = 8;
    const RateCurve curve = rate_curve(qpsk, cfg);
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points[1].es_n0_db == doctest::Approx(2.0));
    CHECK(curve.points[0].bit_mi.size() == 4);

    std::ostringstream os;
    write_rate_curve_csv(os, curve);
    const std::string csv = os.str();
    CHECK(csv.find("es_n0_db,eb_n0_db_mi,eb_n0_db_gmi,mi,gmi,bit_mi_1,bit_mi_2,bit_mi_3,bit_mi_4,"
                   "method,precision") == 0);
    CHECK(csv.find("order=8") != std::string::npos);

    RateCurveConfig bad;
    CHECK_THROWS(rate_curve(qpsk, bad)); // empty grid
}

TEST_CASE("snr_grid") {
    const auto g = snr_grid(-10.0, 16.0, 0.25);
    CHECK(g.size() == 105);
    CHECK(g.front() == doctest::Approx(-10.0));
    CHECK(g.back() == doctest::Approx(16.0));
    CHECK_THROWS(snr_grid(0.0, 10.0, 0.0));
    CHECK_THROWS(snr_grid(10.0, 0.0, 1.0));
}

TEST_CASE("find_crossing") {
    // Synthetic curves with a known geometry: identical and offset curves
    // never cross; two lines with different slopes in (Es/N0, R) do.
    auto make_curve = [](double slope, double intercept) {
        RateCurve c;
        for (double es = 0.0; es <= 10.0; es += 0.5) {
            RateRecord r;
            r.es_n0_db = es;
            r.mi = slope * es + intercept;
            r.gmi = r.mi;
            c.points.push_back(r);
        }
        return c;
    };
    const RateCurve a = make_curve(0.40, 0.50);
    CHECK_FALSE(find_crossing(a, a, RateKind::gmi).has_value());

    const RateCurve b = make_curve(0.40, 0.80); // parallel offset
    CHECK_FALSE(find_crossing(a, b, RateKind::gmi).has_value());

    const RateCurve c = make_curve(0.35, 0.80);
    const auto r = find_crossing(a, c, RateKind::gmi);
    REQUIRE(r.has_value());
    // In (Es/N0, R) the lines meet at es = 6, R = 2.9; the Eb/N0-plane
    // crossing of the same two polylines sits nearby.
    CHECK(*r > 2.0);
    CHECK(*r < 3.6);

    RateCurve other = a;
    other.points.pop_back();
    CHECK_THROWS(find_crossing(a, other, RateKind::gmi));
}

TEST_CASE("snr_at_rate interpolates") {
    RateCurve c;
    for (double es = 0.0; es <= 4.0; es += 1.0) {
        RateRecord r;
        r.es_n0_db = es;
        r.gmi = 0.5 * es;
        r.mi = r.gmi;
        c.points.push_back(r);
    }
    const auto s = snr_at_rate(c, RateKind::gmi, 1.25);
    REQUIRE(s.has_value());
    CHECK(*s == doctest::Approx(2.5));
    CHECK_FALSE(snr_at_rate(c, RateKind::gmi, 5.0).has_value());
}

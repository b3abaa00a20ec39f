#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bicm/channel.hpp"
#include "bicm/constellation.hpp"
#include "bicm/quadrature.hpp"

namespace bicm {

enum class RateMethod { quadrature, montecarlo };

/// MI, per-bit MI and GMI of one constellation at one noise level, plus
/// standard errors when the Monte Carlo estimator produced the values.
struct RateEval {
    double mi = 0.0;
    std::vector<double> bit_mi;
    double gmi = 0.0;
    double mi_se = 0.0;
    double gmi_se = 0.0;
};

/// Evaluates MI, every I(B_k;Y) and the GMI in one pass of tensor
/// Gauss-Hermite quadrature (substitution Z = sqrt(N0) t per dimension).
/// Values are clamped to [0, m] / [0, 1].
RateEval eval_rates_quadrature(const Constellation& c, double n0, const QuadratureGrid& grid,
                               unsigned threads = 1);

/// Monte Carlo counterpart, stratified over transmitted symbols; the same
/// expectations estimated from `samples` noise draws in total. Reproducible:
/// stratum i uses substream (seed, i).
RateEval eval_rates_montecarlo(const Constellation& c, double n0, std::uint64_t samples,
                               std::uint64_t seed, unsigned threads = 1);

/// I(X;Y) in bit/symbol.
double mi(const Constellation& c, const ChannelSpec& ch, const QuadratureGrid& grid,
          unsigned threads = 1);

/// I(B_k;Y) for 1 <= k <= m.
double bit_mi(const Constellation& c, int k, const ChannelSpec& ch, const QuadratureGrid& grid,
              unsigned threads = 1);

/// Sum of I(B_k;Y) over all bit positions.
double gmi(const Constellation& c, const ChannelSpec& ch, const QuadratureGrid& grid,
           unsigned threads = 1);

struct McEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

McEstimate mi_montecarlo(const Constellation& c, const ChannelSpec& ch, std::uint64_t samples,
                         std::uint64_t seed, unsigned threads = 1);
McEstimate gmi_montecarlo(const Constellation& c, const ChannelSpec& ch, std::uint64_t samples,
                          std::uint64_t seed, unsigned threads = 1);

/// Capacity of N real AWGN dimensions (N even) with total power Es = 1:
/// (N/2) log2(1 + (2/N)/N0) bit/symbol.
double shannon_capacity(double es_n0_db, int dims);

/// Rate results over an SNR grid.
struct RateRecord {
    double es_n0_db = 0.0;
    double mi = 0.0;
    double gmi = 0.0;
    std::vector<double> bit_mi;
    double mi_se = 0.0;
    double gmi_se = 0.0;
};

struct RateCurve {
    std::string constellation;
    RateMethod method = RateMethod::quadrature;
    int quad_order = 0;
    std::uint64_t samples = 0;
    std::vector<RateRecord> points;
};

struct RateCurveConfig {
    std::vector<double> es_n0_db_grid;
    RateMethod method = RateMethod::quadrature;
    int quad_order = 10;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

RateCurve rate_curve(const Constellation& c, const RateCurveConfig& cfg);

/// Uniformly spaced SNR grid, inclusive of both endpoints (within rounding).
std::vector<double> snr_grid(double start_db, double stop_db, double step_db);

enum class RateKind { mi, gmi };

/// Rate at which two curves cross in the (Eb/N0, R) plane, with R taken from
/// the selected rate column. Both curves must share the Es/N0 grid. Empty
/// when the difference never changes sign.
std::optional<double> find_crossing(const RateCurve& a, const RateCurve& b, RateKind which);

/// Es/N0 (dB) at which the selected rate column first reaches `rate`,
/// linearly interpolated; empty when the curve never reaches it.
std::optional<double> snr_at_rate(const RateCurve& curve, RateKind which, double rate);

/// CSV emission: header plus one row per grid point, columns
/// es_n0_db, eb_n0_db_mi, eb_n0_db_gmi, mi, gmi, bit_mi_1..bit_mi_m,
/// method, precision.
void write_rate_curve_csv(std::ostream& out, const RateCurve& curve);

} // namespace bicm

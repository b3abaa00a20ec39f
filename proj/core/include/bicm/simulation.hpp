#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bicm/constellation.hpp"
#include "bicm/demapper.hpp"
#include "bicm/ldpc.hpp"
#include "bicm/rates.hpp"

namespace bicm {

/// End-to-end coded BER run: info bits -> LDPC encode -> mapper -> AWGN ->
/// LLR demapper (true N0) -> sum-product decoder -> info-bit error count.
struct SimConfig {
    ResolvedConstellation constellation;
    LdpcCode code;
    std::string code_name;
    DemapMode demapper = DemapMode::exact;
    std::vector<double> es_n0_db_grid;
    std::uint64_t max_blocks = 20000;
    std::uint64_t min_bit_errors = 100;
    int max_iterations = 50;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;
};

struct SimPoint {
    double es_n0_db = 0.0;
    std::uint64_t blocks = 0;
    std::uint64_t info_bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double mean_iterations = 0.0;
    double wall_seconds = 0.0;
};

struct SimResult {
    std::string constellation;
    std::string code_name;
    int code_n = 0;
    int code_k = 0;
    double code_rate = 0.0;
    double transmission_rate = 0.0; ///< R = Rc * m, bit/symbol
    std::string demapper;
    std::uint64_t master_seed = 0;
    std::uint64_t max_blocks = 0;
    std::uint64_t min_bit_errors = 0;
    int max_iterations = 0;
    std::vector<SimPoint> points;
};

/// Coded bits to symbol indices, m bits per symbol, first bit of each group
/// feeding B_1 (the most significant label bit). Throws when the stream
/// length is not divisible by m.
std::vector<int> map_bits_to_indices(const Constellation& c, std::span<const std::uint8_t> bits);

/// Same mapping emitted as flat symbol coordinates (length symbols * dims).
std::vector<double> map_bits_to_symbols(const Constellation& c,
                                        std::span<const std::uint8_t> bits);

/// Runs the Monte Carlo BER sweep. Deterministic for a fixed config: block b
/// of grid point p draws all its randomness from substream
/// (master_seed, p * 2^32 + b), blocks are accounted in index order, and a
/// point stops after the first block prefix reaching min_bit_errors (or at
/// max_blocks). The result is independent of the worker count.
SimResult run_ber(const SimConfig& cfg);

/// SNR where the curve's GMI equals the transmission rate Rc*m, and the gap
/// from `measured_waterfall_db` to it. Throws when the curve never reaches
/// the rate.
struct ThresholdReport {
    double rate = 0.0;             ///< Rc * m
    double threshold_es_n0_db = 0; ///< GMI crossing of the rate
    double measured_es_n0_db = 0;
    double gap_db = 0.0;
};

ThresholdReport gmi_threshold_check(const RateCurve& curve, double code_rate,
                                    double measured_waterfall_db);

/// CSV: es_n0_db, blocks, info_bits, bit_errors, ber, frame_errors, fer,
/// mean_iters.
void write_sim_csv(std::ostream& out, const SimResult& result);

/// JSON document with the full configuration echo plus per-point records.
std::string sim_result_json(const SimResult& result);

} // namespace bicm

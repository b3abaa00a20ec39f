#include "bicm/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "bicm/channel.hpp"
#include "bicm/parallel.hpp"
#include "bicm/rng.hpp"

#include <json.hpp>

namespace bicm {

namespace {

const char* demap_name(DemapMode m) {
    switch (m) {
        case DemapMode::exact: return "exact";
        case DemapMode::maxlog: return "maxlog";
        case DemapMode::factorized: return "factorized";
    }
    return "?";
}

struct BlockOutcome {
    std::uint64_t bit_errors = 0;
    bool frame_error = false;
    int iterations = 0;
};

} // namespace

std::vector<int> map_bits_to_indices(const Constellation& c, std::span<const std::uint8_t> bits) {
    const int m = c.bits();
    if (bits.size() % static_cast<std::size_t>(m) != 0)
        throw std::invalid_argument("bit stream length not divisible by bits per symbol");
    const std::size_t M = c.labels.size();
    std::vector<int> index_of_label(M);
    for (std::size_t i = 0; i < M; ++i) index_of_label[c.labels[i]] = static_cast<int>(i);

    const std::size_t n_sym = bits.size() / static_cast<std::size_t>(m);
    std::vector<int> out(n_sym);
    for (std::size_t s = 0; s < n_sym; ++s) {
        std::uint32_t label = 0;
        for (int k = 0; k < m; ++k)
            label = (label << 1) | (bits[s * static_cast<std::size_t>(m) +
                                         static_cast<std::size_t>(k)] &
                                    1u);
        out[s] = index_of_label[label];
    }
    return out;
}

std::vector<double> map_bits_to_symbols(const Constellation& c,
                                        std::span<const std::uint8_t> bits) {
    const std::vector<int> idx = map_bits_to_indices(c, bits);
    std::vector<double> sym(idx.size() * static_cast<std::size_t>(c.dims));
    for (std::size_t s = 0; s < idx.size(); ++s)
        for (int d = 0; d < c.dims; ++d)
            sym[s * static_cast<std::size_t>(c.dims) + static_cast<std::size_t>(d)] =
                c.points[static_cast<std::size_t>(idx[s]) * c.dims + d];
    return sym;
}

SimResult run_ber(const SimConfig& cfg) {
    const Constellation& c = cfg.constellation.constellation;
    const LdpcCode& code = cfg.code;
    const int m = c.bits();
    if (cfg.es_n0_db_grid.empty()) throw std::invalid_argument("empty SNR grid");
    if (cfg.min_bit_errors < 1) throw std::invalid_argument("min_bit_errors must be >= 1");
    if (code.n % m != 0)
        throw std::invalid_argument("code length " + std::to_string(code.n) +
                                    " not divisible by bits per symbol " + std::to_string(m));
    if (cfg.max_blocks >= (1ull << 32))
        throw std::invalid_argument("max_blocks must fit 32 bits");
    if (cfg.demapper == DemapMode::factorized && !cfg.constellation.dim_pam)
        throw std::invalid_argument(
            "factorized demapper requires a Gray Cartesian product constellation");

    SimResult result;
    result.constellation = c.name;
    result.code_name = cfg.code_name;
    result.code_n = code.n;
    result.code_k = code.k();
    result.code_rate = code.rate();
    result.transmission_rate = code.rate() * m;
    result.demapper = demap_name(cfg.demapper);
    result.master_seed = cfg.master_seed;
    result.max_blocks = cfg.max_blocks;
    result.min_bit_errors = cfg.min_bit_errors;
    result.max_iterations = cfg.max_iterations;

    const int k = code.k();
    const unsigned threads = effective_threads(cfg.threads);
    const std::uint64_t wave = std::max<std::uint64_t>(std::uint64_t{threads} * 4, 8);

    for (std::size_t p = 0; p < cfg.es_n0_db_grid.size(); ++p) {
        const double es_db = cfg.es_n0_db_grid[p];
        const double n0 = es_n0_to_n0(es_db);
        const auto t0 = std::chrono::steady_clock::now();

        SimPoint point;
        point.es_n0_db = es_db;
        std::uint64_t iter_sum = 0;
        std::uint64_t done = 0;
        bool stop = false;

        std::vector<BlockOutcome> outcomes(wave);
        while (!stop && done < cfg.max_blocks) {
            const std::uint64_t batch = std::min<std::uint64_t>(wave, cfg.max_blocks - done);
            parallel_for_chunks(0, batch, threads, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t b = lo; b < hi; ++b) {
                    const std::uint64_t block_idx = done + b;
                    RandomStream rs(cfg.master_seed,
                                    (static_cast<std::uint64_t>(p) << 32) | block_idx);
                    std::vector<std::uint8_t> info(static_cast<std::size_t>(k));
                    for (auto& bit : info) bit = static_cast<std::uint8_t>(rs.bit());
                    const std::vector<std::uint8_t> cw = encode(code, info);
                    std::vector<double> sym = map_bits_to_symbols(c, cw);
                    add_noise_inplace(sym, n0, rs);
                    const std::vector<double> llrs =
                        demap_block(cfg.constellation, sym, n0, cfg.demapper);
                    const DecodeResult dec = decode_bp(code, llrs, cfg.max_iterations);

                    BlockOutcome& out = outcomes[b];
                    out = {};
                    out.iterations = dec.iterations;
                    for (int j = 0; j < k; ++j) {
                        const auto col = static_cast<std::size_t>(
                            code.info_cols[static_cast<std::size_t>(j)]);
                        if (dec.bits[col] != cw[col]) ++out.bit_errors;
                    }
                    out.frame_error = out.bit_errors > 0;
                }
            });
            // Blocks count toward the point in index order; the first prefix
            // reaching the error target ends the point regardless of how
            // many blocks the wave speculatively computed.
            for (std::uint64_t b = 0; b < batch; ++b) {
                const BlockOutcome& out = outcomes[b];
                ++point.blocks;
                point.info_bits += static_cast<std::uint64_t>(k);
                point.bit_errors += out.bit_errors;
                point.frame_errors += out.frame_error ? 1 : 0;
                iter_sum += static_cast<std::uint64_t>(out.iterations);
                if (point.bit_errors >= cfg.min_bit_errors) {
                    stop = true;
                    break;
                }
            }
            done += batch;
        }

        point.ber = point.info_bits ? static_cast<double>(point.bit_errors) /
                                          static_cast<double>(point.info_bits)
                                    : 0.0;
        point.fer = point.blocks ? static_cast<double>(point.frame_errors) /
                                       static_cast<double>(point.blocks)
                                 : 0.0;
        point.mean_iterations = point.blocks ? static_cast<double>(iter_sum) /
                                                   static_cast<double>(point.blocks)
                                             : 0.0;
        point.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.points.push_back(point);
    }
    return result;
}

ThresholdReport gmi_threshold_check(const RateCurve& curve, double code_rate,
                                    double measured_waterfall_db) {
    if (curve.points.empty()) throw std::invalid_argument("empty rate curve");
    const int m = static_cast<int>(curve.points.front().bit_mi.size());
    const double rate = code_rate * m;
    if (rate > m)
        throw std::invalid_argument("transmission rate " + std::to_string(rate) +
                                    " bit/symbol is unreachable (exceeds m)");
    const auto snr = snr_at_rate(curve, RateKind::gmi, rate);
    if (!snr)
        throw std::runtime_error("GMI never reaches " + std::to_string(rate) +
                                 " bit/symbol on the sampled grid");
    ThresholdReport rep;
    rep.rate = rate;
    rep.threshold_es_n0_db = *snr;
    rep.measured_es_n0_db = measured_waterfall_db;
    rep.gap_db = measured_waterfall_db - *snr;
    return rep;
}

void write_sim_csv(std::ostream& out, const SimResult& result) {
    out << "es_n0_db,blocks,info_bits,bit_errors,ber,frame_errors,fer,mean_iters\n";
    char buf[64];
    for (const auto& p : result.points) {
        std::snprintf(buf, sizeof(buf), "%.10g,", p.es_n0_db);
        out << buf << p.blocks << ',' << p.info_bits << ',' << p.bit_errors << ',';
        std::snprintf(buf, sizeof(buf), "%.6g", p.ber);
        out << buf << ',' << p.frame_errors << ',';
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g", p.fer, p.mean_iterations);
        out << buf << "\n";
    }
}

std::string sim_result_json(const SimResult& result) {
    nlohmann::json j;
    j["config"] = {{"constellation", result.constellation},
                   {"code", result.code_name},
                   {"code_n", result.code_n},
                   {"code_k", result.code_k},
                   {"code_rate", result.code_rate},
                   {"transmission_rate_bit_per_symbol", result.transmission_rate},
                   {"demapper", result.demapper},
                   {"master_seed", result.master_seed},
                   {"max_blocks", result.max_blocks},
                   {"min_bit_errors", result.min_bit_errors},
                   {"decoder_max_iterations", result.max_iterations}};
    j["points"] = nlohmann::json::array();
    for (const auto& p : result.points) {
        j["points"].push_back({{"es_n0_db", p.es_n0_db},
                               {"blocks", p.blocks},
                               {"info_bits", p.info_bits},
                               {"bit_errors", p.bit_errors},
                               {"ber", p.ber},
                               {"frame_errors", p.frame_errors},
                               {"fer", p.fer},
                               {"mean_iters", p.mean_iterations},
                               {"wall_seconds", p.wall_seconds}});
    }
    return j.dump(2);
}

} // namespace bicm

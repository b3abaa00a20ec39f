#include "bicm/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "bicm/parallel.hpp"
#include "bicm/rng.hpp"

namespace bicm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double v, double hi) { return std::min(std::max(v, 0.0), hi); }

// Per-symbol expectation terms produced by one evaluation pass:
// mi_term[i]  = E_Z[ log2 sum_j D_ij ]
// bit_term[k][i] = E_Z[ log2 (sum_all / sum_{j in class}) ]
struct PassSums {
    std::vector<double> mi_term;
    std::vector<std::vector<double>> bit_term;
};

RateEval finalize(const Constellation& c, const PassSums& sums) {
    const int M = c.num_points();
    const int m = c.bits();
    RateEval out;
    double acc = 0.0;
    for (double v : sums.mi_term) acc += v;
    out.mi = clamp01(static_cast<double>(m) - acc / M, static_cast<double>(m));
    out.bit_mi.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        double b = 0.0;
        for (double v : sums.bit_term[static_cast<std::size_t>(k)]) b += v;
        out.bit_mi[static_cast<std::size_t>(k)] = clamp01(1.0 - b / M, 1.0);
    }
    out.gmi = 0.0;
    for (double v : out.bit_mi) out.gmi += v;
    out.gmi = clamp01(out.gmi, static_cast<double>(m));
    return out;
}

// w[j] = prod_d tab[d][j] for the current (symbol, node) pair.
void product_rows(const double* const* tab, int dims, int M, double* w) {
    if (dims == 4) {
        const double *a = tab[0], *b = tab[1], *c = tab[2], *d = tab[3];
        for (int j = 0; j < M; ++j) w[j] = a[j] * b[j] * c[j] * d[j];
    } else if (dims == 2) {
        const double *a = tab[0], *b = tab[1];
        for (int j = 0; j < M; ++j) w[j] = a[j] * b[j];
    } else if (dims == 1) {
        const double* a = tab[0];
        for (int j = 0; j < M; ++j) w[j] = a[j];
    } else {
        for (int j = 0; j < M; ++j) {
            double t = tab[0][j];
            for (int d = 1; d < dims; ++d) t *= tab[d][j];
            w[j] = t;
        }
    }
}

} // namespace

RateEval eval_rates_quadrature(const Constellation& c, double n0, const QuadratureGrid& grid,
                               unsigned threads) {
    if (grid.dims != c.dims)
        throw std::invalid_argument("quadrature grid dims do not match constellation dims");
    if (n0 <= 0.0) throw std::invalid_argument("n0 must be positive");

    const int M = c.num_points();
    const int m = c.bits();
    const int N = c.dims;
    const int q = grid.order;
    const double sqrt_n0 = std::sqrt(n0);

    // Normalized 1-D weights (sum to 1).
    std::vector<double> v(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a)
        v[static_cast<std::size_t>(a)] = grid.rule.weights[static_cast<std::size_t>(a)] /
                                         std::sqrt(kPi);

    // Bit-class masks over point index j.
    std::vector<std::vector<double>> mask(static_cast<std::size_t>(m),
                                          std::vector<double>(static_cast<std::size_t>(M)));
    for (int k = 1; k <= m; ++k)
        for (int j = 0; j < M; ++j)
            mask[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)] =
                label_bit(c.labels[static_cast<std::size_t>(j)], k, m) ? 1.0 : 0.0;

    PassSums sums;
    sums.mi_term.assign(static_cast<std::size_t>(M), 0.0);
    sums.bit_term.assign(static_cast<std::size_t>(m),
                         std::vector<double>(static_cast<std::size_t>(M), 0.0));

    parallel_for_chunks(0, static_cast<std::size_t>(M), threads, [&](std::size_t lo,
                                                                     std::size_t hi) {
        // Per-dimension node factor tables for one transmitted symbol i:
        // tab[d][a*M + j] = exp(t_a^2 - (delta_d + sqrt(N0) t_a)^2 / N0),
        // so D_ij(node) = prod_d tab[d][a_d*M + j]. Folding the |Z|^2 shift
        // into each dimension keeps every factor in (0, e^{t^2}]; the j = i
        // factor is exactly 1, which bounds all log arguments away from 0.
        std::vector<std::vector<double>> tab(static_cast<std::size_t>(N));
        for (auto& t : tab) t.resize(static_cast<std::size_t>(q) * M);
        std::vector<double> w(static_cast<std::size_t>(M));
        std::vector<const double*> rows(static_cast<std::size_t>(N));
        std::vector<int> node(static_cast<std::size_t>(N));
        std::vector<double> bit_acc(static_cast<std::size_t>(m));

        for (std::size_t i = lo; i < hi; ++i) {
            for (int d = 0; d < N; ++d) {
                const double xi = c.points[i * N + d];
                double* td = tab[static_cast<std::size_t>(d)].data();
                for (int a = 0; a < q; ++a) {
                    const double t = grid.rule.nodes[static_cast<std::size_t>(a)];
                    const double shift = sqrt_n0 * t;
                    for (int j = 0; j < M; ++j) {
                        const double delta = xi - c.points[static_cast<std::size_t>(j) * N + d];
                        const double s = delta + shift;
                        td[a * M + j] = std::exp(t * t - s * s / n0);
                    }
                }
            }

            std::fill(node.begin(), node.end(), 0);
            double mi_acc = 0.0;
            std::fill(bit_acc.begin(), bit_acc.end(), 0.0);
            const std::size_t total = grid.tensor_size();
            for (std::size_t it = 0; it < total; ++it) {
                double wnode = 1.0;
                for (int d = 0; d < N; ++d) {
                    rows[static_cast<std::size_t>(d)] =
                        tab[static_cast<std::size_t>(d)].data() +
                        static_cast<std::size_t>(node[static_cast<std::size_t>(d)]) * M;
                    wnode *= v[static_cast<std::size_t>(node[static_cast<std::size_t>(d)])];
                }
                product_rows(rows.data(), N, M, w.data());

                double s_all = 0.0;
                for (int j = 0; j < M; ++j) s_all += w[static_cast<std::size_t>(j)];
                const double log_all = std::log2(s_all);
                mi_acc += wnode * log_all;
                for (int k = 0; k < m; ++k) {
                    const double* mk = mask[static_cast<std::size_t>(k)].data();
                    double s1 = 0.0;
                    for (int j = 0; j < M; ++j) s1 += w[static_cast<std::size_t>(j)] * mk[j];
                    const double denom =
                        label_bit(c.labels[i], k + 1, m) ? s1 : s_all - s1;
                    bit_acc[static_cast<std::size_t>(k)] += wnode * (log_all - std::log2(denom));
                }

                for (int d = N - 1; d >= 0; --d) {
                    if (++node[static_cast<std::size_t>(d)] < q) break;
                    node[static_cast<std::size_t>(d)] = 0;
                }
            }
            sums.mi_term[i] = mi_acc;
            for (int k = 0; k < m; ++k) sums.bit_term[static_cast<std::size_t>(k)][i] =
                bit_acc[static_cast<std::size_t>(k)];
        }
    });

    return finalize(c, sums);
}

RateEval eval_rates_montecarlo(const Constellation& c, double n0, std::uint64_t samples,
                               std::uint64_t seed, unsigned threads) {
    if (samples < 1000) throw std::invalid_argument("montecarlo requires samples >= 1000");
    if (n0 <= 0.0) throw std::invalid_argument("n0 must be positive");

    const int M = c.num_points();
    const int m = c.bits();
    const int N = c.dims;

    std::vector<std::vector<double>> mask(static_cast<std::size_t>(m),
                                          std::vector<double>(static_cast<std::size_t>(M)));
    for (int k = 1; k <= m; ++k)
        for (int j = 0; j < M; ++j)
            mask[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)] =
                label_bit(c.labels[static_cast<std::size_t>(j)], k, m) ? 1.0 : 0.0;

    struct Stratum {
        double sum_g = 0, sumsq_g = 0, sum_v = 0, sumsq_v = 0;
        std::vector<double> sum_bit;
        std::uint64_t n = 0;
    };
    std::vector<Stratum> strata(static_cast<std::size_t>(M));
    for (auto& s : strata) s.sum_bit.assign(static_cast<std::size_t>(m), 0.0);

    parallel_for_chunks(0, static_cast<std::size_t>(M), threads, [&](std::size_t lo,
                                                                     std::size_t hi) {
        std::vector<double> z(static_cast<std::size_t>(N));
        std::vector<double> w(static_cast<std::size_t>(M));
        const double sigma = std::sqrt(n0 / 2.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t ni = samples / M + (i < samples % M ? 1 : 0);
            RandomStream rs(seed, i);
            Stratum& st = strata[i];
            st.n = ni;
            const double* xi = c.points.data() + i * N;
            for (std::uint64_t s = 0; s < ni; ++s) {
                for (int d = 0; d < N; ++d) z[static_cast<std::size_t>(d)] = sigma * rs.gaussian();
                for (int j = 0; j < M; ++j) {
                    const double* xj = c.points.data() + static_cast<std::size_t>(j) * N;
                    double e = 0.0;
                    for (int d = 0; d < N; ++d) {
                        const double delta = xi[d] - xj[d];
                        e += delta * (delta + 2.0 * z[static_cast<std::size_t>(d)]);
                    }
                    w[static_cast<std::size_t>(j)] = std::exp(-e / n0);
                }
                double s_all = 0.0;
                for (int j = 0; j < M; ++j) s_all += w[static_cast<std::size_t>(j)];
                const double g = std::log2(s_all);
                double vsum = 0.0;
                for (int k = 0; k < m; ++k) {
                    const double* mk = mask[static_cast<std::size_t>(k)].data();
                    double s1 = 0.0;
                    for (int j = 0; j < M; ++j) s1 += w[static_cast<std::size_t>(j)] * mk[j];
                    const double denom = label_bit(c.labels[i], k + 1, m) ? s1 : s_all - s1;
                    const double term = g - std::log2(denom);
                    st.sum_bit[static_cast<std::size_t>(k)] += term;
                    vsum += term;
                }
                st.sum_g += g;
                st.sumsq_g += g * g;
                st.sum_v += vsum;
                st.sumsq_v += vsum * vsum;
            }
        }
    });

    RateEval out;
    double mean_g = 0, var_mi = 0, mean_v = 0, var_v = 0;
    out.bit_mi.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < M; ++i) {
        const Stratum& st = strata[static_cast<std::size_t>(i)];
        const double n = static_cast<double>(st.n);
        const double mg = st.sum_g / n;
        const double mv = st.sum_v / n;
        mean_g += mg;
        mean_v += mv;
        const double vg = std::max(0.0, st.sumsq_g / n - mg * mg);
        const double vv = std::max(0.0, st.sumsq_v / n - mv * mv);
        var_mi += vg / n;
        var_v += vv / n;
        for (int k = 0; k < m; ++k)
            out.bit_mi[static_cast<std::size_t>(k)] += st.sum_bit[static_cast<std::size_t>(k)] / n;
    }
    out.mi = clamp01(static_cast<double>(m) - mean_g / M, static_cast<double>(m));
    out.mi_se = std::sqrt(var_mi) / M;
    out.gmi = clamp01(static_cast<double>(m) - mean_v / M, static_cast<double>(m));
    out.gmi_se = std::sqrt(var_v) / M;
    for (int k = 0; k < m; ++k)
        out.bit_mi[static_cast<std::size_t>(k)] =
            clamp01(1.0 - out.bit_mi[static_cast<std::size_t>(k)] / M, 1.0);
    return out;
}

double mi(const Constellation& c, const ChannelSpec& ch, const QuadratureGrid& grid,
          unsigned threads) {
    return eval_rates_quadrature(c, ch.n0, grid, threads).mi;
}

double bit_mi(const Constellation& c, int k, const ChannelSpec& ch, const QuadratureGrid& grid,
              unsigned threads) {
    if (k < 1 || k > c.bits()) throw std::invalid_argument("bit index out of range");
    return eval_rates_quadrature(c, ch.n0, grid, threads)
        .bit_mi[static_cast<std::size_t>(k - 1)];
}

double gmi(const Constellation& c, const ChannelSpec& ch, const QuadratureGrid& grid,
           unsigned threads) {
    return eval_rates_quadrature(c, ch.n0, grid, threads).gmi;
}

McEstimate mi_montecarlo(const Constellation& c, const ChannelSpec& ch, std::uint64_t samples,
                         std::uint64_t seed, unsigned threads) {
    const RateEval e = eval_rates_montecarlo(c, ch.n0, samples, seed, threads);
    return {e.mi, e.mi_se};
}

McEstimate gmi_montecarlo(const Constellation& c, const ChannelSpec& ch, std::uint64_t samples,
                          std::uint64_t seed, unsigned threads) {
    const RateEval e = eval_rates_montecarlo(c, ch.n0, samples, seed, threads);
    return {e.gmi, e.gmi_se};
}

double shannon_capacity(double es_n0_db, int dims) {
    if (dims < 2 || dims % 2 != 0)
        throw std::invalid_argument("shannon_capacity requires an even number of dimensions");
    const double es_n0 = std::pow(10.0, es_n0_db / 10.0);
    return (dims / 2.0) * std::log2(1.0 + (2.0 / dims) * es_n0);
}

std::vector<double> snr_grid(double start_db, double stop_db, double step_db) {
    if (step_db <= 0.0 || stop_db < start_db)
        throw std::invalid_argument("SNR grid requires start <= stop and step > 0");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9));
    grid.reserve(count + 1);
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(start_db + step_db * i);
    return grid;
}

RateCurve rate_curve(const Constellation& c, const RateCurveConfig& cfg) {
    if (cfg.es_n0_db_grid.empty()) throw std::invalid_argument("empty SNR grid");
    RateCurve curve;
    curve.constellation = c.name;
    curve.method = cfg.method;
    curve.quad_order = cfg.quad_order;
    curve.samples = cfg.samples;
    curve.points.resize(cfg.es_n0_db_grid.size());

    const unsigned threads = effective_threads(cfg.threads);
    const std::size_t n_pts = cfg.es_n0_db_grid.size();
    // Outer parallelism across grid points when the grid is the larger axis;
    // otherwise parallelize inside the per-point evaluation.
    const bool outer = n_pts >= 2 * threads;
    QuadratureGrid grid;
    if (cfg.method == RateMethod::quadrature) grid = make_grid(cfg.quad_order, c.dims);

    auto eval_point = [&](std::size_t idx, unsigned inner_threads) {
        const double es = cfg.es_n0_db_grid[idx];
        const double n0 = es_n0_to_n0(es);
        RateEval e;
        if (cfg.method == RateMethod::quadrature) {
            e = eval_rates_quadrature(c, n0, grid, inner_threads);
        } else {
            const std::uint64_t point_seed = splitmix64(cfg.seed + idx);
            e = eval_rates_montecarlo(c, n0, cfg.samples, point_seed, inner_threads);
        }
        RateRecord& r = curve.points[idx];
        r.es_n0_db = es;
        r.mi = e.mi;
        r.gmi = e.gmi;
        r.bit_mi = std::move(e.bit_mi);
        r.mi_se = e.mi_se;
        r.gmi_se = e.gmi_se;
    };

    if (outer) {
        parallel_for_chunks(0, n_pts, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) eval_point(i, 1);
        });
    } else {
        for (std::size_t i = 0; i < n_pts; ++i) eval_point(i, threads);
    }
    return curve;
}

namespace {

double record_rate(const RateRecord& r, RateKind which) {
    return which == RateKind::mi ? r.mi : r.gmi;
}

// Strictly increasing (rate, eb) polyline of a curve; saturated or zero-rate
// points are dropped so the rate axis is invertible.
std::vector<std::pair<double, double>> rate_eb_polyline(const RateCurve& c, RateKind which) {
    std::vector<std::pair<double, double>> out;
    double last = -1.0;
    for (const auto& r : c.points) {
        const double rate = record_rate(r, which);
        if (rate < 1e-9) continue;
        if (rate <= last + 1e-12) continue;
        out.emplace_back(rate, eb_n0_db(r.es_n0_db, rate));
        last = rate;
    }
    return out;
}

double interp_at(const std::vector<std::pair<double, double>>& line, double x) {
    std::size_t hi = 1;
    while (hi + 1 < line.size() && line[hi].first < x) ++hi;
    const auto& [x0, y0] = line[hi - 1];
    const auto& [x1, y1] = line[hi];
    const double t = (x - x0) / (x1 - x0);
    return y0 + t * (y1 - y0);
}

} // namespace

std::optional<double> find_crossing(const RateCurve& a, const RateCurve& b, RateKind which) {
    if (a.points.size() != b.points.size())
        throw std::invalid_argument("curves must share the SNR grid");
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (std::abs(a.points[i].es_n0_db - b.points[i].es_n0_db) > 1e-9)
            throw std::invalid_argument("curves must share the SNR grid");

    const auto la = rate_eb_polyline(a, which);
    const auto lb = rate_eb_polyline(b, which);
    if (la.size() < 2 || lb.size() < 2) return std::nullopt;

    const double lo = std::max(la.front().first, lb.front().first);
    const double hi = std::min(la.back().first, lb.back().first);
    if (hi <= lo) return std::nullopt;

    std::vector<double> knots;
    for (const auto& [r, eb] : la)
        if (r >= lo && r <= hi) knots.push_back(r);
    for (const auto& [r, eb] : lb)
        if (r >= lo && r <= hi) knots.push_back(r);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    if (knots.size() < 2) return std::nullopt;

    double prev_g = interp_at(la, knots[0]) - interp_at(lb, knots[0]);
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double g = interp_at(la, knots[i]) - interp_at(lb, knots[i]);
        if (prev_g * g < 0.0) {
            const double t = prev_g / (prev_g - g);
            return knots[i - 1] + t * (knots[i] - knots[i - 1]);
        }
        prev_g = g;
    }
    return std::nullopt;
}

std::optional<double> snr_at_rate(const RateCurve& curve, RateKind which, double rate) {
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double r0 = record_rate(curve.points[i - 1], which);
        const double r1 = record_rate(curve.points[i], which);
        if (r0 < rate && r1 >= rate) {
            const double t = (rate - r0) / (r1 - r0);
            return curve.points[i - 1].es_n0_db +
                   t * (curve.points[i].es_n0_db - curve.points[i - 1].es_n0_db);
        }
    }
    if (!curve.points.empty() && record_rate(curve.points.front(), which) >= rate)
        return curve.points.front().es_n0_db;
    return std::nullopt;
}

void write_rate_curve_csv(std::ostream& out, const RateCurve& curve) {
    const int m = curve.points.empty() ? 0 : static_cast<int>(curve.points.front().bit_mi.size());
    out << "es_n0_db,eb_n0_db_mi,eb_n0_db_gmi,mi,gmi";
    for (int k = 1; k <= m; ++k) out << ",bit_mi_" << k;
    out << ",method,precision\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        out << buf;
    };
    for (const auto& r : curve.points) {
        put(r.es_n0_db);
        out << ',';
        put(r.mi > 1e-12 ? eb_n0_db(r.es_n0_db, r.mi) : std::numeric_limits<double>::infinity());
        out << ',';
        put(r.gmi > 1e-12 ? eb_n0_db(r.es_n0_db, r.gmi) : std::numeric_limits<double>::infinity());
        out << ',';
        put(r.mi);
        out << ',';
        put(r.gmi);
        for (double b : r.bit_mi) {
            out << ',';
            put(b);
        }
        if (curve.method == RateMethod::quadrature) {
            out << ",quadrature,order=" << curve.quad_order << "\n";
        } else {
            out << ",montecarlo,samples=" << curve.samples;
            std::snprintf(buf, sizeof(buf), ";mi_se=%.4g;gmi_se=%.4g", r.mi_se, r.gmi_se);
            out << buf << "\n";
        }
    }
}

} // namespace bicm

#include "bicm/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bicm/channel.hpp"
#include "bicm/parallel.hpp"
#include "bicm/quadrature.hpp"
#include "bicm/rates.hpp"
#include "bicm/rng.hpp"

namespace bicm {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kTableBudgetBytes = 256ull << 20;

// Mean-GMI objective over the target SNRs as a function of the label vector
// alone. The pairwise metrics D_ij(node) depend only on point geometry, so
// they are precomputed once per target; evaluating a candidate labeling then
// reduces to bit-class partial sums. Falls back to full quadrature passes
// when the tables would not fit the memory budget.
class LabelObjective {
  public:
    LabelObjective(const Constellation& c, const std::vector<double>& targets_db, int order)
        : base_(c), m_(c.bits()) {
        const std::size_t M = static_cast<std::size_t>(c.num_points());
        const QuadratureGrid grid = make_grid(order, c.dims);
        const std::size_t nodes = grid.tensor_size();
        const std::size_t bytes =
            targets_db.size() * M * nodes * (M + 1) * sizeof(double);
        tabulated_ = bytes <= kTableBudgetBytes;
        order_ = order;
        for (double es : targets_db) n0s_.push_back(es_n0_to_n0(es));
        if (!tabulated_) return;

        const int N = c.dims;
        const int q = grid.order;
        for (double n0 : n0s_) {
            Target t;
            t.weights.resize(nodes);
            t.metrics.resize(M * nodes * M);
            t.sum_all.assign(M * nodes, 0.0);
            const double sqrt_n0 = std::sqrt(n0);
            std::vector<int> node(static_cast<std::size_t>(N), 0);
            for (std::size_t it = 0; it < nodes; ++it) {
                double wn = 1.0;
                for (int d = 0; d < N; ++d)
                    wn *= grid.rule.weights[static_cast<std::size_t>(
                              node[static_cast<std::size_t>(d)])] /
                          std::sqrt(kPi);
                t.weights[it] = wn;
                for (std::size_t i = 0; i < M; ++i) {
                    double* row = t.metrics.data() + (i * nodes + it) * M;
                    double s_all = 0.0;
                    for (std::size_t j = 0; j < M; ++j) {
                        double expo = 0.0;
                        for (int d = 0; d < N; ++d) {
                            const double ta =
                                grid.rule.nodes[static_cast<std::size_t>(
                                    node[static_cast<std::size_t>(d)])];
                            const double delta = c.points[i * N + d] - c.points[j * N + d];
                            const double s = delta + sqrt_n0 * ta;
                            expo += ta * ta - s * s / n0;
                        }
                        row[j] = std::exp(expo);
                        s_all += row[j];
                    }
                    t.sum_all[i * nodes + it] = s_all;
                }
                for (int d = N - 1; d >= 0; --d) {
                    if (++node[static_cast<std::size_t>(d)] < q) break;
                    node[static_cast<std::size_t>(d)] = 0;
                }
            }
            targets_.push_back(std::move(t));
        }
    }

    double operator()(const std::vector<std::uint32_t>& labels) const {
        if (!tabulated_) return slow_eval(labels);
        const std::size_t M = labels.size();
        double total = 0.0;
        for (const Target& t : targets_) {
            const std::size_t nodes = t.weights.size();
            double gmi = 0.0;
            for (int k = 1; k <= m_; ++k) {
                double acc = 0.0;
                for (std::size_t i = 0; i < M; ++i) {
                    const int ref = label_bit(labels[i], k, m_);
                    for (std::size_t it = 0; it < nodes; ++it) {
                        const double* row = t.metrics.data() + (i * nodes + it) * M;
                        double s1 = 0.0;
                        for (std::size_t j = 0; j < M; ++j)
                            if (label_bit(labels[j], k, m_)) s1 += row[j];
                        const double s_all = t.sum_all[i * nodes + it];
                        const double denom = ref ? s1 : s_all - s1;
                        acc += t.weights[it] * std::log2(s_all / denom);
                    }
                }
                gmi += std::min(std::max(1.0 - acc / static_cast<double>(M), 0.0), 1.0);
            }
            total += gmi;
        }
        return total / static_cast<double>(targets_.size());
    }

  private:
    double slow_eval(const std::vector<std::uint32_t>& labels) const {
        Constellation c = base_;
        c.labels = labels;
        const QuadratureGrid grid = make_grid(order_, c.dims);
        double total = 0.0;
        for (double n0 : n0s_) total += eval_rates_quadrature(c, n0, grid, 1).gmi;
        return total / static_cast<double>(n0s_.size());
    }

    struct Target {
        std::vector<double> weights;  // nodes
        std::vector<double> metrics;  // M * nodes * M
        std::vector<double> sum_all;  // M * nodes
    };
    Constellation base_;
    std::vector<Target> targets_;
    std::vector<double> n0s_;
    int m_;
    int order_ = 0;
    bool tabulated_ = false;
};

} // namespace

Constellation apply_labeling(const Constellation& c, std::span<const int> perm) {
    const std::size_t M = c.labels.size();
    if (perm.size() != M) throw std::invalid_argument("permutation size does not match M");
    std::vector<bool> seen(M, false);
    for (int p : perm) {
        if (p < 0 || static_cast<std::size_t>(p) >= M || seen[static_cast<std::size_t>(p)])
            throw std::invalid_argument("labeling permutation is not a bijection");
        seen[static_cast<std::size_t>(p)] = true;
    }
    Constellation out = c;
    for (std::size_t i = 0; i < M; ++i)
        out.labels[i] = c.labels[static_cast<std::size_t>(perm[i])];
    return out;
}

LabelingResult optimize_labeling(const Constellation& c, const LabelingSearchConfig& cfg) {
    if (cfg.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (cfg.targets_es_n0_db.empty()) throw std::invalid_argument("no target SNRs");

    const std::size_t M = static_cast<std::size_t>(c.num_points());
    const LabelObjective search_obj(c, cfg.targets_es_n0_db, cfg.search_order);
    const LabelObjective final_obj(c, cfg.targets_es_n0_db, cfg.final_order);

    struct RestartOut {
        std::vector<std::uint32_t> labels;
        LabelingRestartReport report;
    };
    std::vector<RestartOut> outs(static_cast<std::size_t>(cfg.restarts));

    parallel_for_chunks(0, static_cast<std::size_t>(cfg.restarts), cfg.threads,
                        [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            RandomStream rs(cfg.seed, r);
            std::vector<std::uint32_t> labels = c.labels;
            // Fisher-Yates shuffle for the start labeling.
            for (std::size_t i = M - 1; i > 0; --i) {
                const std::size_t j = rs.next_u64() % (i + 1);
                std::swap(labels[i], labels[j]);
            }
            RestartOut& out = outs[r];
            double current = search_obj(labels);
            for (int pass = 0; pass < cfg.max_passes; ++pass) {
                out.report.passes = pass + 1;
                double best_gain = cfg.epsilon;
                std::size_t best_a = 0, best_b = 0;
                bool found = false;
                for (std::size_t a = 0; a < M; ++a) {
                    for (std::size_t b = a + 1; b < M; ++b) {
                        std::swap(labels[a], labels[b]);
                        const double cand = search_obj(labels);
                        std::swap(labels[a], labels[b]);
                        if (cand - current > best_gain) {
                            best_gain = cand - current;
                            best_a = a;
                            best_b = b;
                            found = true;
                        }
                    }
                }
                if (!found) break;
                std::swap(labels[best_a], labels[best_b]);
                current += best_gain;
                out.report.ascent.push_back(current);
            }
            out.labels = std::move(labels);
            out.report.objective_search = current;
            out.report.objective = final_obj(out.labels);
        }
    });

    LabelingResult result;
    result.restarts.reserve(outs.size());
    int best = 0;
    for (std::size_t r = 0; r < outs.size(); ++r) {
        result.restarts.push_back(outs[r].report);
        if (outs[r].report.objective > outs[static_cast<std::size_t>(best)].report.objective)
            best = static_cast<int>(r);
    }
    result.best_restart = best;
    result.objective = outs[static_cast<std::size_t>(best)].report.objective;
    result.constellation = c;
    result.constellation.labels = outs[static_cast<std::size_t>(best)].labels;
    return result;
}

} // namespace bicm

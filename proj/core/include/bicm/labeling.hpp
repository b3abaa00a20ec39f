#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bicm/constellation.hpp"

namespace bicm {

/// Pairwise-swap hill-climbing configuration. The objective is the
/// unweighted mean GMI over `targets_es_n0_db`, evaluated at `search_order`
/// quadrature during the climb and re-evaluated at `final_order` for restart
/// selection and reporting.
struct LabelingSearchConfig {
    std::vector<double> targets_es_n0_db = {2.0, 4.0, 6.0, 8.0, 10.0};
    int search_order = 6;
    int final_order = 10;
    int restarts = 5;
    int max_passes = 100;
    double epsilon = 1e-5;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Same points with labels permuted: result.labels[i] = c.labels[perm[i]].
/// Throws when perm is not a bijection on {0..M-1}.
Constellation apply_labeling(const Constellation& c, std::span<const int> perm);

struct LabelingRestartReport {
    double objective_search = 0.0; ///< mean GMI at search_order after the climb
    double objective = 0.0;        ///< mean GMI re-evaluated at final_order
    std::vector<double> ascent;    ///< objective after every accepted swap
    int passes = 0;
};

struct LabelingResult {
    Constellation constellation;
    double objective = 0.0; ///< best restart's objective at final_order
    int best_restart = 0;
    std::vector<LabelingRestartReport> restarts;
};

/// Best-improvement pairwise-swap ascent from `restarts` random start
/// labelings. Each pass scans all M(M-1)/2 swaps and applies the best one
/// improving the objective by more than epsilon (ties broken by lowest index
/// pair); a pass with no improving swap ends the restart. Deterministic for
/// a fixed config and seed; restarts run in parallel on their own rng
/// substreams and the winner is picked by (objective, restart index).
LabelingResult optimize_labeling(const Constellation& c, const LabelingSearchConfig& cfg);

} // namespace bicm

#pragma once

#include <span>
#include <vector>

#include "bicm/constellation.hpp"

namespace bicm {

/// LLR sign convention: L_k = ln P(y|B_k=1)/P(y|B_k=0) (as class sums), so
/// positive means bit 1 is more likely. All demappers clip to +/-kLlrClip.
constexpr double kLlrClip = 50.0;

enum class DemapMode { exact, maxlog, factorized };

/// Exact bit LLRs via log-sum-exp over the two bit classes.
std::vector<double> llr_exact(const Constellation& c, std::span<const double> y, double n0);

/// Max-log approximation: each class sum replaced by its largest term.
std::vector<double> llr_maxlog(const Constellation& c, std::span<const double> y, double n0);

/// Per-dimension LLRs for Gray-labeled Cartesian products. `pam` must carry
/// the per-dimension levels at the same scale as the product constellation's
/// coordinates; bits are emitted in labeling order (dimension 1's group
/// first).
std::vector<double> llr_factorized(const PamAlphabet& pam, std::span<const double> y, double n0);

/// Demaps a flat sequence of received vectors (length = symbols * dims) into
/// a flat LLR sequence (length = symbols * m) in mapper bit order.
std::vector<double> demap_block(const ResolvedConstellation& rc, std::span<const double> ys,
                                double n0, DemapMode mode);

} // namespace bicm

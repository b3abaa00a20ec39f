#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bicm {

/// Binary LDPC code defined by a sparse parity-check matrix H plus the
/// encoder structure derived from it by one-time Gaussian elimination over
/// GF(2). H itself is kept untouched for decoding; redundant (dependent)
/// rows only reduce the rank, in which case the code rate is recomputed from
/// the rank. Immutable after construction and safe to share across threads.
struct LdpcCode {
    int n = 0;        ///< codeword length (columns)
    int n_checks = 0; ///< rows of H as loaded
    std::vector<std::vector<int>> check_neighbors; ///< per check: variable indices
    std::vector<std::vector<int>> var_neighbors;   ///< per variable: check indices

    int rank = 0;                ///< GF(2) rank of H
    std::vector<int> parity_cols; ///< pivot columns, one per independent row
    std::vector<int> info_cols;   ///< systematic positions (k = n - rank)
    /// Row r of the reduced system as a bitset over info_cols:
    /// parity bit r = dot(encoder_rows[r], info bits).
    std::vector<std::vector<std::uint64_t>> encoder_rows;

    int k() const { return n - rank; }
    double rate() const { return static_cast<double>(k()) / n; }
};

/// Reads a MacKay-format alist file (padded or unpadded entry lists).
/// Malformed structure raises std::runtime_error naming the line.
LdpcCode load_alist(const std::string& path);

/// Builds a code from explicit check-node adjacency (variable indices per
/// check); used by the alist loader and by code constructors.
LdpcCode make_ldpc(int n, std::vector<std::vector<int>> check_neighbors);

/// Systematic encoding: info bits land on info_cols, parities on
/// parity_cols, and H c = 0 by construction.
std::vector<std::uint8_t> encode(const LdpcCode& code, std::span<const std::uint8_t> info);

struct DecodeResult {
    std::vector<std::uint8_t> bits; ///< hard decision on all n code bits
    int iterations = 0;
    bool converged = false; ///< syndrome reached zero with decided posteriors
};

/// Flooding-schedule sum-product decoding with exact pairwise boxplus check
/// updates. LLR convention: positive means bit 1 (matches the demapper).
/// Stops early once the hard decision satisfies every check; exact-zero
/// posteriors carry no decision and therefore block convergence detection.
DecodeResult decode_bp(const LdpcCode& code, std::span<const double> llrs, int max_iterations);

/// Writes the parity-check matrix in alist format.
void save_alist(const LdpcCode& code, const std::string& path);

} // namespace bicm

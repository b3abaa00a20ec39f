#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bicm {

/// One-dimensional amplitude alphabet with a Gray bit assignment.
///
/// Levels are equally spaced, zero mean and unit average energy, stored in
/// descending amplitude order; labels[i] is the binary-reflected Gray label
/// of levels[i], so adjacent levels differ in exactly one bit. For 2-PAM the
/// convention is bit 0 -> +a, bit 1 -> -a.
struct PamAlphabet {
    std::vector<double> levels;
    std::vector<std::uint32_t> labels;

    int num_levels() const { return static_cast<int>(levels.size()); }
    int bits() const;
    double level_for_label(std::uint32_t label) const;
};

/// Equally spaced PAM alphabet with `num_levels` levels (a power of two).
PamAlphabet make_pam(int num_levels);

/// Copy of `pam` with every level scaled by `factor`.
PamAlphabet scale_pam(const PamAlphabet& pam, double factor);

/// Labeled multidimensional constellation.
///
/// M = 2^m points in `dims` real dimensions, flattened row-major into
/// `points` (point i occupies [i*dims, (i+1)*dims)). labels[i] holds the
/// m-bit label of point i as an integer whose most significant bit is B_1,
/// the first bit fed to the mapper. Instances are immutable by convention
/// once built and are safe to share across threads.
struct Constellation {
    std::string name;
    int dims = 0;
    std::vector<double> points;
    std::vector<std::uint32_t> labels;

    int num_points() const { return static_cast<int>(labels.size()); }
    int bits() const;
    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(dims),
                static_cast<std::size_t>(dims)};
    }
    double average_energy() const;
};

/// Value of bit B_k (1-based, k=1 is the most significant) of an m-bit label.
inline int label_bit(std::uint32_t label, int k, int m) {
    return static_cast<int>((label >> (m - k)) & 1u);
}

/// Throws std::runtime_error when the constellation violates its invariants
/// (M a power of two, labels a bijection onto {0..M-1}, points pairwise
/// distinct).
void validate(const Constellation& c);

/// dims-fold Cartesian product of a PAM alphabet, energy-normalized.
/// The label of a point concatenates the per-dimension PAM labels, the first
/// dimension's group occupying the most significant bits (B_1 first).
Constellation make_cartesian(const PamAlphabet& pam, int dims, std::string name);

/// Scaled copy with unit average symbol energy. Throws on all-zero input.
Constellation normalize(const Constellation& c);

/// Minimum squared Euclidean distance over all point pairs.
double min_squared_distance(const Constellation& c);

/// 10*log10(d2min(c) / d2min(ref)) with both arguments energy-normalized
/// first. Throws when the constellations carry different bit counts.
double asymptotic_gain_db(const Constellation& c, const Constellation& ref);

/// Reads a constellation file (see file format in the project README).
/// The result is validated and energy-normalized. Parse and validation
/// errors carry the offending line number.
Constellation load_constellation(const std::string& path);

/// Writes `c` so that load_constellation() reproduces points within 1e-12
/// and labels exactly.
void save_constellation(const Constellation& c, const std::string& path);

/// Constellation plus the per-dimension alphabet when it is a Gray-labeled
/// Cartesian product (enables the factorized demapper).
struct ResolvedConstellation {
    Constellation constellation;
    std::optional<PamAlphabet> dim_pam;
};

/// Built-in names: "pm-qpsk" and "pm-16qam" resolve to generators; "c4_16",
/// "so-pm-qpsk" and "c4_256" to bundled data files under
/// <data_dir>/constellations/. `data_dir` empty means the BICM_DATA_DIR
/// environment variable, falling back to the configured default.
ResolvedConstellation resolve_constellation(const std::string& name,
                                            const std::string& data_dir = "");

/// Directory used to locate bundled data (constellations/, codes/).
std::string default_data_dir();

/// Names accepted by resolve_constellation (the five shipped constellations).
const std::vector<std::string>& builtin_constellation_names();

} // namespace bicm

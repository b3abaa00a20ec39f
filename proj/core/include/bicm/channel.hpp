#pragma once

#include <span>
#include <vector>

#include "bicm/rng.hpp"

namespace bicm {

/// Vector AWGN channel parameters. Symbols are energy-normalized to Es = 1,
/// so the operating point is fully described by the noise density N0; each
/// of the `dims` real dimensions sees independent N(0, N0/2) noise.
struct ChannelSpec {
    double n0 = 1.0;
    int dims = 1;
};

/// N0 for a given Es/N0 in dB (Es = 1).
double es_n0_to_n0(double es_n0_db);

/// Eb/N0 in dB at transmission rate `rate` bit/symbol. Throws for rate <= 0.
double eb_n0_db(double es_n0_db, double rate);

/// One (Es/N0, rate) operating point with its derived Eb/N0.
struct RatePoint {
    double es_n0_db = 0.0;
    double eb_n0_db = 0.0;
    double rate = 0.0;
};

RatePoint make_rate_point(double es_n0_db, double rate);

/// y = x + z with z i.i.d. zero-mean Gaussian of variance N0/2 per component.
std::vector<double> add_noise(std::span<const double> x, const ChannelSpec& ch,
                              RandomStream& rng);

/// In-place variant used by the simulation hot path.
void add_noise_inplace(std::span<double> x, double n0, RandomStream& rng);

} // namespace bicm

#include "bicm/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace bicm {

double es_n0_to_n0(double es_n0_db) { return std::pow(10.0, -es_n0_db / 10.0); }

double eb_n0_db(double es_n0_db, double rate) {
    if (rate <= 0.0) throw std::invalid_argument("rate must be positive");
    return es_n0_db - 10.0 * std::log10(rate);
}

RatePoint make_rate_point(double es_n0_db, double rate) {
    return {es_n0_db, eb_n0_db(es_n0_db, rate), rate};
}

std::vector<double> add_noise(std::span<const double> x, const ChannelSpec& ch,
                              RandomStream& rng) {
    if (static_cast<int>(x.size()) != ch.dims)
        throw std::invalid_argument("add_noise: vector does not match channel dims");
    std::vector<double> y(x.begin(), x.end());
    add_noise_inplace(y, ch.n0, rng);
    return y;
}

void add_noise_inplace(std::span<double> x, double n0, RandomStream& rng) {
    const double sigma = std::sqrt(n0 / 2.0);
    for (double& v : x) v += sigma * rng.gaussian();
}

} // namespace bicm

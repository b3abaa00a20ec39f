#include "oracle.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gaussian_pdf(double y, double mean, double var) {
    const double d = y - mean;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

// Composite Simpson over the interval covering all levels plus 12 sigma.
template <typename F>
double simpson(F&& f, double lo, double hi, int intervals) {
    const double h = (hi - lo) / intervals;
    double s = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) s += f(lo + h * i) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

double mi_1d(const std::vector<double>& levels, double n0) {
    const double var = n0 / 2.0;
    const double sigma = std::sqrt(var);
    const auto [mn, mx] = std::minmax_element(levels.begin(), levels.end());
    const double lo = *mn - 12.0 * sigma;
    const double hi = *mx + 12.0 * sigma;
    const double L = static_cast<double>(levels.size());

    double mi = 0.0;
    for (double xi : levels) {
        auto integrand = [&](double y) {
            const double pi_y = gaussian_pdf(y, xi, var);
            if (pi_y < 1e-300) return 0.0;
            double mix = 0.0;
            for (double xj : levels) mix += gaussian_pdf(y, xj, var);
            mix /= L;
            return pi_y * std::log2(pi_y / mix);
        };
        mi += simpson(integrand, lo, hi, 40000) / L;
    }
    return mi;
}

double bit_mi_1d(const std::vector<double>& levels, const std::vector<std::uint32_t>& labels,
                 int bit, double n0) {
    const double var = n0 / 2.0;
    const double sigma = std::sqrt(var);
    const auto [mn, mx] = std::minmax_element(levels.begin(), levels.end());
    const double lo = *mn - 12.0 * sigma;
    const double hi = *mx + 12.0 * sigma;
    const double L = static_cast<double>(levels.size());
    int m = 0;
    while ((std::size_t{1} << m) < levels.size()) ++m;

    double sum = 0.0;
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<double> members;
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (static_cast<int>((labels[i] >> (m - bit)) & 1u) == cls)
                members.push_back(levels[i]);
        if (members.empty()) continue;
        const double prior = static_cast<double>(members.size()) / L;
        auto integrand = [&](double y) {
            double p_cls = 0.0;
            for (double x : members) p_cls += gaussian_pdf(y, x, var);
            p_cls /= static_cast<double>(members.size());
            if (p_cls < 1e-300) return 0.0;
            double mix = 0.0;
            for (double x : levels) mix += gaussian_pdf(y, x, var);
            mix /= L;
            return p_cls * std::log2(p_cls / mix);
        };
        sum += prior * simpson(integrand, lo, hi, 40000);
    }
    return sum;
}

} // namespace oracle

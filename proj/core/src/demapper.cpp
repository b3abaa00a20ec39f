#include "bicm/demapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bicm {

namespace {

double clip(double v) { return std::clamp(v, -kLlrClip, kLlrClip); }

void check_dims(const Constellation& c, std::span<const double> y) {
    if (static_cast<int>(y.size()) != c.dims)
        throw std::invalid_argument("received vector does not match constellation dims");
}

// log(sum exp(e_j)) over e[j] where sel[j] picks the class, max-subtracted.
double logsumexp_class(const std::vector<double>& e, const std::vector<std::uint8_t>& sel,
                       std::uint8_t cls) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < e.size(); ++j)
        if (sel[j] == cls) mx = std::max(mx, e[j]);
    double s = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j)
        if (sel[j] == cls) s += std::exp(e[j] - mx);
    return mx + std::log(s);
}

std::vector<double> llr_generic(const Constellation& c, std::span<const double> y, double n0,
                                bool maxlog) {
    check_dims(c, y);
    if (n0 <= 0.0) throw std::invalid_argument("n0 must be positive");
    const int M = c.num_points();
    const int m = c.bits();
    std::vector<double> e(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        double d2 = 0.0;
        for (int d = 0; d < c.dims; ++d) {
            const double diff = y[static_cast<std::size_t>(d)] -
                                c.points[static_cast<std::size_t>(j) * c.dims + d];
            d2 += diff * diff;
        }
        e[static_cast<std::size_t>(j)] = -d2 / n0;
    }
    std::vector<double> llr(static_cast<std::size_t>(m));
    std::vector<std::uint8_t> sel(static_cast<std::size_t>(M));
    for (int k = 1; k <= m; ++k) {
        for (int j = 0; j < M; ++j)
            sel[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
                label_bit(c.labels[static_cast<std::size_t>(j)], k, m));
        double l1, l0;
        if (maxlog) {
            l1 = -std::numeric_limits<double>::infinity();
            l0 = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < M; ++j) {
                const double ev = e[static_cast<std::size_t>(j)];
                if (sel[static_cast<std::size_t>(j)])
                    l1 = std::max(l1, ev);
                else
                    l0 = std::max(l0, ev);
            }
        } else {
            l1 = logsumexp_class(e, sel, 1);
            l0 = logsumexp_class(e, sel, 0);
        }
        llr[static_cast<std::size_t>(k - 1)] = clip(l1 - l0);
    }
    return llr;
}

} // namespace

std::vector<double> llr_exact(const Constellation& c, std::span<const double> y, double n0) {
    return llr_generic(c, y, n0, false);
}

std::vector<double> llr_maxlog(const Constellation& c, std::span<const double> y, double n0) {
    return llr_generic(c, y, n0, true);
}

std::vector<double> llr_factorized(const PamAlphabet& pam, std::span<const double> y, double n0) {
    if (n0 <= 0.0) throw std::invalid_argument("n0 must be positive");
    const int L = pam.num_levels();
    const int pb = pam.bits();
    const int dims = static_cast<int>(y.size());
    std::vector<double> llr(static_cast<std::size_t>(dims) * pb);
    std::vector<double> e(static_cast<std::size_t>(L));
    for (int d = 0; d < dims; ++d) {
        const double yd = y[static_cast<std::size_t>(d)];
        for (int i = 0; i < L; ++i) {
            const double diff = yd - pam.levels[static_cast<std::size_t>(i)];
            e[static_cast<std::size_t>(i)] = -diff * diff / n0;
        }
        for (int b = 1; b <= pb; ++b) {
            double m1 = -std::numeric_limits<double>::infinity();
            double m0 = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < L; ++i)
                if (label_bit(pam.labels[static_cast<std::size_t>(i)], b, pb))
                    m1 = std::max(m1, e[static_cast<std::size_t>(i)]);
                else
                    m0 = std::max(m0, e[static_cast<std::size_t>(i)]);
            double s1 = 0.0, s0 = 0.0;
            for (int i = 0; i < L; ++i)
                if (label_bit(pam.labels[static_cast<std::size_t>(i)], b, pb))
                    s1 += std::exp(e[static_cast<std::size_t>(i)] - m1);
                else
                    s0 += std::exp(e[static_cast<std::size_t>(i)] - m0);
            llr[static_cast<std::size_t>(d * pb + b - 1)] =
                clip((m1 + std::log(s1)) - (m0 + std::log(s0)));
        }
    }
    return llr;
}

std::vector<double> demap_block(const ResolvedConstellation& rc, std::span<const double> ys,
                                double n0, DemapMode mode) {
    const Constellation& c = rc.constellation;
    if (ys.size() % static_cast<std::size_t>(c.dims) != 0)
        throw std::invalid_argument("symbol stream length not divisible by dims");
    if (mode == DemapMode::factorized && !rc.dim_pam)
        throw std::invalid_argument(
            "factorized demapper requires a Gray-labeled Cartesian product constellation");
    const std::size_t n_sym = ys.size() / static_cast<std::size_t>(c.dims);
    const int m = c.bits();
    std::vector<double> llrs;
    llrs.reserve(n_sym * static_cast<std::size_t>(m));
    for (std::size_t s = 0; s < n_sym; ++s) {
        std::span<const double> y = ys.subspan(s * c.dims, static_cast<std::size_t>(c.dims));
        std::vector<double> l;
        switch (mode) {
            case DemapMode::exact: l = llr_exact(c, y, n0); break;
            case DemapMode::maxlog: l = llr_maxlog(c, y, n0); break;
            case DemapMode::factorized: l = llr_factorized(*rc.dim_pam, y, n0); break;
        }
        llrs.insert(llrs.end(), l.begin(), l.end());
    }
    return llrs;
}

} // namespace bicm

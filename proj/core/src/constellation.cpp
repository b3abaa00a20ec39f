#include "bicm/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bicm {

namespace {

constexpr double kDuplicateD2 = 1e-9;

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::size_t v) {
    int m = 0;
    while ((std::size_t{1} << m) < v) ++m;
    return m;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::runtime_error(where.empty() ? what : where + ": " + what);
}

std::string label_string(std::uint32_t label, int m) {
    std::string s(static_cast<std::size_t>(m), '0');
    for (int k = 1; k <= m; ++k)
        if (label_bit(label, k, m)) s[static_cast<std::size_t>(k - 1)] = '1';
    return s;
}

} // namespace

int PamAlphabet::bits() const { return log2_exact(levels.size()); }

double PamAlphabet::level_for_label(std::uint32_t label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return levels[i];
    throw std::invalid_argument("PAM label out of range");
}

PamAlphabet make_pam(int num_levels) {
    if (num_levels < 2 || !is_power_of_two(static_cast<std::size_t>(num_levels)))
        throw std::invalid_argument("PAM size must be a power of two >= 2");
    const int L = num_levels;
    const double a = std::sqrt(3.0 / (static_cast<double>(L) * L - 1.0));
    PamAlphabet pam;
    pam.levels.resize(static_cast<std::size_t>(L));
    pam.labels.resize(static_cast<std::size_t>(L));
    for (int i = 0; i < L; ++i) {
        pam.levels[static_cast<std::size_t>(i)] = a * static_cast<double>(L - 1 - 2 * i);
        pam.labels[static_cast<std::size_t>(i)] =
            static_cast<std::uint32_t>(i ^ (i >> 1)); // binary-reflected Gray
    }
    return pam;
}

PamAlphabet scale_pam(const PamAlphabet& pam, double factor) {
    PamAlphabet out = pam;
    for (double& v : out.levels) v *= factor;
    return out;
}

int Constellation::bits() const { return log2_exact(labels.size()); }

double Constellation::average_energy() const {
    double e = 0.0;
    for (double v : points) e += v * v;
    return e / static_cast<double>(num_points());
}

void validate(const Constellation& c) {
    const std::size_t M = c.labels.size();
    if (c.dims < 1) fail(c.name, "dims must be >= 1");
    if (M < 2 || !is_power_of_two(M)) fail(c.name, "point count must be a power of two >= 2");
    if (c.points.size() != M * static_cast<std::size_t>(c.dims))
        fail(c.name, "points array does not match dims * M");
    const int m = log2_exact(M);
    std::vector<bool> seen(M, false);
    for (std::uint32_t lab : c.labels) {
        if (lab >= M) fail(c.name, "label " + label_string(lab, m) + " out of range");
        if (seen[lab]) fail(c.name, "duplicate label " + label_string(lab, m));
        seen[lab] = true;
    }
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i + 1; j < M; ++j) {
            double d2 = 0.0;
            for (int d = 0; d < c.dims; ++d) {
                const double diff = c.points[i * c.dims + d] - c.points[j * c.dims + d];
                d2 += diff * diff;
            }
            if (d2 < kDuplicateD2)
                fail(c.name, "points " + std::to_string(i) + " and " + std::to_string(j) +
                                 " coincide");
        }
    }
}

Constellation make_cartesian(const PamAlphabet& pam, int dims, std::string name) {
    if (dims < 1) throw std::invalid_argument("dims must be >= 1");
    const int L = pam.num_levels();
    const int pb = pam.bits();
    std::size_t M = 1;
    for (int d = 0; d < dims; ++d) M *= static_cast<std::size_t>(L);

    Constellation c;
    c.name = std::move(name);
    c.dims = dims;
    c.points.resize(M * static_cast<std::size_t>(dims));
    c.labels.resize(M);
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    for (std::size_t p = 0; p < M; ++p) {
        std::uint32_t label = 0;
        for (int d = 0; d < dims; ++d) {
            const auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]);
            c.points[p * dims + d] = pam.levels[i];
            label = (label << pb) | pam.labels[i];
        }
        c.labels[p] = label;
        for (int d = dims - 1; d >= 0; --d) {
            if (++idx[static_cast<std::size_t>(d)] < L) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
    }
    return normalize(c);
}

Constellation normalize(const Constellation& c) {
    const double es = c.average_energy();
    if (es <= 0.0) throw std::runtime_error(c.name + ": cannot normalize all-zero constellation");
    Constellation out = c;
    const double scale = 1.0 / std::sqrt(es);
    for (double& v : out.points) v *= scale;
    return out;
}

double min_squared_distance(const Constellation& c) {
    const std::size_t M = c.labels.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i + 1; j < M; ++j) {
            double d2 = 0.0;
            for (int d = 0; d < c.dims; ++d) {
                const double diff = c.points[i * c.dims + d] - c.points[j * c.dims + d];
                d2 += diff * diff;
            }
            best = std::min(best, d2);
        }
    }
    return best;
}

double asymptotic_gain_db(const Constellation& c, const Constellation& ref) {
    if (c.bits() != ref.bits())
        throw std::invalid_argument("asymptotic gain requires equal bits per symbol (got " +
                                    std::to_string(c.bits()) + " vs " +
                                    std::to_string(ref.bits()) + ")");
    const double dc = min_squared_distance(normalize(c));
    const double dr = min_squared_distance(normalize(ref));
    return 10.0 * std::log10(dc / dr);
}

Constellation load_constellation(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open constellation file");

    Constellation c;
    c.name = path;
    std::string line;
    std::size_t line_no = 0;
    long n = -1, M = -1;
    int m = 0;
    std::size_t rows = 0;

    auto parse_fail = [&](const std::string& what) {
        fail(path + ":" + std::to_string(line_no), what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (n < 0) {
            if (!(ls >> n >> M) || n < 1 || M < 2) parse_fail("expected header line 'N M'");
            if (!is_power_of_two(static_cast<std::size_t>(M)))
                parse_fail("M = " + std::to_string(M) + " is not a power of two");
            c.dims = static_cast<int>(n);
            m = log2_exact(static_cast<std::size_t>(M));
            c.points.reserve(static_cast<std::size_t>(M * n));
            c.labels.reserve(static_cast<std::size_t>(M));
            continue;
        }
        if (rows == static_cast<std::size_t>(M)) parse_fail("more data rows than M");
        std::string lab;
        if (!(ls >> lab)) parse_fail("missing label");
        if (lab.size() != static_cast<std::size_t>(m))
            parse_fail("label '" + lab + "' must have " + std::to_string(m) + " bits");
        std::uint32_t value = 0;
        for (char ch : lab) {
            if (ch != '0' && ch != '1') parse_fail("label '" + lab + "' is not binary");
            value = (value << 1) | static_cast<std::uint32_t>(ch - '0');
        }
        for (long d = 0; d < n; ++d) {
            double coord = 0.0;
            if (!(ls >> coord)) parse_fail("expected " + std::to_string(n) + " coordinates");
            c.points.push_back(coord);
        }
        double trailing;
        if (ls >> trailing) parse_fail("trailing data after coordinates");
        for (std::uint32_t prev : c.labels)
            if (prev == value) parse_fail("duplicate label " + lab);
        c.labels.push_back(value);
        ++rows;
    }
    if (n < 0) fail(path, "empty constellation file");
    if (rows != static_cast<std::size_t>(M))
        fail(path, "expected " + std::to_string(M) + " rows, got " + std::to_string(rows));
    validate(c);
    return normalize(c);
}

void save_constellation(const Constellation& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(path, "cannot open file for writing");
    const int m = c.bits();
    out << "# constellation: " << c.name << "\n";
    out << c.dims << " " << c.num_points() << "\n";
    char buf[40];
    for (int i = 0; i < c.num_points(); ++i) {
        out << label_string(c.labels[static_cast<std::size_t>(i)], m);
        for (int d = 0; d < c.dims; ++d) {
            std::snprintf(buf, sizeof(buf), " %.17g",
                          c.points[static_cast<std::size_t>(i) * c.dims + d]);
            out << buf;
        }
        out << "\n";
    }
    if (!out) fail(path, "write failed");
}

std::string default_data_dir() {
    if (const char* env = std::getenv("BICM_DATA_DIR"); env && *env) return env;
#ifdef BICM_DEFAULT_DATA_DIR
    return BICM_DEFAULT_DATA_DIR;
#else
    return ".";
#endif
}

const std::vector<std::string>& builtin_constellation_names() {
    static const std::vector<std::string> names = {"pm-qpsk", "pm-16qam", "c4_16", "so-pm-qpsk",
                                                   "c4_256"};
    return names;
}

ResolvedConstellation resolve_constellation(const std::string& name, const std::string& data_dir) {
    std::string canon = name;
    std::replace(canon.begin(), canon.end(), '_', '-');
    if (canon == "pm-qpsk") {
        const int dims = 4;
        PamAlphabet pam = make_pam(2);
        Constellation c = make_cartesian(pam, dims, "pm-qpsk");
        return {std::move(c), scale_pam(pam, 1.0 / std::sqrt(double(dims)))};
    }
    if (canon == "pm-16qam") {
        const int dims = 4;
        PamAlphabet pam = make_pam(4);
        Constellation c = make_cartesian(pam, dims, "pm-16qam");
        return {std::move(c), scale_pam(pam, 1.0 / std::sqrt(double(dims)))};
    }
    std::string file = name;
    std::replace(file.begin(), file.end(), '-', '_');
    if (file == "c4_16" || file == "so_pm_qpsk" || file == "c4_256") {
        const std::string dir = data_dir.empty() ? default_data_dir() : data_dir;
        Constellation c = load_constellation(dir + "/constellations/" + file + ".txt");
        c.name = file;
        return {std::move(c), std::nullopt};
    }
    throw std::invalid_argument("unknown constellation '" + name +
                                "' (use a built-in name or --constellation-file)");
}

} // namespace bicm

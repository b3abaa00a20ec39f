#include "bicm/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bicm {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

struct Token {
    long value;
    std::size_t line;
};

std::vector<Token> tokenize(std::istream& in, const std::string& path) {
    std::vector<Token> tokens;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t pos = 0;
                const long v = std::stol(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
                tokens.push_back({v, line_no});
            } catch (const std::exception&) {
                fail(path, line_no, "not an integer: '" + tok + "'");
            }
        }
    }
    return tokens;
}

// Dense GF(2) elimination on a copy of H to extract the encoder structure:
// a set of pivot columns (one per independent row), the complementary
// systematic columns, and the reduced rows expressing each parity bit as an
// XOR of info bits.
void build_encoder(LdpcCode& code) {
    const int n = code.n;
    const int rows = code.n_checks;
    const int words = (n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> h(static_cast<std::size_t>(rows),
                                              std::vector<std::uint64_t>(
                                                  static_cast<std::size_t>(words), 0));
    for (int r = 0; r < rows; ++r)
        for (int v : code.check_neighbors[static_cast<std::size_t>(r)])
            h[static_cast<std::size_t>(r)][static_cast<std::size_t>(v) / 64] ^=
                1ull << (static_cast<std::size_t>(v) % 64);

    auto get = [&](int r, int cidx) {
        return (h[static_cast<std::size_t>(r)][static_cast<std::size_t>(cidx) / 64] >>
                (static_cast<std::size_t>(cidx) % 64)) &
               1ull;
    };

    std::vector<int> pivot_cols;
    std::vector<int> pivot_row_of_col(static_cast<std::size_t>(n), -1);
    int rank = 0;
    for (int col = 0; col < n && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (get(r, col)) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(h[static_cast<std::size_t>(pivot)], h[static_cast<std::size_t>(rank)]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || !get(r, col)) continue;
            for (int w = 0; w < words; ++w)
                h[static_cast<std::size_t>(r)][static_cast<std::size_t>(w)] ^=
                    h[static_cast<std::size_t>(rank)][static_cast<std::size_t>(w)];
        }
        pivot_cols.push_back(col);
        pivot_row_of_col[static_cast<std::size_t>(col)] = rank;
        ++rank;
    }

    code.rank = rank;
    code.parity_cols = pivot_cols;
    code.info_cols.clear();
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (int c : pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[static_cast<std::size_t>(c)]) code.info_cols.push_back(c);

    const int k = code.k();
    const int kwords = (k + 63) / 64;
    code.encoder_rows.assign(static_cast<std::size_t>(rank),
                             std::vector<std::uint64_t>(static_cast<std::size_t>(kwords), 0));
    for (int r = 0; r < rank; ++r)
        for (int c = 0; c < k; ++c)
            if (get(r, code.info_cols[static_cast<std::size_t>(c)]))
                code.encoder_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c) / 64] ^=
                    1ull << (static_cast<std::size_t>(c) % 64);
}

// boxplus in the log(p0/p1) domain: 2 atanh(tanh(a/2) tanh(b/2)), computed
// in the overflow-free min/log1p form.
double boxplus(double a, double b) {
    const double sgn = ((a < 0) != (b < 0)) ? -1.0 : 1.0;
    const double aa = std::abs(a), ab = std::abs(b);
    return sgn * std::min(aa, ab) + std::log1p(std::exp(-(aa + ab))) -
           std::log1p(std::exp(-std::abs(aa - ab)));
}

} // namespace

LdpcCode make_ldpc(int n, std::vector<std::vector<int>> check_neighbors) {
    LdpcCode code;
    code.n = n;
    code.n_checks = static_cast<int>(check_neighbors.size());
    code.check_neighbors = std::move(check_neighbors);
    code.var_neighbors.assign(static_cast<std::size_t>(n), {});
    for (int r = 0; r < code.n_checks; ++r) {
        auto& row = code.check_neighbors[static_cast<std::size_t>(r)];
        std::sort(row.begin(), row.end());
        for (int v : row) {
            if (v < 0 || v >= n) throw std::invalid_argument("variable index out of range");
            code.var_neighbors[static_cast<std::size_t>(v)].push_back(r);
        }
    }
    build_encoder(code);
    return code;
}

LdpcCode load_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open alist file");
    const std::vector<Token> toks = tokenize(in, path);
    std::size_t pos = 0;
    auto need = [&](const char* what) -> Token {
        if (pos >= toks.size()) {
            const std::size_t line = toks.empty() ? 1 : toks.back().line;
            fail(path, line, std::string("unexpected end of file, expected ") + what);
        }
        return toks[pos++];
    };

    const Token tn = need("n");
    const Token tm = need("m");
    if (tn.value < 1 || tm.value < 1) fail(path, tn.line, "invalid matrix dimensions");
    const int n = static_cast<int>(tn.value);
    const int m = static_cast<int>(tm.value);
    const long max_col = need("max column degree").value;
    const long max_row = need("max row degree").value;

    std::vector<int> col_deg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Token t = need("column degree");
        if (t.value < 0 || t.value > max_col) fail(path, t.line, "column degree out of range");
        col_deg[static_cast<std::size_t>(i)] = static_cast<int>(t.value);
    }
    std::vector<int> row_deg(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const Token t = need("row degree");
        if (t.value < 0 || t.value > max_row) fail(path, t.line, "row degree out of range");
        row_deg[static_cast<std::size_t>(i)] = static_cast<int>(t.value);
    }

    long sum_col = 0, sum_row = 0;
    for (int d : col_deg) sum_col += d;
    for (int d : row_deg) sum_row += d;
    if (sum_col != sum_row)
        fail(path, toks[3].line, "column degrees and row degrees disagree on edge count");

    // Entry lists are either padded with zeros to the max degree or exact.
    const std::size_t header = 4 + static_cast<std::size_t>(n) + static_cast<std::size_t>(m);
    const std::size_t remaining = toks.size() - std::min(toks.size(), header);
    const std::size_t padded_count = static_cast<std::size_t>(n) * max_col +
                                     static_cast<std::size_t>(m) * max_row;
    const std::size_t exact_count = static_cast<std::size_t>(sum_col + sum_row);
    bool padded;
    if (remaining == padded_count) {
        padded = true;
    } else if (remaining == exact_count) {
        padded = false;
    } else {
        fail(path, toks.back().line,
             "inconsistent entry count: " + std::to_string(remaining) + " entries, expected " +
                 std::to_string(exact_count) + " (exact) or " + std::to_string(padded_count) +
                 " (padded)");
    }

    std::vector<std::vector<int>> cols(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int deg = col_deg[static_cast<std::size_t>(i)];
        const int take = padded ? static_cast<int>(max_col) : deg;
        for (int e = 0; e < take; ++e) {
            const Token t = need("column entry");
            if (e < deg) {
                if (t.value < 1 || t.value > m)
                    fail(path, t.line, "check index " + std::to_string(t.value) + " out of range");
                cols[static_cast<std::size_t>(i)].push_back(static_cast<int>(t.value - 1));
            } else if (t.value != 0) {
                fail(path, t.line, "expected zero padding");
            }
        }
    }
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const int deg = row_deg[static_cast<std::size_t>(i)];
        const int take = padded ? static_cast<int>(max_row) : deg;
        for (int e = 0; e < take; ++e) {
            const Token t = need("row entry");
            if (e < deg) {
                if (t.value < 1 || t.value > n)
                    fail(path, t.line,
                         "variable index " + std::to_string(t.value) + " out of range");
                rows[static_cast<std::size_t>(i)].push_back(static_cast<int>(t.value - 1));
            } else if (t.value != 0) {
                fail(path, t.line, "expected zero padding");
            }
        }
    }

    // Cross-check the two adjacency lists.
    std::vector<std::vector<int>> from_cols(static_cast<std::size_t>(m));
    for (int v = 0; v < n; ++v)
        for (int c : cols[static_cast<std::size_t>(v)])
            from_cols[static_cast<std::size_t>(c)].push_back(v);
    for (int c = 0; c < m; ++c) {
        auto a = from_cols[static_cast<std::size_t>(c)];
        auto b = rows[static_cast<std::size_t>(c)];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b)
            fail(path, toks.back().line,
                 "row list of check " + std::to_string(c + 1) + " disagrees with column lists");
    }

    return make_ldpc(n, std::move(rows));
}

void save_alist(const LdpcCode& code, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    const int n = code.n, m = code.n_checks;
    std::size_t max_col = 0, max_row = 0;
    for (const auto& v : code.var_neighbors) max_col = std::max(max_col, v.size());
    for (const auto& c : code.check_neighbors) max_row = std::max(max_row, c.size());
    out << n << " " << m << "\n" << max_col << " " << max_row << "\n";
    for (int i = 0; i < n; ++i)
        out << code.var_neighbors[static_cast<std::size_t>(i)].size()
            << (i + 1 == n ? "\n" : " ");
    for (int i = 0; i < m; ++i)
        out << code.check_neighbors[static_cast<std::size_t>(i)].size()
            << (i + 1 == m ? "\n" : " ");
    for (const auto& v : code.var_neighbors) {
        for (std::size_t e = 0; e < max_col; ++e)
            out << (e < v.size() ? v[e] + 1 : 0) << (e + 1 == max_col ? "\n" : " ");
    }
    for (const auto& c : code.check_neighbors) {
        for (std::size_t e = 0; e < max_row; ++e)
            out << (e < c.size() ? c[e] + 1 : 0) << (e + 1 == max_row ? "\n" : " ");
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<std::uint8_t> encode(const LdpcCode& code, std::span<const std::uint8_t> info) {
    if (static_cast<int>(info.size()) != code.k())
        throw std::invalid_argument("info length does not match code dimension k");
    std::vector<std::uint8_t> cw(static_cast<std::size_t>(code.n), 0);
    for (int c = 0; c < code.k(); ++c)
        cw[static_cast<std::size_t>(code.info_cols[static_cast<std::size_t>(c)])] =
            info[static_cast<std::size_t>(c)] & 1;
    const int kwords = (code.k() + 63) / 64;
    std::vector<std::uint64_t> ivec(static_cast<std::size_t>(kwords), 0);
    for (int c = 0; c < code.k(); ++c)
        if (info[static_cast<std::size_t>(c)] & 1)
            ivec[static_cast<std::size_t>(c) / 64] ^= 1ull << (static_cast<std::size_t>(c) % 64);
    for (int r = 0; r < code.rank; ++r) {
        std::uint64_t acc = 0;
        const auto& row = code.encoder_rows[static_cast<std::size_t>(r)];
        for (int w = 0; w < kwords; ++w)
            acc ^= row[static_cast<std::size_t>(w)] & ivec[static_cast<std::size_t>(w)];
        cw[static_cast<std::size_t>(code.parity_cols[static_cast<std::size_t>(r)])] =
            static_cast<std::uint8_t>(__builtin_parityll(acc));
    }
    return cw;
}

DecodeResult decode_bp(const LdpcCode& code, std::span<const double> llrs, int max_iterations) {
    if (static_cast<int>(llrs.size()) != code.n)
        throw std::invalid_argument("LLR length does not match code length");

    // Internal messages use the log(p0/p1) convention; inputs arrive as
    // log(p1/p0) and are negated on entry. Bits come back out directly.
    const int n = code.n;
    const int mchk = code.n_checks;
    std::vector<double> ch(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) ch[static_cast<std::size_t>(v)] = -llrs[static_cast<std::size_t>(v)];

    // Edge storage in check-major order.
    std::vector<int> check_offset(static_cast<std::size_t>(mchk) + 1, 0);
    for (int c = 0; c < mchk; ++c)
        check_offset[static_cast<std::size_t>(c) + 1] =
            check_offset[static_cast<std::size_t>(c)] +
            static_cast<int>(code.check_neighbors[static_cast<std::size_t>(c)].size());
    const int n_edges = check_offset[static_cast<std::size_t>(mchk)];
    std::vector<int> edge_var(static_cast<std::size_t>(n_edges));
    std::vector<std::vector<int>> var_edges(static_cast<std::size_t>(n));
    for (int c = 0; c < mchk; ++c) {
        int e = check_offset[static_cast<std::size_t>(c)];
        for (int v : code.check_neighbors[static_cast<std::size_t>(c)]) {
            edge_var[static_cast<std::size_t>(e)] = v;
            var_edges[static_cast<std::size_t>(v)].push_back(e);
            ++e;
        }
    }

    std::vector<double> v2c(static_cast<std::size_t>(n_edges));
    std::vector<double> c2v(static_cast<std::size_t>(n_edges), 0.0);
    for (int e = 0; e < n_edges; ++e)
        v2c[static_cast<std::size_t>(e)] = ch[static_cast<std::size_t>(edge_var[
            static_cast<std::size_t>(e)])];

    std::vector<double> posterior(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> decision(static_cast<std::size_t>(n));
    std::vector<double> fwd, bwd;

    auto decide = [&]() {
        bool decided = true;
        for (int v = 0; v < n; ++v) {
            const double p = posterior[static_cast<std::size_t>(v)];
            decision[static_cast<std::size_t>(v)] = p < 0.0 ? 1 : 0;
            if (p == 0.0) decided = false;
        }
        if (!decided) return false;
        for (int c = 0; c < mchk; ++c) {
            int parity = 0;
            for (int v : code.check_neighbors[static_cast<std::size_t>(c)])
                parity ^= decision[static_cast<std::size_t>(v)];
            if (parity) return false;
        }
        return true;
    };

    // Channel-only decision may already be a codeword.
    for (int v = 0; v < n; ++v) posterior[static_cast<std::size_t>(v)] = ch[static_cast<std::size_t>(v)];
    if (decide()) return {decision, 0, true};

    DecodeResult result;
    for (int iter = 1; iter <= max_iterations; ++iter) {
        // Check-node update: forward-backward boxplus over each row.
        for (int c = 0; c < mchk; ++c) {
            const int lo = check_offset[static_cast<std::size_t>(c)];
            const int hi = check_offset[static_cast<std::size_t>(c) + 1];
            const int deg = hi - lo;
            if (deg == 1) {
                // A degree-1 check pins its variable to 0; keep the
                // certainty finite so posteriors cannot produce inf - inf.
                c2v[static_cast<std::size_t>(lo)] = 100.0;
                continue;
            }
            fwd.assign(static_cast<std::size_t>(deg), 0.0);
            bwd.assign(static_cast<std::size_t>(deg), 0.0);
            fwd[0] = v2c[static_cast<std::size_t>(lo)];
            for (int e = 1; e < deg; ++e)
                fwd[static_cast<std::size_t>(e)] =
                    boxplus(fwd[static_cast<std::size_t>(e - 1)],
                            v2c[static_cast<std::size_t>(lo + e)]);
            bwd[static_cast<std::size_t>(deg - 1)] = v2c[static_cast<std::size_t>(hi - 1)];
            for (int e = deg - 2; e >= 0; --e)
                bwd[static_cast<std::size_t>(e)] =
                    boxplus(bwd[static_cast<std::size_t>(e + 1)],
                            v2c[static_cast<std::size_t>(lo + e)]);
            for (int e = 0; e < deg; ++e) {
                if (e == 0)
                    c2v[static_cast<std::size_t>(lo)] = bwd[1];
                else if (e == deg - 1)
                    c2v[static_cast<std::size_t>(hi - 1)] = fwd[static_cast<std::size_t>(deg - 2)];
                else
                    c2v[static_cast<std::size_t>(lo + e)] =
                        boxplus(fwd[static_cast<std::size_t>(e - 1)],
                                bwd[static_cast<std::size_t>(e + 1)]);
            }
        }
        // Variable-node update and posteriors.
        for (int v = 0; v < n; ++v) {
            double total = ch[static_cast<std::size_t>(v)];
            for (int e : var_edges[static_cast<std::size_t>(v)])
                total += c2v[static_cast<std::size_t>(e)];
            posterior[static_cast<std::size_t>(v)] = total;
            for (int e : var_edges[static_cast<std::size_t>(v)])
                v2c[static_cast<std::size_t>(e)] = total - c2v[static_cast<std::size_t>(e)];
        }
        result.iterations = iter;
        if (decide()) {
            result.bits = decision;
            result.converged = true;
            return result;
        }
    }
    result.bits = decision;
    result.converged = false;
    return result;
}

} // namespace bicm

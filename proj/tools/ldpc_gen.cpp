// Deterministic PEG-style construction of regular LDPC parity-check
// matrices, written as alist files. Each variable node's edges go to the
// check that is farthest in the current Tanner graph (unreached first),
// ties broken by lowest current degree and then lowest index, which makes
// the output a pure function of (n, checks, var_degree).
#include <algorithm>
#include <cstdint>
#include <deque>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bicm/ldpc.hpp"

namespace {

std::vector<std::vector<int>> peg_construct(int n, int m, int var_degree) {
    std::vector<std::vector<int>> check_nbrs(static_cast<std::size_t>(m));
    std::vector<std::vector<int>> var_nbrs(static_cast<std::size_t>(n));

    std::vector<int> depth(static_cast<std::size_t>(m));
    auto bfs_depths = [&](int root) {
        // depth of every check from variable `root`; -1 when unreachable
        std::fill(depth.begin(), depth.end(), -1);
        std::vector<int> var_seen(static_cast<std::size_t>(n), 0);
        var_seen[static_cast<std::size_t>(root)] = 1;
        std::deque<int> frontier = {root}; // variable nodes
        int level = 0;
        while (!frontier.empty()) {
            std::deque<int> next_vars;
            for (int v : frontier) {
                for (int c : var_nbrs[static_cast<std::size_t>(v)]) {
                    if (depth[static_cast<std::size_t>(c)] >= 0) continue;
                    depth[static_cast<std::size_t>(c)] = level;
                    for (int v2 : check_nbrs[static_cast<std::size_t>(c)]) {
                        if (!var_seen[static_cast<std::size_t>(v2)]) {
                            var_seen[static_cast<std::size_t>(v2)] = 1;
                            next_vars.push_back(v2);
                        }
                    }
                }
            }
            frontier = std::move(next_vars);
            ++level;
        }
    };

    for (int v = 0; v < n; ++v) {
        for (int e = 0; e < var_degree; ++e) {
            int best = -1;
            if (e == 0) {
                for (int c = 0; c < m; ++c)
                    if (best < 0 || check_nbrs[static_cast<std::size_t>(c)].size() <
                                        check_nbrs[static_cast<std::size_t>(best)].size())
                        best = c;
            } else {
                bfs_depths(v);
                int best_depth = -1; // unreachable checks rank deepest
                for (int c = 0; c < m; ++c) {
                    const bool adjacent =
                        std::find(var_nbrs[static_cast<std::size_t>(v)].begin(),
                                  var_nbrs[static_cast<std::size_t>(v)].end(),
                                  c) != var_nbrs[static_cast<std::size_t>(v)].end();
                    if (adjacent) continue;
                    const int d = depth[static_cast<std::size_t>(c)];
                    const int rankd = d < 0 ? (1 << 30) : d;
                    if (best < 0 || rankd > best_depth ||
                        (rankd == best_depth && check_nbrs[static_cast<std::size_t>(c)].size() <
                                                    check_nbrs[static_cast<std::size_t>(best)]
                                                        .size())) {
                        best = c;
                        best_depth = rankd;
                    }
                }
            }
            check_nbrs[static_cast<std::size_t>(best)].push_back(v);
            var_nbrs[static_cast<std::size_t>(v)].push_back(best);
        }
    }
    return check_nbrs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PEG-style regular LDPC parity-check matrix generator"};
    int n = 1008;
    int checks = 504;
    int var_degree = 3;
    std::string out;
    app.add_option("--n", n, "codeword length")->check(CLI::PositiveNumber);
    app.add_option("--checks", checks, "number of parity checks")->check(CLI::PositiveNumber);
    app.add_option("--var-degree", var_degree, "variable node degree")
        ->check(CLI::PositiveNumber);
    app.add_option("-o,--output", out, "alist output path")->required();
    CLI11_PARSE(app, argc, argv);

    if ((static_cast<long long>(n) * var_degree) % checks != 0) {
        std::cerr << "edge count " << n * var_degree << " is not divisible by " << checks
                  << " checks; the code would be irregular\n";
        return 1;
    }

    auto check_nbrs = peg_construct(n, checks, var_degree);
    const bicm::LdpcCode code = bicm::make_ldpc(n, std::move(check_nbrs));
    bicm::save_alist(code, out);

    std::cout << "n=" << code.n << " checks=" << code.n_checks << " rank=" << code.rank
              << " k=" << code.k() << " rate=" << code.rate() << "\n";
    if (code.rank != code.n_checks)
        std::cout << "note: " << (code.n_checks - code.rank)
                  << " dependent rows; effective rate recomputed from rank\n";
    return 0;
}

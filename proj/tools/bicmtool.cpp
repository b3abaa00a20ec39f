// Command-line front end: achievable-rate curves, Shannon reference curves,
// coded BER sweeps, labeling optimization and GMI-curve crossings for
// labeled multidimensional constellations over the vector AWGN channel.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bicm/channel.hpp"
#include "bicm/constellation.hpp"
#include "bicm/labeling.hpp"
#include "bicm/ldpc.hpp"
#include "bicm/rates.hpp"
#include "bicm/rng.hpp"
#include "bicm/simulation.hpp"

namespace {

using nlohmann::json;

// Output files land under a .partial suffix first and are renamed only when
// complete, so an interrupted run never leaves a truncated file in place.
void write_file(const std::string& path, const std::string& content) {
    const std::string partial = path + ".partial";
    {
        std::ofstream out(partial);
        if (!out) throw std::runtime_error(path + ": cannot open for writing");
        out << content;
        if (!out) throw std::runtime_error(partial + ": write failed");
    }
    std::filesystem::rename(partial, path);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        write_file(path, content);
}

struct ConstellationFlags {
    std::string name;
    std::string file;
};

void add_constellation_flags(CLI::App* cmd, ConstellationFlags& flags, bool required = true) {
    auto* name = cmd->add_option("-c,--constellation", flags.name,
                                 "built-in constellation (pm-qpsk, pm-16qam, c4_16, "
                                 "so-pm-qpsk, c4_256)");
    auto* file = cmd->add_option("--constellation-file", flags.file,
                                 "constellation file (overrides --constellation)");
    if (required) {
        name->excludes(file);
        cmd->callback([&flags, cmd]() {
            if (flags.name.empty() && flags.file.empty())
                throw CLI::RequiredError(cmd->get_name() +
                                         " requires --constellation or --constellation-file");
        });
    }
}

bicm::ResolvedConstellation resolve_flags(const ConstellationFlags& flags) {
    if (!flags.file.empty()) {
        bicm::Constellation c = bicm::load_constellation(flags.file);
        c.name = std::filesystem::path(flags.file).stem().string();
        return {std::move(c), std::nullopt};
    }
    return bicm::resolve_constellation(flags.name);
}

struct GridFlags {
    double start = -10.0;
    double stop = 16.0;
    double step = 0.25;
};

void add_grid_flags(CLI::App* cmd, GridFlags& grid) {
    cmd->add_option("--snr-start", grid.start, "Es/N0 grid start in dB");
    cmd->add_option("--snr-stop", grid.stop, "Es/N0 grid stop in dB");
    cmd->add_option("--snr-step", grid.step, "Es/N0 grid step in dB");
}

json rate_curve_json(const bicm::RateCurve& curve) {
    json j;
    j["constellation"] = curve.constellation;
    j["method"] = curve.method == bicm::RateMethod::quadrature ? "quadrature" : "montecarlo";
    if (curve.method == bicm::RateMethod::quadrature)
        j["order"] = curve.quad_order;
    else
        j["samples"] = curve.samples;
    j["points"] = json::array();
    for (const auto& r : curve.points) {
        json p = {{"es_n0_db", r.es_n0_db}, {"mi", r.mi}, {"gmi", r.gmi}, {"bit_mi", r.bit_mi}};
        if (r.mi > 1e-12) p["eb_n0_db_mi"] = bicm::eb_n0_db(r.es_n0_db, r.mi);
        if (r.gmi > 1e-12) p["eb_n0_db_gmi"] = bicm::eb_n0_db(r.es_n0_db, r.gmi);
        if (curve.method == bicm::RateMethod::montecarlo) {
            p["mi_se"] = r.mi_se;
            p["gmi_se"] = r.gmi_se;
        }
        j["points"].push_back(p);
    }
    return j;
}

int run_info(const ConstellationFlags& flags, const std::string& ref_name,
             const std::string& out) {
    const auto rc = resolve_flags(flags);
    const auto& c = rc.constellation;
    std::ostringstream os;
    os << "name:              " << c.name << "\n"
       << "dimensions:        " << c.dims << "\n"
       << "points:            " << c.num_points() << "\n"
       << "bits/symbol:       " << c.bits() << "\n"
       << "avg symbol energy: " << c.average_energy() << "\n"
       << "min squared dist:  " << bicm::min_squared_distance(c) << "\n"
       << "gray product:      " << (rc.dim_pam ? "yes" : "no") << "\n";
    if (!ref_name.empty()) {
        const auto ref = bicm::resolve_constellation(ref_name);
        os << "asymptotic gain over " << ref_name << ": "
           << bicm::asymptotic_gain_db(c, ref.constellation) << " dB\n";
    }
    emit(out, os.str());
    return 0;
}

int run_rates(const ConstellationFlags& flags, const GridFlags& grid, const std::string& method,
              int order, double samples, std::uint64_t seed, unsigned threads,
              const std::string& format, const std::string& out) {
    const auto rc = resolve_flags(flags);
    bicm::RateCurveConfig cfg;
    cfg.es_n0_db_grid = bicm::snr_grid(grid.start, grid.stop, grid.step);
    cfg.method = method == "montecarlo" ? bicm::RateMethod::montecarlo
                                        : bicm::RateMethod::quadrature;
    cfg.quad_order = order;
    cfg.samples = static_cast<std::uint64_t>(samples);
    cfg.seed = seed;
    cfg.threads = threads;
    const bicm::RateCurve curve = bicm::rate_curve(rc.constellation, cfg);
    if (format == "json") {
        emit(out, rate_curve_json(curve).dump(2) + "\n");
    } else {
        std::ostringstream os;
        bicm::write_rate_curve_csv(os, curve);
        emit(out, os.str());
    }
    return 0;
}

int run_capacity(int dims, const GridFlags& grid, const std::string& format,
                 const std::string& out) {
    const auto es_grid = bicm::snr_grid(grid.start, grid.stop, grid.step);
    if (format == "json") {
        json j;
        j["dims"] = dims;
        j["points"] = json::array();
        for (double es : es_grid) {
            const double c = bicm::shannon_capacity(es, dims);
            json p = {{"es_n0_db", es}, {"capacity", c}};
            if (c > 1e-12) p["eb_n0_db"] = bicm::eb_n0_db(es, c);
            j["points"].push_back(p);
        }
        emit(out, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "es_n0_db,eb_n0_db,capacity\n";
        char buf[96];
        for (double es : es_grid) {
            const double c = bicm::shannon_capacity(es, dims);
            const double eb = c > 1e-12 ? bicm::eb_n0_db(es, c)
                                        : std::numeric_limits<double>::infinity();
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", es, eb, c);
            os << buf;
        }
        emit(out, os.str());
    }
    return 0;
}

int run_ber_cmd(const std::vector<std::string>& constellations, const std::string& file,
                const std::string& code_path, const GridFlags& grid, std::uint64_t max_blocks,
                std::uint64_t min_errors, int iters, const std::string& demapper,
                std::uint64_t seed, unsigned threads, const std::string& out_prefix) {
    const bicm::LdpcCode code = bicm::load_alist(code_path);
    const std::string code_name = std::filesystem::path(code_path).stem().string();

    bicm::DemapMode mode = bicm::DemapMode::exact;
    if (demapper == "maxlog") mode = bicm::DemapMode::maxlog;
    else if (demapper == "factorized") mode = bicm::DemapMode::factorized;

    std::vector<bicm::ResolvedConstellation> targets;
    std::vector<std::string> names;
    if (!file.empty()) {
        ConstellationFlags f;
        f.file = file;
        targets.push_back(resolve_flags(f));
        names.push_back(targets.back().constellation.name);
    }
    for (const auto& n : constellations) {
        targets.push_back(bicm::resolve_constellation(n));
        names.push_back(n);
    }
    if (targets.empty()) throw CLI::RequiredError("ber requires --constellations or --constellation-file");

    for (std::size_t i = 0; i < targets.size(); ++i) {
        bicm::SimConfig cfg;
        cfg.constellation = targets[i];
        cfg.code = code;
        cfg.code_name = code_name;
        cfg.demapper = mode;
        cfg.es_n0_db_grid = bicm::snr_grid(grid.start, grid.stop, grid.step);
        cfg.max_blocks = max_blocks;
        cfg.min_bit_errors = min_errors;
        cfg.max_iterations = iters;
        // Every constellation in one invocation owns an independent seed
        // derived as splitmix64(seed + index).
        cfg.master_seed = bicm::splitmix64(seed + i);
        cfg.threads = threads;
        const bicm::SimResult res = bicm::run_ber(cfg);

        std::ostringstream os;
        bicm::write_sim_csv(os, res);
        const std::string base = out_prefix + names[i];
        write_file(base + ".csv", os.str());

        json j = json::parse(bicm::sim_result_json(res));
        j["config"]["seed_derivation"] = {
            {"cli_seed", seed}, {"constellation_index", i}, {"derived_master_seed", cfg.master_seed}};
        write_file(base + ".json", j.dump(2) + "\n");
        std::cout << base << ".csv\n" << base << ".json\n";
    }
    return 0;
}

int run_label_opt(const ConstellationFlags& flags, const std::vector<double>& targets,
                  int restarts, int search_order, int final_order, double epsilon,
                  std::uint64_t seed, unsigned threads, const std::string& out,
                  std::string report_path) {
    const auto rc = resolve_flags(flags);
    bicm::LabelingSearchConfig cfg;
    if (!targets.empty()) cfg.targets_es_n0_db = targets;
    cfg.restarts = restarts;
    cfg.search_order = search_order;
    cfg.final_order = final_order;
    cfg.epsilon = epsilon;
    cfg.seed = seed;
    cfg.threads = threads;
    const bicm::LabelingResult res = bicm::optimize_labeling(rc.constellation, cfg);

    bicm::Constellation optimized = res.constellation;
    optimized.name = rc.constellation.name;
    const std::string partial = out + ".partial";
    bicm::save_constellation(optimized, partial);
    std::filesystem::rename(partial, out);

    if (report_path.empty()) report_path = out + ".report.json";
    json j;
    j["constellation"] = optimized.name;
    j["objective_mean_gmi"] = res.objective;
    j["best_restart"] = res.best_restart;
    j["targets_es_n0_db"] = cfg.targets_es_n0_db;
    j["search_order"] = cfg.search_order;
    j["final_order"] = cfg.final_order;
    j["epsilon"] = cfg.epsilon;
    j["seed"] = cfg.seed;
    j["restarts"] = json::array();
    for (const auto& r : res.restarts)
        j["restarts"].push_back({{"objective", r.objective},
                                 {"objective_search_order", r.objective_search},
                                 {"passes", r.passes},
                                 {"ascent", r.ascent}});
    write_file(report_path, j.dump(2) + "\n");
    std::cout << "objective (mean GMI over targets): " << res.objective << "\n"
              << out << "\n"
              << report_path << "\n";
    return 0;
}

int run_crossing(const std::string& name_a, const std::string& name_b, const std::string& which,
                 const GridFlags& grid, int order, unsigned threads, const std::string& out) {
    const auto a = bicm::resolve_constellation(name_a);
    const auto b = bicm::resolve_constellation(name_b);
    bicm::RateCurveConfig cfg;
    cfg.es_n0_db_grid = bicm::snr_grid(grid.start, grid.stop, grid.step);
    cfg.quad_order = order;
    cfg.threads = threads;
    const bicm::RateCurve ca = bicm::rate_curve(a.constellation, cfg);
    const bicm::RateCurve cb = bicm::rate_curve(b.constellation, cfg);
    const auto kind = which == "mi" ? bicm::RateKind::mi : bicm::RateKind::gmi;
    const auto r = bicm::find_crossing(ca, cb, kind);

    json j = {{"a", name_a}, {"b", name_b}, {"which", which}};
    if (r) {
        j["crossing_rate_bit_per_symbol"] = *r;
        std::cout << which << " curves of " << name_a << " and " << name_b
                  << " cross at R = " << *r << " bit/symbol\n";
    } else {
        j["crossing_rate_bit_per_symbol"] = nullptr;
        std::cout << "no crossing\n";
    }
    if (!out.empty()) write_file(out, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Achievable rates and coded BER for multidimensional constellations "
                 "with bit-wise receivers"};
    app.require_subcommand(1);

    // info
    auto* info = app.add_subcommand("info", "constellation summary");
    ConstellationFlags info_const;
    add_constellation_flags(info, info_const);
    std::string info_ref, info_out;
    info->add_option("--ref", info_ref, "reference constellation for the asymptotic gain");
    info->add_option("-o,--output", info_out, "output path (default stdout)");

    // rates
    auto* rates = app.add_subcommand("rates", "MI/GMI curve over an SNR grid");
    ConstellationFlags rates_const;
    add_constellation_flags(rates, rates_const);
    GridFlags rates_grid;
    add_grid_flags(rates, rates_grid);
    std::string rates_method = "quadrature", rates_format = "csv", rates_out;
    int rates_order = 10;
    double rates_samples = 1e6;
    std::uint64_t rates_seed = 1;
    unsigned rates_threads = 0;
    rates->add_option("--method", rates_method, "quadrature|montecarlo")
        ->check(CLI::IsMember({"quadrature", "montecarlo"}));
    rates->add_option("--order", rates_order, "Gauss-Hermite order per dimension")
        ->check(CLI::PositiveNumber);
    rates->add_option("--samples", rates_samples, "Monte Carlo samples")
        ->check(CLI::PositiveNumber);
    rates->add_option("--seed", rates_seed, "Monte Carlo master seed");
    rates->add_option("--threads", rates_threads, "worker threads (0 = all cores)");
    rates->add_option("--format", rates_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    rates->add_option("-o,--output", rates_out, "output path (default stdout)");

    // capacity
    auto* capacity = app.add_subcommand("capacity", "Shannon capacity reference curve");
    GridFlags cap_grid;
    add_grid_flags(capacity, cap_grid);
    int cap_dims = 4;
    std::string cap_format = "csv", cap_out;
    capacity->add_option("--dims", cap_dims, "real dimensions (even)");
    capacity->add_option("--format", cap_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    capacity->add_option("-o,--output", cap_out, "output path (default stdout)");

    // ber
    auto* ber = app.add_subcommand("ber", "coded BER sweep (CSV + JSON per constellation)");
    std::vector<std::string> ber_consts;
    std::string ber_file, ber_code, ber_demapper = "exact", ber_prefix = "ber_";
    GridFlags ber_grid{0.0, 6.0, 0.25};
    std::uint64_t ber_blocks = 20000, ber_min_errors = 100, ber_seed = 1;
    int ber_iters = 50;
    unsigned ber_threads = 0;
    ber->add_option("--constellations", ber_consts, "built-in constellation names")
        ->delimiter(',');
    ber->add_option("--constellation-file", ber_file, "constellation file");
    ber->add_option("--code", ber_code, "LDPC parity-check matrix (alist)")->required();
    add_grid_flags(ber, ber_grid);
    ber->add_option("--max-blocks", ber_blocks, "block cap per SNR point");
    ber->add_option("--min-errors", ber_min_errors, "stop a point after this many bit errors");
    ber->add_option("--iters", ber_iters, "decoder iterations")->check(CLI::PositiveNumber);
    ber->add_option("--demapper", ber_demapper, "exact|maxlog|factorized")
        ->check(CLI::IsMember({"exact", "maxlog", "factorized"}));
    ber->add_option("--seed", ber_seed, "master seed");
    ber->add_option("--threads", ber_threads, "worker threads (0 = all cores)");
    ber->add_option("-o,--output-prefix", ber_prefix, "output file prefix");

    // label-opt
    auto* lopt = app.add_subcommand("label-opt", "GMI-maximizing labeling search");
    ConstellationFlags lopt_const;
    add_constellation_flags(lopt, lopt_const);
    std::vector<double> lopt_targets;
    int lopt_restarts = 5, lopt_search_order = 6, lopt_final_order = 10;
    double lopt_eps = 1e-5;
    std::uint64_t lopt_seed = 1;
    unsigned lopt_threads = 0;
    std::string lopt_out, lopt_report;
    lopt->add_option("--targets", lopt_targets, "target Es/N0 values in dB")->delimiter(',');
    lopt->add_option("--restarts", lopt_restarts, "random restarts")
        ->check(CLI::PositiveNumber);
    lopt->add_option("--search-order", lopt_search_order, "quadrature order during the climb")
        ->check(CLI::PositiveNumber);
    lopt->add_option("--order", lopt_final_order, "quadrature order for the final objective")
        ->check(CLI::PositiveNumber);
    lopt->add_option("--epsilon", lopt_eps, "minimum accepted improvement (bit)");
    lopt->add_option("--seed", lopt_seed, "rng seed");
    lopt->add_option("--threads", lopt_threads, "worker threads (0 = all cores)");
    lopt->add_option("-o,--output", lopt_out, "optimized constellation file")->required();
    lopt->add_option("--report", lopt_report, "JSON report path (default <output>.report.json)");

    // crossing
    auto* crossing = app.add_subcommand("crossing", "rate at which two curves cross");
    std::string cross_a, cross_b, cross_which = "gmi", cross_out;
    GridFlags cross_grid;
    int cross_order = 10;
    unsigned cross_threads = 0;
    crossing->add_option("--a", cross_a, "first constellation")->required();
    crossing->add_option("--b", cross_b, "second constellation")->required();
    crossing->add_option("--which", cross_which, "mi|gmi")
        ->check(CLI::IsMember({"mi", "gmi"}));
    add_grid_flags(crossing, cross_grid);
    crossing->add_option("--order", cross_order, "quadrature order");
    crossing->add_option("--threads", cross_threads, "worker threads (0 = all cores)");
    crossing->add_option("-o,--output", cross_out, "JSON output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*info) return run_info(info_const, info_ref, info_out);
        if (*rates)
            return run_rates(rates_const, rates_grid, rates_method, rates_order, rates_samples,
                             rates_seed, rates_threads, rates_format, rates_out);
        if (*capacity) return run_capacity(cap_dims, cap_grid, cap_format, cap_out);
        if (*ber)
            return run_ber_cmd(ber_consts, ber_file, ber_code, ber_grid, ber_blocks,
                               ber_min_errors, ber_iters, ber_demapper, ber_seed, ber_threads,
                               ber_prefix);
        if (*lopt)
            return run_label_opt(lopt_const, lopt_targets, lopt_restarts, lopt_search_order,
                                 lopt_final_order, lopt_eps, lopt_seed, lopt_threads, lopt_out,
                                 lopt_report);
        if (*crossing)
            return run_crossing(cross_a, cross_b, cross_which, cross_grid, cross_order,
                                cross_threads, cross_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

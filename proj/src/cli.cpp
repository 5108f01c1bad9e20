#include "maillet/cli.hpp"

#include "maillet/errors.hpp"
#include "maillet/gpy_weights.hpp"
#include "maillet/maillet_scan.hpp"
#include "maillet/prime_engine.hpp"
#include "maillet/report.hpp"
#include "maillet/singular_series.hpp"
#include "maillet/tuple_lab.hpp"

#include <CLI11.hpp>

#include <functional>
#include <numeric>
#include <optional>

#ifndef MAILLET_VERSION
#define MAILLET_VERSION "dev"
#endif

namespace maillet {

namespace {

constexpr std::uint64_t kDefaultP0 = 1'000'000;

struct GlobalFlags {
    unsigned threads = 0;
    std::optional<std::uint64_t> p0;
    std::string csv;
    bool no_timings = false;

    Parallelism par() const { return {threads}; }
};

using Action = std::function<Json(RunManifest&)>;

Json nu_table(const KTuple& tuple) {
    Json rows = Json::array();
    const auto limit = static_cast<std::uint32_t>(std::max<std::size_t>(tuple.k(), 2));
    for (std::uint32_t p : small_primes(limit))
        rows.push_back({{"p", p}, {"nu_p", residues_covered(tuple, p)}});
    return rows;
}

Json tuple_summary(const KTuple& tuple) {
    return {{"offsets", to_json(tuple)},
            {"k", tuple.k()},
            {"admissible", is_admissible(tuple)},
            {"nu_p", nu_table(tuple)}};
}

struct GpyOptions {
    std::vector<std::uint64_t> offsets;
    std::uint64_t n = 0;
    std::optional<double> r_exp;
    std::optional<std::uint64_t> r;
    std::optional<std::uint64_t> ell;
    std::optional<std::uint64_t> span;

    void attach(CLI::App* cmd) {
        cmd->add_option("--offsets", offsets, "Comma-separated offsets h_i")->delimiter(',')->required();
        cmd->add_option("--n", n, "Window start N; sums run over [N, 2N]")->required();
        auto* re = cmd->add_option("--r-exp", r_exp, "Sieve level R = floor(N^e)");
        cmd->add_option("--r", r, "Sieve level R")->excludes(re);
        cmd->add_option("--ell", ell, "Extra power l (default floor(sqrt(k)/2))");
        cmd->add_option("--span", span, "Window length (default N)");
    }

    SieveParams params(const GlobalFlags& g, std::optional<std::uint64_t> T = std::nullopt) const {
        ParamChoices c;
        c.ell = ell;
        c.R = r;
        c.r_exponent = r_exp;
        c.span = span;
        c.T = T;
        auto tuple = KTuple::from_unsorted(offsets);
        if (g.p0) c.p0 = std::max(*g.p0, min_truncation(tuple));
        return make_params(std::move(tuple), n, c);
    }
};

std::uint64_t resolve_p0(const GlobalFlags& g, std::uint64_t required) {
    return std::max(g.p0.value_or(kDefaultP0), required);
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Prime k-tuples, singular series, GPY weights and Maillet scans", "maillet"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--threads", g.threads, "Worker threads (overrides MAILLET_THREADS)");
    app.add_option("--p0", g.p0, "Truncation prime for singular series");
    app.add_option("--csv", g.csv, "Write bulk rows to this CSV path");
    app.add_flag("--no-timings", g.no_timings, "Omit wall-clock timings from the manifest");

    Action action;
    std::string name;
    auto bind = [&](CLI::App* cmd, std::string label, Action a) {
        cmd->callback([&, label, a] {
            name = label;
            action = a;
        });
    };

    // primes
    std::uint64_t lo = 0, hi = 0;
    auto* primes_cmd = app.add_subcommand("primes", "List primes in [lo, hi]");
    primes_cmd->add_option("--lo", lo)->required();
    primes_cmd->add_option("--hi", hi)->required();
    bind(primes_cmd, "primes", [&](RunManifest& m) {
        m.parameters = {{"lo", lo}, {"hi", hi}};
        std::vector<std::uint64_t> ps;
        {
            PhaseTimer t(m, "sieve");
            ps = sieve_segment(lo, hi).primes();
        }
        Json result{{"count", ps.size()}};
        if (!g.csv.empty()) {
            CsvTable csv{{"p"}, {}};
            for (auto p : ps) csv.rows.push_back({std::to_string(p)});
            write_csv(g.csv, csv);
            result["csv"] = g.csv;
        } else {
            result["primes"] = ps;
        }
        return result;
    });

    // btcheck
    std::uint64_t bt_x = 0, bt_y = 0;
    auto* bt_cmd = app.add_subcommand("btcheck", "Compare pi(x+y) - pi(x) with 2y/log y");
    bt_cmd->add_option("--x", bt_x)->required();
    bt_cmd->add_option("--y", bt_y)->required();
    bind(bt_cmd, "btcheck", [&](RunManifest& m) {
        m.parameters = {{"x", bt_x}, {"y", bt_y}};
        const auto r = bt_check(bt_x, bt_y);
        if (!g.csv.empty())
            write_csv(g.csv, {{"pi_diff", "bound", "holds"},
                              {{std::to_string(r.pi_diff), format_number(r.bound), r.holds ? "true" : "false"}}});
        return Json{{"pi_diff", r.pi_diff}, {"bound", r.bound}, {"holds", r.holds}};
    });

    // tuple {check, mine, windows}
    auto* tuple_cmd = app.add_subcommand("tuple", "Admissible k-tuples");
    tuple_cmd->require_subcommand(1);
    std::vector<std::uint64_t> check_offsets;
    auto* check_cmd = tuple_cmd->add_subcommand("check", "Admissibility and nu_p table");
    check_cmd->add_option("--offsets", check_offsets)->delimiter(',')->required();
    bind(check_cmd, "tuple check", [&](RunManifest& m) {
        const auto tuple = KTuple::from_unsorted(check_offsets);
        m.parameters = {{"offsets", to_json(tuple)}};
        return tuple_summary(tuple);
    });

    std::uint64_t mine_k = 0, mine_max = 0;
    auto* mine_cmd = tuple_cmd->add_subcommand("mine", "Greedy admissible tuple from 0..M");
    mine_cmd->add_option("--k", mine_k)->required();
    mine_cmd->add_option("--max-candidate", mine_max)->required();
    bind(mine_cmd, "tuple mine", [&](RunManifest& m) {
        m.parameters = {{"k", mine_k}, {"max_candidate", mine_max}};
        std::vector<std::uint64_t> candidates(mine_max + 1);
        std::iota(candidates.begin(), candidates.end(), std::uint64_t{0});
        PhaseTimer t(m, "greedy");
        return tuple_summary(greedy_admissible(mine_k, candidates));
    });

    double win_eps = 0;
    std::uint64_t win_h1 = 0, win_count = 0, win_k = 0;
    auto* windows_cmd = tuple_cmd->add_subcommand("windows", "Interval system and one offset per window");
    windows_cmd->add_option("--eps", win_eps)->required();
    windows_cmd->add_option("--h1", win_h1)->required();
    windows_cmd->add_option("--count", win_count)->required();
    windows_cmd->add_option("--k", win_k, "Offsets to pick (default: count)");
    bind(windows_cmd, "tuple windows", [&](RunManifest& m) {
        const std::uint64_t k = win_k == 0 ? win_count : win_k;
        m.parameters = {{"eps", win_eps}, {"h1", win_h1}, {"count", win_count}, {"k", k}};
        const auto sys = interval_system(win_eps, win_h1, win_count);
        Json entries = Json::array();
        for (const auto& e : sys.entries)
            entries.push_back({{"H", e.base}, {"width", e.width}, {"I", to_json(e.full)},
                               {"I_prime", to_json(e.window)}});
        const auto tuple = pick_tuple_in_windows(sys, k);
        bool spaced = true;
        const auto h = tuple.offsets();
        for (std::size_t mu = 1; mu < h.size(); ++mu)
            for (std::size_t nu = 0; nu < mu; ++nu)
                spaced = spaced && sys.entries[mu].full.contains(h[mu] - h[nu]);
        Json j = tuple_summary(tuple);
        j["entries"] = std::move(entries);
        j["spacing_holds"] = spaced;
        return j;
    });

    // sing
    std::vector<std::uint64_t> sing_offsets;
    auto* sing_cmd = app.add_subcommand("sing", "Singular series with certified enclosure");
    sing_cmd->add_option("--offsets", sing_offsets)->delimiter(',')->required();
    bind(sing_cmd, "sing", [&](RunManifest& m) {
        const auto tuple = KTuple::from_unsorted(sing_offsets);
        const std::uint64_t p0 = resolve_p0(g, min_truncation(tuple));
        m.parameters = {{"offsets", to_json(tuple)}, {"p0", p0}};
        PhaseTimer t(m, "series");
        Json j = to_json(singular_series(tuple, p0));
        j["admissible"] = is_admissible(tuple);
        return j;
    });

    // sing-avg
    std::vector<std::uint64_t> avg_offsets;
    std::uint64_t avg_m = 0, avg_len = 0;
    auto* avg_cmd = app.add_subcommand("sing-avg", "Mean of S(H u {m})/S(H) over m in [M, M+len]");
    avg_cmd->add_option("--offsets", avg_offsets)->delimiter(',')->required();
    avg_cmd->add_option("--m", avg_m)->required();
    avg_cmd->add_option("--len", avg_len)->required();
    bind(avg_cmd, "sing-avg", [&](RunManifest& m) {
        const auto tuple = KTuple::from_unsorted(avg_offsets);
        const std::uint64_t lo_end = std::min(avg_m, tuple.front());
        const std::uint64_t hi_end = std::max(avg_m + avg_len, tuple.back());
        const std::uint64_t p0 =
            resolve_p0(g, std::max<std::uint64_t>(2 * (tuple.k() + 1), hi_end - lo_end + 1));
        m.parameters = {{"offsets", to_json(tuple)}, {"m", avg_m}, {"len", avg_len}, {"p0", p0}};
        std::vector<double> ratios;
        {
            PhaseTimer t(m, "ratios");
            ratios = windowed_ratios(tuple, avg_m, avg_len, p0, g.par());
        }
        Json j{{"average", compensated_sum(ratios) / static_cast<double>(ratios.size())},
               {"terms", ratios.size()}};
        if (!g.csv.empty()) {
            CsvTable csv{{"m", "ratio"}, {}};
            for (std::size_t i = 0; i < ratios.size(); ++i)
                csv.rows.push_back({std::to_string(avg_m + i), format_number(ratios[i])});
            write_csv(g.csv, csv);
            j["csv"] = g.csv;
        }
        return j;
    });

    // gpy {sum, shift, ratios, ledger}
    auto* gpy_cmd = app.add_subcommand("gpy", "GPY weight sums and the D0/D1 ledger");
    gpy_cmd->require_subcommand(1);

    GpyOptions sum_opts;
    std::string strategy = "per_n";
    auto* sum_cmd = gpy_cmd->add_subcommand("sum", "A = sum of a_n over [N, 2N]");
    sum_opts.attach(sum_cmd);
    sum_cmd->add_option("--strategy", strategy)->check(CLI::IsMember({"per_n", "swap"}));
    bind(sum_cmd, "gpy sum", [&](RunManifest& m) {
        const auto params = sum_opts.params(g);
        m.parameters = to_json(params);
        m.parameters["strategy"] = strategy;
        double A = 0;
        {
            PhaseTimer t(m, "sum");
            A = sum_A(params, strategy == "swap" ? SumStrategy::divisor_swap : SumStrategy::per_n, g.par());
        }
        const auto B = analytic_B(params);
        const auto S = singular_series(params.tuple, params.p0);
        const double SB = S.value * B.value();
        return Json{{"A", A}, {"B", B.value()}, {"log_B", B.log_abs}, {"series", to_json(S)},
                    {"ratio", SB > 0 ? A / SB : 0.0}};
    });

    GpyOptions shift_opts;
    std::uint64_t shift_h0 = 0;
    auto* shift_cmd = gpy_cmd->add_subcommand("shift", "sum of a_n chi_P(n + h0)");
    shift_opts.attach(shift_cmd);
    shift_cmd->add_option("--h0", shift_h0)->required();
    bind(shift_cmd, "gpy shift", [&](RunManifest& m) {
        const auto params = shift_opts.params(g);
        m.parameters = to_json(params);
        m.parameters["h0"] = shift_h0;
        PhaseTimer t(m, "sum");
        const double s = sum_prime_shift(params, shift_h0, g.par());
        return Json{{"S", s}, {"h0_in_H", params.tuple.contains(shift_h0)}};
    });

    GpyOptions ratio_opts;
    std::vector<std::uint64_t> ratio_h0s;
    auto* ratios_cmd = gpy_cmd->add_subcommand("ratios", "A, S_i and S_0 against their main terms");
    ratio_opts.attach(ratios_cmd);
    ratios_cmd->add_option("--h0", ratio_h0s, "Extra shifts h0")->delimiter(',');
    bind(ratios_cmd, "gpy ratios", [&](RunManifest& m) {
        const auto params = ratio_opts.params(g);
        m.parameters = to_json(params);
        m.parameters["h0"] = ratio_h0s;
        PhaseTimer t(m, "report");
        return to_json(ratio_report(params, ratio_h0s, g.par()));
    });

    GpyOptions ledger_opts;
    std::uint64_t ledger_t = 0;
    std::optional<std::uint64_t> ledger_start;
    auto* ledger_cmd = gpy_cmd->add_subcommand("ledger", "D0/D1 split, A0 and the double sum S");
    ledger_opts.attach(ledger_cmd);
    ledger_cmd->add_option("--t", ledger_t, "Window length T")->required();
    ledger_cmd->add_option("--window-start", ledger_start, "Window [W, W+T] (default W = N)");
    bind(ledger_cmd, "gpy ledger", [&](RunManifest& m) {
        const auto params = ledger_opts.params(g, ledger_t);
        const std::uint64_t w = ledger_start.value_or(params.N);
        if (w > std::numeric_limits<std::uint64_t>::max() - ledger_t)
            throw OverflowError("gpy ledger: window end");
        m.parameters = to_json(params);
        m.parameters["window_start"] = w;
        PhaseTimer t(m, "ledger");
        return to_json(contradiction_ledger(params, {w, w + ledger_t}, g.par()));
    });

    // maillet scan
    auto* maillet_cmd = app.add_subcommand("maillet", "Maillet number scans");
    maillet_cmd->require_subcommand(1);
    std::uint64_t scan_x = 0, scan_len = 0, scan_bound = 0;
    std::string scan_parity = "even";
    auto* scan_cmd = maillet_cmd->add_subcommand("scan", "Classify n in [x, x+len] as p - q");
    scan_cmd->add_option("--x", scan_x)->required();
    scan_cmd->add_option("--len", scan_len)->required();
    scan_cmd->add_option("--bound", scan_bound, "Largest q tried")->required();
    scan_cmd->add_option("--parity", scan_parity)->check(CLI::IsMember({"even", "all"}));
    bind(scan_cmd, "maillet scan", [&](RunManifest& m) {
        m.parameters = {{"x", scan_x}, {"len", scan_len}, {"bound", scan_bound}, {"parity", scan_parity}};
        const bool rows = !g.csv.empty();
        ScanReport rep;
        {
            PhaseTimer t(m, "scan");
            rep = scan_interval(scan_x, scan_len, scan_bound,
                                scan_parity == "even" ? Parity::even : Parity::all, rows, g.par());
        }
        Json j = to_json(rep);
        if (rows) {
            CsvTable csv{{"n", "q", "p"}, {}};
            std::size_t wi = 0, ei = 0;
            while (wi < rep.witnesses.size() || ei < rep.exceptions.size()) {
                const bool take_witness =
                    ei == rep.exceptions.size() ||
                    (wi < rep.witnesses.size() && rep.witnesses[wi].n < rep.exceptions[ei]);
                if (take_witness) {
                    const auto& w = rep.witnesses[wi++];
                    csv.rows.push_back({std::to_string(w.n), std::to_string(w.q), std::to_string(w.p)});
                } else {
                    csv.rows.push_back({std::to_string(rep.exceptions[ei++]), "", ""});
                }
            }
            write_csv(g.csv, csv);
            j["csv"] = g.csv;
        }
        return j;
    });

    // polignac
    std::uint64_t pol_d = 0, pol_x = 0;
    auto* pol_cmd = app.add_subcommand("polignac", "Count consecutive prime pairs with gap d up to x");
    pol_cmd->add_option("--d", pol_d)->required();
    pol_cmd->add_option("--x", pol_x)->required();
    bind(pol_cmd, "polignac", [&](RunManifest& m) {
        m.parameters = {{"d", pol_d}, {"x", pol_x}};
        return Json{{"count", polignac_count(pol_d, pol_x)}};
    });

    // gaps hist
    auto* gaps_cmd = app.add_subcommand("gaps", "Prime gap statistics");
    gaps_cmd->require_subcommand(1);
    std::uint64_t hist_lo = 0, hist_hi = 0;
    double hist_width = 0;
    std::string hist_norm = "log_p";
    auto* hist_cmd = gaps_cmd->add_subcommand("hist", "Histogram of normalized gaps");
    hist_cmd->add_option("--lo", hist_lo)->required();
    hist_cmd->add_option("--hi", hist_hi)->required();
    hist_cmd->add_option("--width", hist_width)->required();
    hist_cmd->add_option("--norm", hist_norm)->check(CLI::IsMember({"log_p", "log_n"}));
    bind(hist_cmd, "gaps hist", [&](RunManifest& m) {
        m.parameters = {{"lo", hist_lo}, {"hi", hist_hi}, {"width", hist_width}, {"norm", hist_norm}};
        const auto h = normalized_gap_histogram(hist_lo, hist_hi, hist_width,
                                                hist_norm == "log_p" ? GapNormalizer::log_p : GapNormalizer::log_n);
        if (!g.csv.empty()) {
            CsvTable csv{{"bin_lo", "bin_hi", "count"}, {}};
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                csv.rows.push_back({format_number(b * h.bin_width), format_number((b + 1) * h.bin_width),
                                    std::to_string(h.counts[b])});
            write_csv(g.csv, csv);
        }
        return Json{{"bin_width", h.bin_width}, {"counts", h.counts}, {"samples", h.samples.size()},
                    {"skipped", h.skipped}, {"mass", h.mass()}, {"max_sample", h.max_sample}};
    });

    std::vector<std::string> argv_storage{"maillet"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunManifest manifest{name, Json::object(), {}, MAILLET_VERSION, !g.no_timings};
        Json result;
        {
            PhaseTimer total(manifest, "total");
            result = action(manifest);
        }
        write_json(out, Json{{"manifest", manifest.to_json()}, {"result", std::move(result)}});
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomainError;
    }
}

} // namespace maillet

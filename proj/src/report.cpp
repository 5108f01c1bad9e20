#include "maillet/report.hpp"

#include "maillet/errors.hpp"

#include <cstdio>
#include <fstream>

namespace maillet {

Json RunManifest::to_json() const {
    Json j{{"subcommand", subcommand}, {"parameters", parameters}, {"tool_version", tool_version}};
    if (record_timings) {
        Json t = Json::object();
        for (const auto& [phase, ms] : timings_ms) t[phase] = ms;
        j["timings_ms"] = std::move(t);
    }
    return j;
}

PhaseTimer::~PhaseTimer() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    manifest_.timings_ms.emplace_back(
        phase_, std::chrono::duration<double, std::milli>(elapsed).count());
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_json(std::ostream& out, const Json& report) {
    out << report.dump(2) << '\n';
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw DomainError("cannot write CSV to " + path);
    write_csv(file, table);
    file.flush();
    if (!file) throw DomainError("failed while writing CSV to " + path);
}

Json to_json(const KTuple& tuple) {
    return Json(std::vector<std::uint64_t>(tuple.offsets().begin(), tuple.offsets().end()));
}

Json to_json(const IntegerInterval& interval) { return Json::array({interval.lo, interval.hi}); }

Json to_json(const SeriesValue& v) {
    return {{"value", v.value},
            {"truncation_prime", v.truncation_prime},
            {"tail_bound", v.tail_bound},
            {"lower", v.lower()},
            {"upper", v.upper()}};
}

Json to_json(const SieveParams& p) {
    return {{"offsets", to_json(p.tuple)}, {"k", p.k()}, {"ell", p.ell}, {"N", p.N},
            {"R", p.R},  {"span", p.span},  {"T", p.T},   {"p0", p.p0},  {"L", p.L()}};
}

Json to_json(const LedgerReport& r) {
    return {{"window", to_json(r.window)},
            {"series", r.series},
            {"B", r.B},
            {"A", r.A},
            {"A0", r.A0},
            {"A1", r.A1},
            {"sum_S_i", r.sum_S_i},
            {"inclusion_exclusion_gap", r.inclusion_exclusion_gap},
            {"multi_prime_count", r.multi_prime_count},
            {"single_prime_identity_applies", r.single_prime_identity_applies},
            {"A0_bound", r.A0_bound},
            {"S", r.S},
            {"S_swapped", r.S_swapped},
            {"S_full_swapped", r.S_full_swapped},
            {"S_lhs_bound", r.S_lhs_bound},
            {"S_rhs_main", r.S_rhs_main},
            {"lhs_bound_holds", r.lhs_bound_holds},
            {"rhs_main_exceeded", r.rhs_main_exceeded},
            {"D0_size", r.D0_size},
            {"D1_size", r.D1_size}};
}

Json to_json(const RatioReport& r) {
    Json offsets = Json::array();
    for (const auto& row : r.offsets)
        offsets.push_back({{"h", row.h},
                           {"S_i", row.S_i},
                           {"S_i_over_A", row.S_i_over_A},
                           {"level_free_prediction", row.level_free_prediction},
                           {"gpy_prediction", row.gpy_prediction},
                           {"ratio_level_free", row.ratio_level_free},
                           {"ratio_gpy", row.ratio_gpy}});
    Json shifts = Json::array();
    for (const auto& row : r.shifts)
        shifts.push_back({{"h0", row.h0},
                          {"S_0", row.S_0},
                          {"series_union", row.series_union},
                          {"prediction", row.prediction},
                          {"ratio", row.ratio}});
    return {{"A", r.A},
            {"B", r.B.value()},
            {"log_B", r.B.log_abs},
            {"series", to_json(r.series)},
            {"ratio_A", r.ratio_A},
            {"offsets", std::move(offsets)},
            {"shifts", std::move(shifts)}};
}

Json to_json(const Witness& w) {
    return {{"n", w.n},
            {"p", w.p},
            {"q", w.q},
            {"kind", w.kind == WitnessKind::goldbach ? "goldbach" : "maillet"}};
}

Json to_json(const ScanReport& s) {
    return {{"interval", to_json(s.interval)},
            {"search_bound", s.search_bound},
            {"parity", s.parity == Parity::even ? "even" : "all"},
            {"scanned", s.scanned},
            {"represented", s.represented},
            {"unrepresented_under_bound", s.exceptions}};
}

} // namespace maillet

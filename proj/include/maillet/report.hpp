#pragma once

// Machine-readable output: JSON reports with an embedded run manifest, and
// flat CSV files for bulk rows.

#include "maillet/gpy_weights.hpp"
#include "maillet/maillet_scan.hpp"
#include "maillet/singular_series.hpp"
#include "maillet/tuple_lab.hpp"

#include <json.hpp>

#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace maillet {

using Json = nlohmann::json;

// Everything needed to reproduce a run. Thread count is deliberately absent:
// payloads do not depend on it.
struct RunManifest {
    std::string subcommand;
    Json parameters = Json::object();
    std::vector<std::pair<std::string, double>> timings_ms;
    std::string tool_version;
    bool record_timings = true;

    Json to_json() const;
};

// Wall-clock phase timer feeding RunManifest::timings_ms.
class PhaseTimer {
public:
    explicit PhaseTimer(RunManifest& manifest, std::string phase)
        : manifest_(manifest), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
    ~PhaseTimer();
    PhaseTimer(const PhaseTimer&) = delete;
    PhaseTimer& operator=(const PhaseTimer&) = delete;

private:
    RunManifest& manifest_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

// 17 significant digits; enough to round-trip any double.
std::string format_number(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Keys come out sorted (nlohmann::json objects are ordered maps) and doubles
// in shortest round-trip form, so identical payloads give identical bytes.
void write_json(std::ostream& out, const Json& report);

// Throws DomainError if the path cannot be written.
void write_csv(const std::string& path, const CsvTable& table);
void write_csv(std::ostream& out, const CsvTable& table);

Json to_json(const KTuple& tuple);
Json to_json(const IntegerInterval& interval);
Json to_json(const SeriesValue& value);
Json to_json(const SieveParams& params);
Json to_json(const LedgerReport& ledger);
Json to_json(const RatioReport& report);
Json to_json(const ScanReport& scan);
Json to_json(const Witness& witness);

} // namespace maillet

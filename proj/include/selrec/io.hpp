#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "selrec/dual_processes.hpp"
#include "selrec/forward_solvers.hpp"
#include "selrec/measure.hpp"
#include "selrec/moran.hpp"

namespace selrec::io {

using json = nlohmann::json;

const char* library_version();

/// 64-bit FNV-1a hash as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Letters of a type at sites 1..n, e.g. "010" for 0 at sites 1 and 3.
std::string type_label(std::uint32_t pattern, int n);

/// {"sites": [...], "values": [...]}, values in storage order.
json to_json(const Measure& nu);
Measure measure_from_json(const json& j);

json to_json(const IntVector& m);
json to_json(const WeightedPartition& wp);
/// Per-site numbers, "Delta" for uninitiated sites.
json to_json(const InitiationState& theta);
InitiationState initiation_from_json(const json& j);
json to_json(const McEstimate& est);
/// z-scores that are infinite are written as the strings "inf" / "-inf".
json to_json(const DualityReport& report);
json to_json(const LlnTable& table);
json to_json(const MoranState& state, const SiteConfig& cfg);

/// CSV with a header "t,<label>,..." over all types of X, one row per state.
void write_trajectory_csv(std::ostream& out, const std::vector<double>& times, const std::vector<Measure>& states,
                          int n);

/// CSV of a Moran event log.
void write_event_log_csv(std::ostream& out, const std::vector<MoranEvent>& log);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace selrec::io

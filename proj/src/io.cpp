#include "selrec/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#ifndef SELREC_VERSION
#define SELREC_VERSION "0.0.0"
#endif

namespace selrec::io {

const char* library_version() { return SELREC_VERSION; }

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int k = 15; k >= 0; --k) {
        buf[k] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

std::string type_label(std::uint32_t pattern, int n) {
    std::string out(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if ((pattern >> i) & 1u) out[static_cast<std::size_t>(i)] = '1';
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const Measure& nu) {
    return {{"sites", nu.sites().sites()}, {"values", nu.values()}};
}

Measure measure_from_json(const json& j) {
    SiteSet sites;
    for (int i : j.at("sites").get<std::vector<int>>()) {
        if (i < 1 || i > kMaxSites) throw std::invalid_argument("measure site out of range");
        sites = sites | SiteSet::single(i);
    }
    return Measure(sites, j.at("values").get<std::vector<double>>());
}

json to_json(const IntVector& m) { return m.m; }

json to_json(const WeightedPartition& wp) {
    json blocks = json::array();
    for (const Interval& b : wp.partition.blocks()) blocks.push_back({b.first, b.last});
    return {{"blocks", blocks}, {"weights", wp.weights}};
}

json to_json(const InitiationState& theta) {
    json out = json::array();
    for (const auto& v : theta.theta) {
        if (v)
            out.push_back(*v);
        else
            out.push_back("Delta");
    }
    return out;
}

InitiationState initiation_from_json(const json& j) {
    InitiationState out;
    for (const json& v : j) {
        if (v.is_string()) {
            if (v.get<std::string>() != "Delta") throw std::invalid_argument("initiation state entries must be numbers or \"Delta\"");
            out.theta.emplace_back(std::nullopt);
        } else {
            const double x = v.get<double>();
            if (!(x >= 0.0)) throw std::invalid_argument("initiation state entries must be >= 0");
            out.theta.emplace_back(x);
        }
    }
    return out;
}

json to_json(const McEstimate& est) {
    return {{"replicates", est.replicates}, {"mean", to_json(est.mean)}, {"std_error", est.std_error.values()}};
}

json to_json(const DualityReport& report) {
    json z = json::array();
    for (double v : report.z) {
        if (std::isfinite(v))
            z.push_back(v);
        else
            z.push_back(format_double(v));
    }
    json out = {{"name", report.name},
                {"t", report.t},
                {"replicates", report.replicates},
                {"sites", report.lhs.sites().sites()},
                {"lhs", report.lhs.values()},
                {"rhs", report.rhs.values()},
                {"std_error", report.std_error.values()},
                {"z", z}};
    if (std::isfinite(report.max_abs_z))
        out["max_abs_z"] = report.max_abs_z;
    else
        out["max_abs_z"] = "inf";
    return out;
}

json to_json(const LlnTable& table) {
    json rows = json::array();
    for (const LlnRow& r : table.rows)
        rows.push_back({{"population", r.population}, {"mean_l1", r.mean_distance}, {"std_error", r.std_error}});
    return {{"rows", rows}, {"loglog_slope", table.slope}};
}

json to_json(const MoranState& state, const SiteConfig& cfg) {
    return {{"population", state.size()},
            {"clock", state.clock},
            {"neutral_events", state.neutral_events},
            {"selective_events", state.selective_events},
            {"selective_effective", state.selective_effective},
            {"recombination_events", state.recombination_events},
            {"empirical_measure", to_json(empirical_measure(cfg, state))}};
}

void write_trajectory_csv(std::ostream& out, const std::vector<double>& times, const std::vector<Measure>& states,
                          int n) {
    if (times.size() != states.size()) throw std::invalid_argument("times and states differ in length");
    out << "t";
    for (std::uint32_t x = 0; x < (1u << n); ++x) out << ",x" << type_label(x, n);
    out << '\n';
    for (std::size_t r = 0; r < times.size(); ++r) {
        out << format_double(times[r]);
        for (double v : states[r].values()) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_event_log_csv(std::ostream& out, const std::vector<MoranEvent>& log) {
    out << "time,kind,alpha,beta,gamma,site,effective\n";
    for (const MoranEvent& e : log) {
        const char* kind = e.kind == MoranEventKind::Neutral     ? "neutral"
                           : e.kind == MoranEventKind::Selective ? "selective"
                                                                 : "recombination";
        out << format_double(e.time) << ',' << kind << ',' << e.alpha << ',' << e.beta << ',' << e.gamma << ','
            << e.site << ',' << (e.effective ? 1 : 0) << '\n';
    }
}

}  // namespace selrec::io

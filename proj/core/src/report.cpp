#include "cgb/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace cgb {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void kv(std::string& out, const char* key, const std::string& value) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-20s: %s\n", key, value.c_str());
    out += buf;
}

void kv(std::string& out, const char* key, double value) { kv(out, key, num(value)); }
void kv(std::string& out, const char* key, long long value) {
    kv(out, key, std::to_string(value));
}

void piece_row(std::string& out, const char* label, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-12s %-26s %s\n", label, num(a).c_str(), num(b).c_str());
    out += buf;
}

void stat_rows(std::string& out, const std::vector<ResidualStat>& stats) {
    char buf[200];
    for (const ResidualStat& s : stats) {
        std::snprintf(buf, sizeof buf, "  %-28s %-26s %-26s %d\n", s.name.c_str(),
                      num(s.max).c_str(), num(s.mean).c_str(), s.samples);
        out += buf;
    }
}

nlohmann::ordered_json stat_json(const std::vector<ResidualStat>& stats) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResidualStat& s : stats)
        arr.push_back({{"name", s.name}, {"max", s.max}, {"mean", s.mean}, {"samples", s.samples}});
    return arr;
}

} // namespace

std::string format_text(const Report& r, bool include_timings) {
    std::string out;
    kv(out, "scene", r.scene);
    kv(out, "chi", static_cast<long long>(r.chi));
    kv(out, "quad order", static_cast<long long>(r.quad_order));
    kv(out, "theta order", static_cast<long long>(r.theta_order));
    kv(out, "seed", static_cast<long long>(r.seed));
    kv(out, "samples per stratum", static_cast<long long>(r.samples_per_stratum));
    kv(out, "target", r.target);
    out += "\n";
    out += "  piece        path A                     path B\n";
    piece_row(out, "interior", r.interior_a, r.interior_b);
    piece_row(out, "boundary M", r.boundary_m_a, r.boundary_m_b);
    piece_row(out, "boundary N", r.boundary_n_a, r.boundary_n_b);
    piece_row(out, "corner", r.corner_a, r.corner_b);
    piece_row(out, "total", r.total_a, r.total_b);
    piece_row(out, "defect", r.defect_a, r.defect_b);
    out += "\n";
    kv(out, "path gap", r.path_gap);
    kv(out, "quad error estimate", r.quad_error_estimate);
    kv(out, "gap within bound", std::string(r.gap_within_bound ? "yes" : "no"));
    if (!r.identities.empty()) {
        out += "\n  identity residual            max                        mean                       samples\n";
        stat_rows(out, r.identities);
    }
    if (!r.laws.empty()) {
        out += "\n  law residual                 max                        mean                       samples\n";
        stat_rows(out, r.laws);
    }
    if (include_timings) kv(out, "elapsed seconds", r.elapsed_seconds);
    return out;
}

std::string format_text(const LawSuite& s, bool include_timings) {
    std::string out;
    kv(out, "scene", s.scene);
    kv(out, "omega", s.omega);
    kv(out, "seed", static_cast<long long>(s.seed));
    kv(out, "samples per stratum", static_cast<long long>(s.samples_per_stratum));
    out += "\n  law residual                 max                        mean                       samples\n";
    stat_rows(out, s.laws);
    if (include_timings) kv(out, "elapsed seconds", s.elapsed_seconds);
    return out;
}

std::string format_text(const SweepTable& t, bool include_timings) {
    std::string out;
    kv(out, "scene", t.scene);
    kv(out, "target", t.target);
    out += "\n";
    out += include_timings
               ? "  order  total A                    defect A                   total B                    defect B                   seconds\n"
               : "  order  total A                    defect A                   total B                    defect B\n";
    char buf[240];
    for (const SweepRow& row : t.rows) {
        std::snprintf(buf, sizeof buf, "  %-6d %-26s %-26s %-26s %-26s", row.order,
                      num(row.total_a).c_str(), num(row.defect_a).c_str(),
                      num(row.total_b).c_str(), num(row.defect_b).c_str());
        out += buf;
        if (include_timings) {
            std::snprintf(buf, sizeof buf, " %s", num(row.elapsed_seconds).c_str());
            out += buf;
        }
        out += "\n";
    }
    out += "\n";
    kv(out, "monotone", std::string(t.monotone ? "yes" : "no"));
    return out;
}

std::string format_json(const Report& r, bool include_timings) {
    nlohmann::ordered_json j;
    j["scene"] = r.scene;
    j["chi"] = r.chi;
    j["quad_order"] = r.quad_order;
    j["theta_order"] = r.theta_order;
    j["seed"] = r.seed;
    j["samples_per_stratum"] = r.samples_per_stratum;
    j["target"] = r.target;
    j["interior_a"] = r.interior_a;
    j["boundary_m_a"] = r.boundary_m_a;
    j["boundary_n_a"] = r.boundary_n_a;
    j["corner_a"] = r.corner_a;
    j["interior_b"] = r.interior_b;
    j["boundary_m_b"] = r.boundary_m_b;
    j["boundary_n_b"] = r.boundary_n_b;
    j["corner_b"] = r.corner_b;
    j["total_a"] = r.total_a;
    j["total_b"] = r.total_b;
    j["defect_a"] = r.defect_a;
    j["defect_b"] = r.defect_b;
    j["path_gap"] = r.path_gap;
    j["quad_error_estimate"] = r.quad_error_estimate;
    j["gap_within_bound"] = r.gap_within_bound;
    j["identities"] = stat_json(r.identities);
    j["laws"] = stat_json(r.laws);
    if (include_timings) j["elapsed_seconds"] = r.elapsed_seconds;
    return j.dump(2) + "\n";
}

std::string format_json(const LawSuite& s, bool include_timings) {
    nlohmann::ordered_json j;
    j["scene"] = s.scene;
    j["omega"] = s.omega;
    j["seed"] = s.seed;
    j["samples_per_stratum"] = s.samples_per_stratum;
    j["laws"] = stat_json(s.laws);
    if (include_timings) j["elapsed_seconds"] = s.elapsed_seconds;
    return j.dump(2) + "\n";
}

std::string format_json(const SweepTable& t, bool include_timings) {
    nlohmann::ordered_json j;
    j["scene"] = t.scene;
    j["target"] = t.target;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const SweepRow& row : t.rows) {
        nlohmann::ordered_json rj;
        rj["order"] = row.order;
        rj["total_a"] = row.total_a;
        rj["defect_a"] = row.defect_a;
        rj["total_b"] = row.total_b;
        rj["defect_b"] = row.defect_b;
        if (include_timings) rj["elapsed_seconds"] = row.elapsed_seconds;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    j["monotone"] = t.monotone;
    return j.dump(2) + "\n";
}

} // namespace cgb

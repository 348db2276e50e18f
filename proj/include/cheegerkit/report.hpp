#ifndef CHEEGERKIT_REPORT_HPP
#define CHEEGERKIT_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "audit.hpp"
#include "volume_grid.hpp"

namespace cheegerkit {

/// Shortest text that round-trips the double; empty for NaN/inf.
inline std::string format_number(double x) {
    if (!std::isfinite(x)) return "";
    if (x == 0.0) return "0";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

/// Stores x under key only when finite, so every emitted number is finite.
inline void put(nlohmann::json &obj, const std::string &key, double x) {
    if (std::isfinite(x)) obj[key] = x == 0.0 ? 0.0 : x; // no "-0"
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

    void row(const std::vector<double> &values) {
        std::vector<std::string> s;
        s.reserve(values.size());
        for (double v : values) s.push_back(format_number(v));
        row_strings(s);
    }

    void row_strings(const std::vector<std::string> &cells) {
        require(cells.size() == columns_, ErrorKind::parse, "CSV row width does not match the header");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ << ',';
            out_ << cells[k];
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    std::size_t columns_;
    std::ostringstream out_;
};

/// PGM P2 of a 2D grid (3D: the middle z-slice), row 0 at the top:
/// 0 outside Ω, 128 in Ω \ E, 255 in E.
inline std::string mask_pgm(const SubsetMask &mask) {
    const VolumeGrid &g = mask.grid();
    const int w = g.cells(0), h = g.cells(1);
    const int k = g.dim() == 3 ? g.cells(2) / 2 : 0;
    std::ostringstream out;
    out << "P2\n" << w << ' ' << h << "\n255\n";
    for (int j = h - 1; j >= 0; --j) {
        for (int i = 0; i < w; ++i) {
            std::size_t c = g.box_index(i, j, k);
            int v = 0;
            if (g.state(c) == CellState::inside) v = mask.contains(std::size_t(g.inside_index(c))) ? 255 : 128;
            out << (i ? " " : "") << v;
        }
        out << '\n';
    }
    return out.str();
}

inline nlohmann::json to_json(const AuditEntry &e) {
    nlohmann::json j;
    j["check"] = e.check;
    j["status"] = to_string(e.status);
    j["property"] = e.property;
    nlohmann::json values = nlohmann::json::object();
    for (const auto &[k, v] : e.values) put(values, k, v);
    j["values"] = values;
    if (!e.notes.empty()) j["notes"] = e.notes;
    return j;
}

inline nlohmann::json to_json(const AuditReport &r) {
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const auto &e : r.entries) j["entries"].push_back(to_json(e));
    return j;
}

inline std::string convergence_csv(const AuditReport &r) {
    CsvWriter csv({"mesh_h", "c_est", "overdet_residual", "volume_gap", "margin", "rate"});
    for (const auto &row : r.convergence)
        csv.row({row.mesh_h, row.c_est, row.overdet_residual, row.volume_gap, row.margin, row.rate});
    return csv.str();
}

} // namespace cheegerkit

#endif

#include "penduflow/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace penduflow {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

/// Writes one comma-separated row of doubles.
void row(std::ostream& os, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) os << ',';
        os << format_double(v);
        first = false;
    }
}

}  // namespace

void write_full_csv(std::ostream& os, const Trajectory& tr) {
    if (tr.mech.size() != tr.size()) throw std::invalid_argument("write_full_csv: not a full-model trajectory");
    os << "t,phi1,v1,phi2,v2,i1,i2,E,P,Q,Delta_unwrapped,stuck1,stuck2\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const MechState& s = tr.mech[k];
        const Descriptors& d = tr.descriptors[k];
        row(os, {tr.times[k], s.phi1, s.v1, s.phi2, s.v2, tr.currents[k].i1, tr.currents[k].i2, d.E, d.P, d.Q,
                 d.delta_unwrapped});
        os << ',' << (s.stuck1 ? 1 : 0) << ',' << (s.stuck2 ? 1 : 0) << '\n';
    }
}

void write_descriptor_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,E,P,Q,Delta_wrapped,Delta_unwrapped\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const Descriptors& d = tr.descriptors[k];
        row(os, {tr.times[k], d.E, d.P, d.Q, d.delta_wrapped, d.delta_unwrapped});
        os << '\n';
    }
}

void write_slow_csv(std::ostream& os, const Trajectory& tr) {
    if (tr.slow.size() != tr.size()) throw std::invalid_argument("write_slow_csv: not a slow-flow trajectory");
    const bool fast = tr.fast_phase.size() == tr.size();
    os << "t,E,P,Delta,i1,i2" << (fast ? ",delta_fast" : "") << '\n';
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const SlowState& s = tr.slow[k];
        row(os, {tr.times[k], s.E, s.P, s.Delta, tr.currents[k].i1, tr.currents[k].i2});
        if (fast) os << ',' << format_double(tr.fast_phase[k]);
        os << '\n';
    }
}

void write_stability_csv(std::ostream& os, const std::vector<StabilityCell>& cells) {
    os << "i1,i2,omega1_sq,omega2_sq,class\n";
    for (const auto& c : cells) {
        row(os, {c.current.i1, c.current.i2, c.cls.omega1_sq, c.cls.omega2_sq});
        os << ',' << kind_name(c.cls.kind) << (c.cls.boundary ? "_boundary" : "") << '\n';
    }
}

void write_streamline_csv(std::ostream& os, const std::vector<StreamSample>& field) {
    os << "Delta,P,dDelta_dt,dP_dt\n";
    for (const auto& s : field) {
        row(os, {s.Delta, s.P, s.dDelta, s.dP});
        os << '\n';
    }
}

void write_stationary_csv(std::ostream& os, const std::vector<StationaryPoint>& points) {
    os << "Delta,P,kind,eig1_re,eig1_im,eig2_re,eig2_im\n";
    for (const auto& p : points) {
        row(os, {p.Delta, p.P});
        os << ',' << kind_name(p.kind) << ',';
        row(os, {p.eig1.real(), p.eig1.imag(), p.eig2.real(), p.eig2.imag()});
        os << '\n';
    }
}

bool CsvTable::has(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw std::runtime_error("CSV line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(table.header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        }
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::size_t used = 0;
            try {
                values[c] = std::stod(cells[c], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cells[c].size()) {
                throw std::runtime_error("CSV line " + std::to_string(lineno) + ": column '" + table.header[c] +
                                         "' is not numeric");
            }
        }
        table.rows.push_back(std::move(values));
    }
    return table;
}

Trajectory trajectory_from_csv(const CsvTable& table) {
    const std::size_t ct = table.column("t");
    const std::size_t cp = table.column("P");
    const bool has_q = table.has("Q");
    const std::size_t cq = has_q ? table.column("Q") : table.column("Delta");
    const std::optional<std::size_t> ce = table.has("E") ? std::optional(table.column("E")) : std::nullopt;

    Trajectory tr;
    tr.model = has_q ? ModelKind::Full : ModelKind::Slow;
    for (const auto& r : table.rows) {
        if (!tr.times.empty() && !(r[ct] > tr.times.back())) {
            throw std::runtime_error("CSV times are not strictly increasing");
        }
        Descriptors d;
        d.P = r[cp];
        d.Q = has_q ? r[cq] : std::cos(r[cq]);
        if (ce) d.E = r[*ce];
        tr.times.push_back(r[ct]);
        tr.descriptors.push_back(d);
        tr.currents.emplace_back();
    }
    if (!tr.times.empty()) tr.end_time = tr.times.back();
    return tr;
}

}  // namespace penduflow

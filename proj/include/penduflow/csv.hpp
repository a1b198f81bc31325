#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "penduflow/plant.hpp"
#include "penduflow/sim.hpp"
#include "penduflow/slowflow.hpp"

namespace penduflow {

/// Shortest-roundtrip-safe text for a double: printf "%.17g".
std::string format_double(double v);

/// t,phi1,v1,phi2,v2,i1,i2,E,P,Q,Delta_unwrapped,stuck1,stuck2
void write_full_csv(std::ostream& os, const Trajectory& tr);
/// t,E,P,Q,Delta_wrapped,Delta_unwrapped
void write_descriptor_csv(std::ostream& os, const Trajectory& tr);
/// t,E,P,Delta,i1,i2[,delta_fast]
void write_slow_csv(std::ostream& os, const Trajectory& tr);
/// i1,i2,omega1_sq,omega2_sq,class
void write_stability_csv(std::ostream& os, const std::vector<StabilityCell>& cells);
/// Delta,P,dDelta_dt,dP_dt
void write_streamline_csv(std::ostream& os, const std::vector<StreamSample>& field);
/// Delta,P,kind,eig1_re,eig1_im,eig2_re,eig2_im
void write_stationary_csv(std::ostream& os, const std::vector<StationaryPoint>& points);

/// Numeric CSV with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of `name`; throws std::invalid_argument if absent.
    std::size_t column(const std::string& name) const;
    bool has(const std::string& name) const;
};

/// Throws std::runtime_error with the line number on ragged or non-numeric rows.
CsvTable read_csv(std::istream& is);

/// Rebuilds the time and descriptor series needed by compare(). Accepts the
/// full schema (P, Q columns) and the slow schema (P, Delta; Q = cos Delta).
Trajectory trajectory_from_csv(const CsvTable& table);

}  // namespace penduflow

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "swarmsgd/engine.hpp"
#include "swarmsgd/objective.hpp"
#include "swarmsgd/topology.hpp"

namespace swarmsgd {

/// Header of every trace CSV.
inline constexpr std::string_view kTraceCsvHeader = "k,t,U,Vbar,f_gap,grad_norm_sq";

/// {"n": N, "edges": [[i,j], ...]} with i < j.
std::string graph_to_json(const Graph& g);
/// Rejects asymmetric duplicates, self-loops, out-of-range ids and disconnected graphs.
Graph graph_from_json(std::string_view text);

std::string objective_to_json(const ObjectiveSpec& spec);
ObjectiveSpec objective_from_json(std::string_view text);

/// Doubles are written with 17 significant digits, so a reload is exact.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace_csv(std::istream& in);

/// {"T_hit", "threshold", "final_U", "seed", "scheme", ...}; wall time is not
/// serialized so repeated runs produce identical bytes.
std::string summary_to_json(const TraceSummary& summary);
TraceSummary summary_from_json(std::string_view text);

/// Shortest round-trippable decimal form ("nan"/"inf" for non-finite values).
std::string format_double(double v);

}  // namespace swarmsgd

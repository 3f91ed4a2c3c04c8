#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

#include "lll/csp.hpp"
#include "lll/derand.hpp"
#include "lll/graph.hpp"
#include "lll/moser_tardos.hpp"
#include "lll/witness.hpp"

namespace lll::io {

using Json = nlohmann::ordered_json;

/// {"variables": N, "labels": {"count": k, "weights": ["1/2", ...]},
///  "constraints": [{"id": i, "domain": [...], "bad": [[...], ...]}]}
/// Weights default to uniform. Domains may be unsorted on input.
Csp csp_from_json(const Json& j, std::uint64_t cap = kDefaultMaterializationCap);
Json to_json(const Csp& csp);

/// {"n": N, "edges": [[u, v], ...]}
FiniteGraph graph_from_json(const Json& j);
Json to_json(const FiniteGraph& g);

/// One "u v" pair per line; blank lines and '#' comments are skipped. The
/// vertex count is one more than the largest id, or the value of a leading
/// "# n <count>" line.
FiniteGraph graph_from_text(std::string_view text);

/// {"n": N, "hyperedges": [[...], ...]}
Hypergraph hypergraph_from_json(const Json& j);
Json to_json(const Hypergraph& h);

/// {"depth": T, "rows": [[label per variable], ...]}
Table table_from_json(const Json& j);
Json to_json(const Table& t);

/// {"steps": [[c, ...], ...]}
MtSequence sequence_from_json(const Json& j);
Json to_json(const MtSequence& seq);

/// {"vertices": [{"id": i, "constraint": c}], "edges": [[a, b], ...]}
WitnessDigraph witness_from_json(const Json& j);
Json to_json(const WitnessDigraph& g);

Json to_json(const GrowthProfile& profile);
Json to_json(const PartialLabeling& f);
Json to_json(const RunTrace& trace, bool include_iterations);
Json to_json(const PipelineParams& params);
PipelineParams params_from_json(const Json& j);

/// Reads a file into a string; throws invalid_input when unreadable.
std::string read_file(const std::string& path);
Json parse_json(std::string_view text);

/// FNV-1a 64-bit digest rendered as 16 hex digits.
std::string digest(std::string_view bytes);

}  // namespace lll::io

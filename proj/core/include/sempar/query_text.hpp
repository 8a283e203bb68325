#pragma once

#include "sempar/kb.hpp"

#include <string>

namespace sempar {

// Parses the SPARQL subset the engine emits:
//   SELECT DISTINCT ?v [?w ...] WHERE { s p o . ... }
//   ASK WHERE { s p o . ... }
// Positions are prefixed names, ?variables, "string" or integer literals.
ConjunctiveQuery parse_query(const std::string& text);

// Deterministic rendering; parse_query(write_query(q)) == q.
std::string write_query(const ConjunctiveQuery& q);

std::string write_result_set(const ResultSet& rs);

}  // namespace sempar

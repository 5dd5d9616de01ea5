#pragma once

#include "bitwidth/pipeline.hpp"

#include <string>
#include <string_view>

namespace bw {

/// Parses the canonical pipeline JSON document. Malformed documents raise
/// PipelineError carrying the stage name and JSON path of the problem.
Pipeline parse_pipeline(std::string_view text);

/// Canonical JSON (2-space indent, stable key order). Integers are written as
/// JSON numbers, other rationals as ["rat", p, q].
std::string serialize_pipeline(const Pipeline& p);

}  // namespace bw

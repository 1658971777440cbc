#pragma once

#include "n3sc/bridge_ir.hpp"

namespace n3sc {

/// Renders the (pre-lowering) program in compact imperative pseudocode:
/// lowercase keywords, two-space indent, 'and'-joined conjunctions, strings
/// single-quoted.
std::string emit_pseudocode(const BridgeProgram& program);

}  // namespace n3sc

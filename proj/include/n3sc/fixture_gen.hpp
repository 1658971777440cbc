#pragma once

#include <cstdint>

#include "n3sc/runtime.hpp"

namespace n3sc {

/// Deterministic random fixture over the program's model: a request tree
/// with values drawn from the rules' constant pools (plus out-of-pool
/// values), and remote entries matching the requests the program can issue.
/// Multi-valued fields receive at most one fully in-pool element so that
/// single-valued inferred properties stay single-bound.
Fixture generate_fixture(const BridgeProgram& program, uint64_t seed);

}  // namespace n3sc

#pragma once

// Seeded generator of small mixed-binary instances that are feasible by
// construction: every row is anchored around the activity of a sampled
// interior point, so the optimizer and the exhaustive oracle always have
// something to agree on.  Shapes stay within 6 continuous and 12 binary
// columns so enumeration is cheap.

#include <random>

#include "taperplan/milp.hpp"

namespace taperplan::milp {

SparseMilp random_mixed_instance(std::mt19937& rng);

}  // namespace taperplan::milp

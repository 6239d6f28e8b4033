#pragma once

#include "naryq/codes.hpp"
#include "naryq/matrix.hpp"
#include "naryq/quantizer.hpp"
#include "naryq/subspace.hpp"

namespace naryq {

/// Codes as an m x N feature matrix with entries theta_n(code).
DataMatrix codes_as_features_levels(const NaryCodeSet& codes,
                                    const UniformQuantizer& quantizer);

/// Codes mapped through the refined per-subspace index values; requires
/// refine_ck_indices to have run.
DataMatrix codes_as_features_refined(const NaryCodeSet& codes,
                                     const SubspaceCodebooks& cb);

/// Raw cluster indices as reals; the non-similarity-preserving baseline.
DataMatrix codes_as_features_raw(const NaryCodeSet& codes);

} // namespace naryq

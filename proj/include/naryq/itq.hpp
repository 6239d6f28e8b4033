#pragma once

#include "naryq/codes.hpp"
#include "naryq/matrix.hpp"

#include <cstdint>
#include <vector>

namespace naryq {

struct ItqModel {
    Eigen::MatrixXd projection;  // D x m, top-m PCA directions
    Eigen::MatrixXd rotation;    // m x m orthogonal
    std::vector<double> loss_history;   // ||B - R^T P^T X||_F^2 per round
    std::vector<double> recon_history;  // ||X - P R B||_F^2 per round
};

/// PCA to m_bits dimensions followed by alternating sign assignment and
/// orthogonal Procrustes rotation refinement, from a seeded random rotation.
ItqModel train_itq(const DataMatrix& x, int m_bits, int iters, std::uint64_t seed);

/// Bit j of point i is 1 iff (rotation^T projection^T x_i)_j >= 0.
BinaryCodeSet itq_encode(const ItqModel& model, const DataMatrix& x);

/// Reconstruction P R B with B in {-1,+1}^m.
DataMatrix itq_reconstruct(const ItqModel& model, const BinaryCodeSet& codes);

} // namespace naryq

#pragma once

#include "naryq/codes.hpp"
#include "naryq/matrix.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace naryq {

/// Per-subspace cluster centers for product quantization and Cartesian
/// k-means. With a rotation R present, encoding assigns R^T x and
/// reconstruction maps selected centers back through R.
struct SubspaceCodebooks {
    int m = 0;  // subspace count
    int n = 0;  // clusters per subspace
    std::vector<int> subspace_dims;           // sums to D
    std::vector<Eigen::MatrixXd> codebooks;   // d_i x n each
    std::optional<Eigen::MatrixXd> rotation;  // D x D orthogonal (CK-means)
    /// 1-D embedding of each subspace's centers, rescaled to [-1,1]
    /// (filled by refine_ck_indices).
    std::optional<std::vector<Eigen::VectorXd>> index_values;
    std::vector<std::uint8_t> refine_degenerate;  // per-subspace flag
    std::vector<double> objective_history;        // CK-means rounds

    int dim() const;
    /// Offset of subspace i within the (rotated) feature vector.
    int subspace_offset(int i) const;
};

/// Axis-aligned product quantizer: contiguous dimension blocks, independent
/// k-means per block. D % m extra dimensions go to the first blocks.
SubspaceCodebooks train_pq(const DataMatrix& x, int m, int n, std::uint64_t seed,
                           int max_iters = 100);

/// Cartesian k-means: per-round subspace assignment + center update in the
/// rotated space, then a global Procrustes rotation update. Rotation starts
/// from a seeded random orthogonal matrix.
SubspaceCodebooks train_ckmeans(const DataMatrix& x, int m, int n, int iters,
                                std::uint64_t seed);

/// Nearest center per subspace; ties to the smaller index.
NaryCodeSet sc_encode(const SubspaceCodebooks& cb, const DataMatrix& x);
DataMatrix sc_reconstruct(const SubspaceCodebooks& cb, const NaryCodeSet& codes);

/// Project each subspace's centers onto their first principal direction and
/// rescale affinely to [-1,1]; degenerate subspaces (identical centers) get
/// all-zero values and a flag.
SubspaceCodebooks refine_ck_indices(SubspaceCodebooks cb);

} // namespace naryq

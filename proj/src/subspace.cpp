#include "naryq/subspace.hpp"

#include <numeric>

#include "naryq/detail/rng.hpp"
#include "naryq/kmeans.hpp"
#include "naryq/lsq.hpp"

namespace naryq {

namespace {

std::vector<int> split_dims(int d, int m) {
    // Contiguous blocks; the D % m leftover dimensions go one each to the
    // first blocks.
    std::vector<int> dims(m, d / m);
    for (int i = 0; i < d % m; ++i) ++dims[i];
    return dims;
}

void validate_train_args(const DataMatrix& x, int m, int n) {
    if (m < 1 || m > x.dim()) throw_arg("subspace count must satisfy 1 <= m <= D");
    if (n < 1 || n > 65535) throw_arg("clusters per subspace must be in [1, 65535]");
    if (n > x.count()) throw_arg("clusters per subspace cannot exceed N");
}

// One subspace's k-means: seed with k-means++, then Lloyd iterations with
// empty-cluster repair until assignments stabilize.
Eigen::MatrixXd cluster_block(const Eigen::MatrixXd& block, int n,
                              detail::Rng& rng, int max_iters,
                              std::vector<int>* out_assign = nullptr) {
    const std::vector<int> picks = detail::kmeanspp_seed(block, n, rng);
    Eigen::MatrixXd centers(block.rows(), n);
    for (int c = 0; c < n; ++c) centers.col(c) = block.col(picks[c]);

    std::vector<int> assign;
    std::vector<int> prev;
    for (int iter = 0; iter < max_iters; ++iter) {
        detail::lloyd_assign(block, centers, assign);
        if (assign == prev) break;
        prev = assign;
        detail::lloyd_update(block, assign, centers);
        detail::repair_empty_clusters(block, assign, centers);
    }
    if (out_assign) *out_assign = std::move(assign);
    return centers;
}

} // namespace

int SubspaceCodebooks::dim() const {
    return std::accumulate(subspace_dims.begin(), subspace_dims.end(), 0);
}

int SubspaceCodebooks::subspace_offset(int i) const {
    return std::accumulate(subspace_dims.begin(), subspace_dims.begin() + i, 0);
}

SubspaceCodebooks train_pq(const DataMatrix& x, int m, int n, std::uint64_t seed,
                           int max_iters) {
    validate_train_args(x, m, n);
    if (max_iters < 1) throw_arg("train_pq requires max_iters >= 1");

    SubspaceCodebooks cb;
    cb.m = m;
    cb.n = n;
    cb.subspace_dims = split_dims(static_cast<int>(x.dim()), m);
    cb.refine_degenerate.assign(m, 0);

    detail::Rng rng(seed);
    int offset = 0;
    for (int i = 0; i < m; ++i) {
        const Eigen::MatrixXd block =
            x.values().middleRows(offset, cb.subspace_dims[i]);
        cb.codebooks.push_back(cluster_block(block, n, rng, max_iters));
        offset += cb.subspace_dims[i];
    }
    return cb;
}

SubspaceCodebooks train_ckmeans(const DataMatrix& x, int m, int n, int iters,
                                std::uint64_t seed) {
    validate_train_args(x, m, n);
    if (iters < 1) throw_arg("train_ckmeans requires iters >= 1");
    const int d = static_cast<int>(x.dim());
    const int count = static_cast<int>(x.count());

    SubspaceCodebooks cb;
    cb.m = m;
    cb.n = n;
    cb.subspace_dims = split_dims(d, m);
    cb.refine_degenerate.assign(m, 0);

    // The rotation draws from its own stream so the codebook seeding mirrors
    // plain k-means exactly (rotations preserve the seeding distances).
    detail::Rng rot_rng(seed + 0x9e3779b97f4a7c15ULL);
    Eigen::MatrixXd rotation = detail::random_orthogonal(rot_rng, d);
    Eigen::MatrixXd z = rotation.transpose() * x.values();

    detail::Rng rng(seed);
    std::vector<Eigen::MatrixXd> centers;
    for (int i = 0; i < m; ++i) {
        const Eigen::MatrixXd block = z.middleRows(cb.subspace_offset(i),
                                                   cb.subspace_dims[i]);
        // Seeding only; Lloyd runs inside the CK rounds below.
        const std::vector<int> picks = detail::kmeanspp_seed(block, n, rng);
        Eigen::MatrixXd c(block.rows(), n);
        for (int j = 0; j < n; ++j) c.col(j) = block.col(picks[j]);
        centers.push_back(std::move(c));
    }

    std::vector<std::vector<int>> assign(m);
    std::vector<std::vector<int>> prev_assign;
    Eigen::MatrixXd recon(d, count);
    for (int round = 0; round < iters; ++round) {
        // (a) per-subspace assignment + center update in the rotated space
        for (int i = 0; i < m; ++i) {
            const Eigen::MatrixXd block = z.middleRows(cb.subspace_offset(i),
                                                       cb.subspace_dims[i]);
            detail::lloyd_assign(block, centers[i], assign[i]);
            detail::lloyd_update(block, assign[i], centers[i]);
            detail::repair_empty_clusters(block, assign[i], centers[i]);
        }
        // (b) global rotation by orthogonal Procrustes against the current
        // reconstruction
        for (int i = 0; i < m; ++i) {
            auto rows = recon.middleRows(cb.subspace_offset(i), cb.subspace_dims[i]);
            for (int j = 0; j < count; ++j) rows.col(j) = centers[i].col(assign[i][j]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            x.values() * recon.transpose(),
            Eigen::ComputeFullU | Eigen::ComputeFullV);
        rotation = svd.matrixU() * svd.matrixV().transpose();
        z = rotation.transpose() * x.values();

        const double objective = (z - recon).squaredNorm();
        const bool settled =
            round > 0 && assign == prev_assign &&
            cb.objective_history.back() - objective <=
                1e-12 * (1.0 + cb.objective_history.back());
        cb.objective_history.push_back(objective);
        if (settled) break;
        prev_assign = assign;
    }

    cb.codebooks = std::move(centers);
    cb.rotation = std::move(rotation);
    return cb;
}

NaryCodeSet sc_encode(const SubspaceCodebooks& cb, const DataMatrix& x) {
    if (x.dim() != cb.dim()) throw_arg("sc_encode dimension mismatch");
    const Eigen::MatrixXd z =
        cb.rotation ? (cb.rotation->transpose() * x.values()).eval() : x.values();

    NaryCodeSet codes(cb.m, cb.n, static_cast<int>(x.count()));
    for (int i = 0; i < cb.m; ++i) {
        const Eigen::MatrixXd block = z.middleRows(cb.subspace_offset(i),
                                                   cb.subspace_dims[i]);
        std::vector<int> assign;
        detail::lloyd_assign(block, cb.codebooks[i], assign);
        for (int j = 0; j < codes.count(); ++j)
            codes.set(i, j, static_cast<std::uint16_t>(assign[j] + 1));
    }
    return codes;
}

DataMatrix sc_reconstruct(const SubspaceCodebooks& cb, const NaryCodeSet& codes) {
    if (codes.length() != cb.m || codes.arity() != cb.n)
        throw_arg("sc_reconstruct code shape mismatch");
    Eigen::MatrixXd recon(cb.dim(), codes.count());
    for (int i = 0; i < cb.m; ++i) {
        auto rows = recon.middleRows(cb.subspace_offset(i), cb.subspace_dims[i]);
        for (int j = 0; j < codes.count(); ++j)
            rows.col(j) = cb.codebooks[i].col(codes.at(i, j) - 1);
    }
    if (cb.rotation) recon = *cb.rotation * recon;
    return DataMatrix(std::move(recon));
}

SubspaceCodebooks refine_ck_indices(SubspaceCodebooks cb) {
    std::vector<Eigen::VectorXd> values;
    for (int i = 0; i < cb.m; ++i) {
        const Eigen::MatrixXd& centers = cb.codebooks[i];
        const Eigen::VectorXd dir = pca_directions(centers, 1).col(0);
        const Eigen::VectorXd mean = centers.rowwise().mean();
        Eigen::VectorXd t = dir.transpose() * (centers.colwise() - mean);

        const double lo = t.minCoeff();
        const double hi = t.maxCoeff();
        if (hi - lo <= 1e-12) {
            // All centers projected to one point: no usable 1-D ordering.
            cb.refine_degenerate[i] = 1;
            values.push_back(Eigen::VectorXd::Zero(cb.n));
            continue;
        }
        values.push_back((2.0 * (t.array() - lo) / (hi - lo) - 1.0).matrix());
    }
    cb.index_values = std::move(values);
    return cb;
}

} // namespace naryq

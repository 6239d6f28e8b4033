#include "naryq/itq.hpp"

#include "naryq/detail/rng.hpp"
#include "naryq/lsq.hpp"

namespace naryq {

namespace {

Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& a) {
    return a.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
}

} // namespace

ItqModel train_itq(const DataMatrix& x, int m_bits, int iters, std::uint64_t seed) {
    if (m_bits < 1 || m_bits > x.dim()) throw_arg("train_itq requires 1 <= m_bits <= D");
    if (iters < 1) throw_arg("train_itq requires iters >= 1");

    ItqModel model;
    model.projection = pca_directions(x.values(), m_bits);
    const Eigen::MatrixXd z = model.projection.transpose() * x.values();

    detail::Rng rng(seed);
    Eigen::MatrixXd r = detail::random_orthogonal(rng, m_bits);

    // ||X - P R B||^2 differs from the ITQ loss ||B - R^T Z||^2 only by a
    // constant (P has orthonormal columns), so both traces fall together.
    const double recon_offset = x.values().squaredNorm() - z.squaredNorm();
    for (int iter = 0; iter < iters; ++iter) {
        const Eigen::MatrixXd b = sign_matrix(r.transpose() * z);
        const double loss = (b - r.transpose() * z).squaredNorm();
        model.loss_history.push_back(loss);
        model.recon_history.push_back(loss + recon_offset);

        // Orthogonal Procrustes: maximize tr(R^T Z B^T).
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            z * b.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
        r = svd.matrixU() * svd.matrixV().transpose();
    }
    model.rotation = std::move(r);
    return model;
}

BinaryCodeSet itq_encode(const ItqModel& model, const DataMatrix& x) {
    if (x.dim() != model.projection.rows()) throw_arg("itq_encode dimension mismatch");
    const Eigen::MatrixXd u =
        model.rotation.transpose() * model.projection.transpose() * x.values();
    BinaryCodeSet codes(static_cast<int>(u.rows()), static_cast<int>(u.cols()));
    for (int j = 0; j < codes.count(); ++j)
        for (int i = 0; i < codes.bits(); ++i)
            if (u(i, j) >= 0.0) codes.set_bit(j, i, true);
    return codes;
}

DataMatrix itq_reconstruct(const ItqModel& model, const BinaryCodeSet& codes) {
    const int m = static_cast<int>(model.rotation.rows());
    if (codes.bits() != m) throw_arg("itq_reconstruct code length mismatch");
    Eigen::MatrixXd b(m, codes.count());
    for (int j = 0; j < codes.count(); ++j)
        for (int i = 0; i < m; ++i) b(i, j) = codes.bit(j, i) ? 1.0 : -1.0;
    return DataMatrix(model.projection * model.rotation * b);
}

} // namespace naryq

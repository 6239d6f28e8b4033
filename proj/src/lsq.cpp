#include "naryq/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace naryq {

namespace {

// Accept a half-step only if it does not raise the objective beyond float
// noise; a real increase means the alternation has stopped making progress.
bool accepts(double candidate, double previous) {
    return candidate <= previous + 1e-12 * (1.0 + previous);
}

double percentile95_abs(const Eigen::MatrixXd& a) {
    std::vector<double> mags(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) mags[i] = std::abs(a(i));
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(mags.size()))) - 1;
    std::nth_element(mags.begin(), mags.begin() + rank, mags.end());
    return mags[rank];
}

} // namespace

Eigen::MatrixXd pca_directions(const Eigen::MatrixXd& x, int m) {
    if (m < 1 || m > x.rows()) throw_arg("pca_directions requires 1 <= m <= D");
    const Eigen::VectorXd mean = x.rowwise().mean();
    const Eigen::MatrixXd centered = x.colwise() - mean;
    const Eigen::MatrixXd cov =
        centered * centered.transpose() / static_cast<double>(x.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw_numeric("PCA eigensolver failed");

    // Eigenvalues come out ascending; take the top m, largest first, and fix
    // each sign so the largest-magnitude component is positive.
    Eigen::MatrixXd dirs(x.rows(), m);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd dir = es.eigenvectors().col(x.rows() - 1 - j);
        Eigen::Index argmax = 0;
        dir.cwiseAbs().maxCoeff(&argmax);
        if (dir(argmax) < 0.0) dir = -dir;
        dirs.col(j) = dir;
    }
    return dirs;
}

double lsq_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                     const Eigen::MatrixXd& v, int n, double lambda) {
    const UniformQuantizer q(n);
    const Eigen::MatrixXd h = q.quantize_values(w.transpose() * x);
    return (x - v.transpose() * h).squaredNorm() + lambda * v.squaredNorm();
}

LsqModel train_lsq(const DataMatrix& x, int m, int n, const LsqOptions& opts) {
    const int d = static_cast<int>(x.dim());
    if (m < 1 || m > d) throw_arg("train_lsq requires 1 <= m <= D");
    if (n < 2) throw_arg("train_lsq requires n >= 2");
    if (!(opts.lambda >= 0.0)) throw_arg("train_lsq requires lambda >= 0");
    if (opts.max_iters < 1) throw_arg("train_lsq requires max_iters >= 1");

    const UniformQuantizer q(n);

    // Start from the top-m PCA directions, scaled so the 95th percentile of
    // |W^T x| is 1: most projections land inside the quantizer's range.
    Eigen::MatrixXd w = pca_directions(x.values(), m);
    const double scale = percentile95_abs(w.transpose() * x.values());
    if (scale > 0.0) w /= scale;

    LsqModel model;
    model.m = m;
    model.n = n;
    model.lambda = opts.lambda;

    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, d);
    double current = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        const double at_entry = current;

        // V half-step: ridge solution given H = q_n(W^T X).
        const Eigen::MatrixXd h = q.quantize_values(w.transpose() * x.values());
        const Eigen::MatrixXd gram = h * h.transpose();
        const Eigen::MatrixXd rhs = h * x.values().transpose();
        Eigen::MatrixXd v_cand;
        if (opts.lambda > 0.0) {
            v_cand = (gram + opts.lambda * Eigen::MatrixXd::Identity(m, m))
                         .ldlt()
                         .solve(rhs);
        } else {
            // lambda = 0 can leave the Gram matrix singular (a level never
            // used); fall back to the minimum-norm solution.
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
            if (cod.rank() < m) model.pinv_fallback = true;
            v_cand = cod.solve(rhs);
        }
        const double after_v =
            lsq_objective(x.values(), w, v_cand, n, opts.lambda);
        if (!accepts(after_v, current)) break;
        v = v_cand;
        current = after_v;
        model.objective_history.push_back(current);
        if (opts.observer) opts.observer(w, v);

        // W half-step: the pseudoinverse update. It is exact for the
        // surrogate problem; when it fails to lower the full objective the
        // alternation has converged, so stop rather than accept a regression.
        const Eigen::MatrixXd w_cand =
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(v)
                .pseudoInverse();
        const double after_w =
            lsq_objective(x.values(), w_cand, v, n, opts.lambda);
        const bool w_accepted = accepts(after_w, current);
        if (w_accepted) {
            w = w_cand;
            current = after_w;
            model.objective_history.push_back(current);
            if (opts.observer) opts.observer(w, v);
        }
        model.recon_history.push_back(current - opts.lambda * v.squaredNorm());
        if (!w_accepted) break;
        if (std::isfinite(at_entry) &&
            at_entry - current <= opts.tol * (1.0 + std::abs(at_entry)))
            break;
    }

    model.w = std::move(w);
    model.v = std::move(v);
    return model;
}

NaryCodeSet lsq_encode(const LsqModel& model, const DataMatrix& x) {
    if (x.dim() != model.w.rows()) throw_arg("lsq_encode dimension mismatch");
    const UniformQuantizer q(model.n);
    const IndexMatrix idx = q.quantize_indices(model.w.transpose() * x.values());
    NaryCodeSet codes(model.m, model.n, static_cast<int>(x.count()));
    for (int j = 0; j < codes.count(); ++j)
        for (int i = 0; i < codes.length(); ++i) codes.set(i, j, idx(i, j));
    return codes;
}

DataMatrix lsq_reconstruct(const LsqModel& model, const NaryCodeSet& codes) {
    if (codes.length() != model.m || codes.arity() != model.n)
        throw_arg("lsq_reconstruct code shape mismatch");
    const UniformQuantizer q(model.n);
    Eigen::MatrixXd h(model.m, codes.count());
    for (int j = 0; j < codes.count(); ++j)
        for (int i = 0; i < codes.length(); ++i) h(i, j) = q.level(codes.at(i, j));
    return DataMatrix(model.v.transpose() * h);
}

BinaryCodeSet lsq_encode_binary(const LsqModel& model, const DataMatrix& x) {
    if (model.n != 2) throw_arg("binary encode requires an n=2 model");
    return to_binary(lsq_encode(model, x));
}

} // namespace naryq

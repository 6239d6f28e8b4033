#pragma once

#include "naryq/codes.hpp"
#include "naryq/matrix.hpp"
#include "naryq/quantizer.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace naryq {

/// Linear subspace quantization model: codes are q_n(W^T x), reconstruction
/// is V^T applied to the level values.
struct LsqModel {
    Eigen::MatrixXd w;  // D x m mapping
    Eigen::MatrixXd v;  // m x D reconstruction
    int m = 0;
    int n = 2;
    double lambda = 1.0;
    std::vector<double> objective_history;  // after every half-step
    std::vector<double> recon_history;      // squared recon error per iteration
    bool pinv_fallback = false;             // rank-deficient ridge solve at lambda=0

    UniformQuantizer quantizer() const { return UniformQuantizer(n); }
};

struct LsqOptions {
    double lambda = 1.0;
    int max_iters = 100;
    double tol = 1e-6;
    /// Observer invoked with (W, V) after every half-step; used by tests to
    /// re-evaluate the objective independently.
    std::function<void(const Eigen::MatrixXd&, const Eigen::MatrixXd&)> observer;
};

/// Alternating minimization of ||X - V^T q_n(W^T X)||_F^2 + lambda ||V||_F^2:
/// a ridge update of V given H = q_n(W^T X), then W := pinv(V). A candidate W
/// that fails to lower the objective ends the run, so the recorded objective
/// sequence is non-increasing by construction. W starts from the top-m PCA
/// directions scaled so the 95th percentile of |W^T x| is 1.
LsqModel train_lsq(const DataMatrix& x, int m, int n, const LsqOptions& opts = {});

NaryCodeSet lsq_encode(const LsqModel& model, const DataMatrix& x);
DataMatrix lsq_reconstruct(const LsqModel& model, const NaryCodeSet& codes);

/// Binary convenience: n=2 codes packed as bits (level 1 -> 0, level 2 -> 1).
BinaryCodeSet lsq_encode_binary(const LsqModel& model, const DataMatrix& x);

/// Objective value of a given (W, V) state, exposed for diagnostics.
double lsq_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                     const Eigen::MatrixXd& v, int n, double lambda);

/// Top-m principal directions (columns), deterministic sign convention.
Eigen::MatrixXd pca_directions(const Eigen::MatrixXd& x, int m);

} // namespace naryq

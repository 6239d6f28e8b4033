#pragma once

#include "naryq/detail/rng.hpp"
#include "naryq/matrix.hpp"

#include <cstdint>
#include <vector>

namespace naryq {

struct KmeansModel {
    Eigen::MatrixXd centers;  // d x k
    int k = 0;
    double objective = 0.0;                 // final sum of squared distances
    std::vector<double> objective_history;  // one entry per assignment step
};

/// Lloyd iterations from k-means++ seeding; empty clusters are re-seeded to
/// the point farthest from its assigned center.
KmeansModel kmeans(const DataMatrix& x, int k, std::uint64_t seed, int max_iters);

namespace detail {

// Building blocks shared with the Cartesian k-means trainer.
std::vector<int> kmeanspp_seed(const Eigen::MatrixXd& x, int k, Rng& rng);
void lloyd_assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                  std::vector<int>& assign);
void lloyd_update(const Eigen::MatrixXd& x, const std::vector<int>& assign,
                  Eigen::MatrixXd& centers);
void repair_empty_clusters(const Eigen::MatrixXd& x, std::vector<int>& assign,
                           Eigen::MatrixXd& centers);
double lloyd_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                       const std::vector<int>& assign);

} // namespace detail

} // namespace naryq

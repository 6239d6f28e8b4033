#include "naryq/kmeans.hpp"

#include <limits>

namespace naryq {

namespace detail {

std::vector<int> kmeanspp_seed(const Eigen::MatrixXd& x, int k, Rng& rng) {
    const int n = static_cast<int>(x.cols());
    std::vector<int> picks;
    picks.reserve(k);
    picks.push_back(static_cast<int>(uniform_index(rng, n)));

    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(picks.size()) < k) {
        const Eigen::VectorXd latest = x.col(picks.back());
        for (int i = 0; i < n; ++i) {
            const double d = (x.col(i) - latest).squaredNorm();
            if (d < best[i]) best[i] = d;
        }
        picks.push_back(static_cast<int>(weighted_pick(rng, best)));
    }
    return picks;
}

void lloyd_assign(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                  std::vector<int>& assign) {
    const int n = static_cast<int>(x.cols());
    const int k = static_cast<int>(centers.cols());
    assign.resize(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_d = (x.col(i) - centers.col(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
            const double d = (x.col(i) - centers.col(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assign[i] = best;
    }
}

void lloyd_update(const Eigen::MatrixXd& x, const std::vector<int>& assign,
                  Eigen::MatrixXd& centers) {
    const int k = static_cast<int>(centers.cols());
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(x.rows(), k);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < static_cast<int>(x.cols()); ++i) {
        sums.col(assign[i]) += x.col(i);
        ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c)
        if (counts[c] > 0) centers.col(c) = sums.col(c) / counts[c];
    // Empty clusters keep their stale center; repair_empty_clusters decides.
}

void repair_empty_clusters(const Eigen::MatrixXd& x, std::vector<int>& assign,
                           Eigen::MatrixXd& centers) {
    const int n = static_cast<int>(x.cols());
    const int k = static_cast<int>(centers.cols());
    std::vector<int> counts(k, 0);
    for (int a : assign) ++counts[a];

    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        // Re-seed on the point farthest from its own center, but never drain
        // a singleton cluster.
        int far = -1;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
            if (counts[assign[i]] <= 1) continue;
            const double d = (x.col(i) - centers.col(assign[i])).squaredNorm();
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far < 0) break;  // fewer distinct points than clusters
        --counts[assign[far]];
        assign[far] = c;
        counts[c] = 1;
        centers.col(c) = x.col(far);
    }
}

double lloyd_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                       const std::vector<int>& assign) {
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(x.cols()); ++i)
        total += (x.col(i) - centers.col(assign[i])).squaredNorm();
    return total;
}

} // namespace detail

KmeansModel kmeans(const DataMatrix& x, int k, std::uint64_t seed, int max_iters) {
    const int n = static_cast<int>(x.count());
    if (k < 1 || k > n) throw_arg("kmeans requires 1 <= k <= N");
    if (max_iters < 1) throw_arg("kmeans requires max_iters >= 1");

    detail::Rng rng(seed);
    const std::vector<int> picks = detail::kmeanspp_seed(x.values(), k, rng);
    Eigen::MatrixXd centers(x.dim(), k);
    for (int c = 0; c < k; ++c) centers.col(c) = x.values().col(picks[c]);

    KmeansModel model;
    model.k = k;
    std::vector<int> assign;
    std::vector<int> prev;
    for (int iter = 0; iter < max_iters; ++iter) {
        detail::lloyd_assign(x.values(), centers, assign);
        if (assign == prev) break;
        prev = assign;
        detail::lloyd_update(x.values(), assign, centers);
        detail::repair_empty_clusters(x.values(), assign, centers);
        model.objective_history.push_back(
            detail::lloyd_objective(x.values(), centers, assign));
    }
    model.centers = std::move(centers);
    model.objective = model.objective_history.empty()
                          ? 0.0
                          : model.objective_history.back();
    return model;
}

} // namespace naryq

#pragma once

#include "naryq/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace naryq {

enum class MatrixFormat { raw_f32, csv };

// raw-f32 layout: magic "NARY", u32-LE dim, u32-LE count, then dim*count
// IEEE-754 f32 LE values in column-major order. CSV: one point per row.
DataMatrix load_matrix(const std::string& path, MatrixFormat format);
void save_matrix(const DataMatrix& m, const std::string& path, MatrixFormat format);

/// Gaussian mixture with cluster centers uniform in [-1,1]^dim and isotropic
/// noise of standard deviation `spread`. Point j belongs to cluster
/// j % n_clusters. Values are rounded to f32 precision so raw-f32 files
/// round-trip bitwise.
DataMatrix generate_synthetic(std::uint64_t seed, int dim, int count,
                              int n_clusters, double spread);

struct LabeledData {
    DataMatrix points;
    std::vector<int> labels;   // cluster id per point
    Eigen::MatrixXd centers;   // dim x n_clusters
};

/// Same point stream as generate_synthetic, with labels and generator centers.
LabeledData generate_synthetic_labeled(std::uint64_t seed, int dim, int count,
                                       int n_clusters, double spread);

struct PreprocessModel {
    Eigen::VectorXd mean;
    bool normalize_to_sphere = true;
};

PreprocessModel fit_preprocess(const DataMatrix& x, bool normalize);

/// Shift columns by -mean; when normalizing, divide each nonzero column by its
/// L2 norm (zero columns pass through).
DataMatrix apply_preprocess(const PreprocessModel& model, const DataMatrix& x);

struct NeighborList {
    std::uint32_t query_id = 0;
    std::vector<std::uint32_t> ids;
    std::vector<double> distances;  // squared Euclidean, ascending
};

/// Exact Euclidean k-NN per query; ties broken by smaller base id.
std::vector<NeighborList> brute_force_knn(const DataMatrix& base,
                                          const DataMatrix& queries, int k);

} // namespace naryq

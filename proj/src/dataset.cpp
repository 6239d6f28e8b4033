#include "naryq/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "naryq/detail/io_util.hpp"
#include "naryq/detail/rng.hpp"
#include "naryq/detail/text.hpp"

namespace naryq {

namespace {

DataMatrix load_raw_f32(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open " + path);
    detail::expect_magic(in, "NARY", "raw-f32 matrix");
    const auto dim = detail::read_scalar<std::uint32_t>(in);
    const auto count = detail::read_scalar<std::uint32_t>(in);
    if (dim < 1 || count < 1) throw_data("raw-f32 header declares empty matrix");
    if (dim > (1u << 20) || count > (1u << 28))
        throw_data("raw-f32 header dimensions out of range");
    Eigen::MatrixXd values(dim, count);
    for (std::uint32_t j = 0; j < count; ++j)
        for (std::uint32_t i = 0; i < dim; ++i)
            values(i, j) = detail::read_scalar<float>(in);
    // Trailing bytes mean the header lied about the payload size.
    if (in.peek() != std::ifstream::traits_type::eof())
        throw_data("raw-f32 payload larger than header declares");
    return DataMatrix(std::move(values));
}

void save_raw_f32(const DataMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    detail::write_magic(out, "NARY");
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim()));
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(m.count()));
    const Eigen::MatrixXd& v = m.values();
    for (Eigen::Index j = 0; j < v.cols(); ++j)
        for (Eigen::Index i = 0; i < v.rows(); ++i)
            detail::write_scalar<float>(out, static_cast<float>(v(i, j)));
    if (!out) throw_data("write failed for " + path);
}

DataMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw_data("bad CSV value '" + cell + "' in " + path);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw_data("ragged CSV rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw_data("empty CSV file " + path);
    // One point per row: transpose into column-major points.
    Eigen::MatrixXd values(rows.front().size(), rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t i = 0; i < rows[j].size(); ++i)
            values(i, j) = rows[j][i];
    return DataMatrix(std::move(values));
}

void save_csv(const DataMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write " + path);
    const Eigen::MatrixXd& v = m.values();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            if (i) out << ',';
            out << detail::format_shortest(v(i, j));
        }
        out << '\n';
    }
    if (!out) throw_data("write failed for " + path);
}

} // namespace

DataMatrix load_matrix(const std::string& path, MatrixFormat format) {
    return format == MatrixFormat::raw_f32 ? load_raw_f32(path) : load_csv(path);
}

void save_matrix(const DataMatrix& m, const std::string& path, MatrixFormat format) {
    if (format == MatrixFormat::raw_f32)
        save_raw_f32(m, path);
    else
        save_csv(m, path);
}

LabeledData generate_synthetic_labeled(std::uint64_t seed, int dim, int count,
                                       int n_clusters, double spread) {
    if (dim < 1 || count < 1) throw_arg("synthetic data needs dim, count >= 1");
    if (n_clusters < 1) throw_arg("synthetic data needs n_clusters >= 1");
    if (!(spread >= 0.0)) throw_arg("synthetic spread must be nonnegative");

    detail::Rng rng(seed);
    Eigen::MatrixXd centers(dim, n_clusters);
    for (int c = 0; c < n_clusters; ++c)
        for (int i = 0; i < dim; ++i) centers(i, c) = detail::uniform(rng, -1.0, 1.0);

    Eigen::MatrixXd points(dim, count);
    std::vector<int> labels(count);
    for (int j = 0; j < count; ++j) {
        const int c = j % n_clusters;
        labels[j] = c;
        for (int i = 0; i < dim; ++i) {
            const double v = centers(i, c) + spread * detail::normal(rng);
            // Round through f32 so raw-f32 files round-trip bitwise.
            points(i, j) = static_cast<double>(static_cast<float>(v));
        }
    }
    return {DataMatrix(std::move(points)), std::move(labels), std::move(centers)};
}

DataMatrix generate_synthetic(std::uint64_t seed, int dim, int count,
                              int n_clusters, double spread) {
    return generate_synthetic_labeled(seed, dim, count, n_clusters, spread).points;
}

PreprocessModel fit_preprocess(const DataMatrix& x, bool normalize) {
    PreprocessModel model;
    model.mean = x.values().rowwise().mean();
    model.normalize_to_sphere = normalize;
    return model;
}

DataMatrix apply_preprocess(const PreprocessModel& model, const DataMatrix& x) {
    if (model.mean.size() != x.dim())
        throw_arg("preprocess model dimension mismatch");
    Eigen::MatrixXd out = x.values().colwise() - model.mean;
    if (model.normalize_to_sphere) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            const double norm = out.col(j).norm();
            if (norm > 0.0) out.col(j) /= norm;
        }
    }
    return DataMatrix(std::move(out));
}

std::vector<NeighborList> brute_force_knn(const DataMatrix& base,
                                          const DataMatrix& queries, int k) {
    if (base.dim() != queries.dim()) throw_arg("knn dimension mismatch");
    const int n = static_cast<int>(base.count());
    if (k < 1 || k > n) throw_arg("knn k out of range");

    std::vector<NeighborList> result(queries.count());
    std::vector<int> order(n);
    std::vector<double> dist(n);
    for (Eigen::Index q = 0; q < queries.count(); ++q) {
        const Eigen::VectorXd point = queries.point(q);
        for (int i = 0; i < n; ++i)
            dist[i] = (base.values().col(i) - point).squaredNorm();
        std::iota(order.begin(), order.end(), 0);
        const auto closer = [&dist](int a, int b) {
            return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
        };
        std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);

        NeighborList& list = result[q];
        list.query_id = static_cast<std::uint32_t>(q);
        list.ids.reserve(k);
        list.distances.reserve(k);
        for (int r = 0; r < k; ++r) {
            list.ids.push_back(static_cast<std::uint32_t>(order[r]));
            list.distances.push_back(dist[order[r]]);
        }
    }
    return result;
}

} // namespace naryq

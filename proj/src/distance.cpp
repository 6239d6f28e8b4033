#include "naryq/distance.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "naryq/error.hpp"

namespace naryq {

LookupTables::LookupTables(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < 1) throw_arg("lookup tables need m >= 1, n >= 1");
    tables_.assign(m, Eigen::MatrixXd::Zero(n, n));
}

LookupTables LookupTables::from_subspaces(const SubspaceCodebooks& cb) {
    LookupTables t(cb.m, cb.n);
    for (int i = 0; i < cb.m; ++i)
        for (int a = 0; a < cb.n; ++a)
            for (int b = 0; b < cb.n; ++b)
                t.tables_[i](a, b) =
                    (cb.codebooks[i].col(a) - cb.codebooks[i].col(b)).squaredNorm();
    return t;
}

LookupTables LookupTables::from_grid(int m, int n) {
    const UniformQuantizer q(n);
    LookupTables t(m, n);
    Eigen::MatrixXd grid(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double gap = q.level(a + 1) - q.level(b + 1);
            grid(a, b) = gap * gap;
        }
    for (int i = 0; i < m; ++i) t.tables_[i] = grid;
    return t;
}

LookupTables LookupTables::from_lsq(const LsqModel& model) {
    return from_grid(model.m, model.n);
}

double LookupTables::distance(std::span<const std::uint16_t> a,
                              std::span<const std::uint16_t> b) const {
    if (static_cast<int>(a.size()) != m_ || static_cast<int>(b.size()) != m_)
        throw_arg("symmetric distance code length mismatch");
    double total = 0.0;
    for (int i = 0; i < m_; ++i) total += tables_[i](a[i] - 1, b[i] - 1);
    return total;
}

double symmetric_distance(const LookupTables& tables,
                          std::span<const std::uint16_t> a,
                          std::span<const std::uint16_t> b) {
    return tables.distance(a, b);
}

int hamming_distance(std::span<const std::uint64_t> a,
                     std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) throw_arg("hamming length mismatch");
    int total = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        total += std::popcount(a[i] ^ b[i]);
    return total;
}

int hamming_distance(const BinaryCodeSet& codes, int i, int j) {
    return hamming_distance(codes.words(i), codes.words(j));
}

double code_euclidean(const UniformQuantizer& q,
                      std::span<const std::uint16_t> a,
                      std::span<const std::uint16_t> b) {
    if (a.size() != b.size()) throw_arg("code_euclidean length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double gap = q.level(a[i]) - q.level(b[i]);
        total += gap * gap;
    }
    return total;
}

namespace {

RankedList take_top_k(std::vector<double> dist, int k) {
    const int n = static_cast<int>(dist.size());
    if (k < 1 || k > n) throw_arg("rank k out of range");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto closer = [&dist](int a, int b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);

    RankedList out;
    out.ids.reserve(k);
    out.distances.reserve(k);
    for (int r = 0; r < k; ++r) {
        out.ids.push_back(order[r]);
        out.distances.push_back(dist[order[r]]);
    }
    return out;
}

} // namespace

RankedList exhaustive_rank(const LookupTables& tables, const NaryCodeSet& base,
                           std::span<const std::uint16_t> query, int k) {
    std::vector<double> dist(base.count());
    for (int i = 0; i < base.count(); ++i)
        dist[i] = tables.distance(query, base.point(i));
    return take_top_k(std::move(dist), k);
}

RankedList exhaustive_rank(const BinaryCodeSet& base,
                           std::span<const std::uint64_t> query, int k) {
    std::vector<double> dist(base.count());
    for (int i = 0; i < base.count(); ++i)
        dist[i] = hamming_distance(base.words(i), query);
    return take_top_k(std::move(dist), k);
}

} // namespace naryq

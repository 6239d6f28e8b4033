#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "naryq/codes.hpp"
#include "naryq/lsq.hpp"
#include "naryq/quantizer.hpp"
#include "naryq/subspace.hpp"

namespace naryq {

/// Per-subspace squared-distance lookup tables: tables[i](a, b) holds the
/// squared Euclidean distance between codewords a+1 and b+1 of subspace i, so
/// a symmetric code-to-code distance is m table lookups.
class LookupTables {
public:
  LookupTables(int m, int n);

  static LookupTables from_subspaces(const SubspaceCodebooks& cb);
  static LookupTables from_lsq(const LsqModel& model);
  /// Scalar grid tables: entry (a, b) is (theta(a+1) - theta(b+1))^2 for
  /// every dimension.  Used for plain code-space Euclidean ranking.
  static LookupTables from_grid(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  Eigen::MatrixXd& table(int i) { return tables_[i]; }
  const Eigen::MatrixXd& table(int i) const { return tables_[i]; }

  double distance(std::span<const std::uint16_t> a,
                  std::span<const std::uint16_t> b) const;

private:
  int m_;
  int n_;
  std::vector<Eigen::MatrixXd> tables_;
};

/// Symmetric code-to-code distance through the tables (sum over subspaces).
double symmetric_distance(const LookupTables& tables,
                          std::span<const std::uint16_t> a,
                          std::span<const std::uint16_t> b);

/// Packed-word Hamming distance.
int hamming_distance(std::span<const std::uint64_t> a,
                     std::span<const std::uint64_t> b);
int hamming_distance(const BinaryCodeSet& codes, int i, int j);

/// Sum of squared level-value gaps between two n-ary codes.
double code_euclidean(const UniformQuantizer& q,
                      std::span<const std::uint16_t> a,
                      std::span<const std::uint16_t> b);

struct RankedList {
  std::vector<int> ids;          // base ids, best first
  std::vector<double> distances; // matching estimated distances
};

enum class MetricKind {
  lookup,    // symmetric distance via LookupTables
  hamming,   // packed binary codes
  code_grid, // uniform-grid Euclidean on n-ary codes
};

/// Exhaustive scan: rank all base codes against one query code, ties by id.
RankedList exhaustive_rank(const LookupTables& tables, const NaryCodeSet& base,
                           std::span<const std::uint16_t> query, int k);
RankedList exhaustive_rank(const BinaryCodeSet& base,
                           std::span<const std::uint64_t> query, int k);

} // namespace naryq

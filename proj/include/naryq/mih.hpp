#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "naryq/codes.hpp"
#include "naryq/distance.hpp"
#include "naryq/quantizer.hpp"
#include "naryq/subspace.hpp"

namespace naryq {

/// Ranked MIH candidates: ids ordered by (score desc, code distance asc,
/// id asc), with the score and distance that placed each id.
struct MihResult {
    std::vector<int> ids;
    std::vector<int> scores;
    std::vector<double> distances;
};

/// Multi-index hash over codes.  Two layouts share one probe engine:
///  - n-ary: one table per code dimension, keys are levels minus one;
///  - binary: one table per b-bit chunk of the packed code, MSB-first within
///    the chunk, so code 110000 with b=3 hashes to keys 6 and 0.
class MultiIndexHash {
public:
    enum class Kind { nary, binary };

    struct QueryStats {
        int probes = 0;          // buckets inspected, exact pass included
        int expansions = 0;      // single-bucket expansion steps taken
        int candidates_seen = 0; // distinct base ids scored
    };

    Kind kind() const { return kind_; }
    int tables() const { return static_cast<int>(tables_.size()); }
    int keys_per_table() const { return keys_per_table_; }
    int count() const { return count_; }
    int code_length() const { return code_length_; } // dims (nary) or bits
    int chunk_bits() const { return chunk_bits_; }   // binary only

    const std::vector<int>& bucket(int table, int key) const;

    /// Retained base codes, used for candidate ranking after a load.
    const NaryCodeSet& nary_codes() const;
    const BinaryCodeSet& binary_codes() const;

    /// Probe each table at the query's own key, then expand one bucket at a
    /// time until k candidates exist or every (table, key) pair is spent.
    /// Each expansion picks the unvisited pair whose key lies closest to the
    /// query's unquantized position in that table; ties prefer the lower
    /// table, then the lower key.
    ///
    /// n-ary queries supply those positions through `costs` (m x n: cost of
    /// pretending dimension i of the query were level j+1) and rank
    /// candidates by `rank_tables`.  Binary queries derive chunk costs from
    /// chunk Hamming distance and rank by whole-code Hamming distance.
    struct NaryQuery {
        std::vector<std::uint16_t> code;  // 1-based levels, length m
        const Eigen::MatrixXd* costs;     // m x n substitution costs
        const LookupTables* rank_tables;  // tie-break distance
    };
    MihResult query(const NaryQuery& q, int k, QueryStats* stats = nullptr) const;

    struct BinaryQuery {
        std::vector<std::uint64_t> code;  // packed, same layout as the code set
    };
    MihResult query(const BinaryQuery& q, int k, QueryStats* stats = nullptr) const;

    friend MultiIndexHash build_nary_index(const NaryCodeSet& codes);
    friend MultiIndexHash build_binary_index(const BinaryCodeSet& codes,
                                             int chunk_bits);
    friend void save_index(const MultiIndexHash& index, const std::string& path);
    friend MultiIndexHash load_index(const std::string& path);

private:
    MultiIndexHash() = default;

    template <typename DistanceFn>
    MihResult run_query(const std::vector<int>& exact_keys,
                        const Eigen::MatrixXd& costs, int k,
                        DistanceFn&& candidate_distance, QueryStats* stats) const;

    Kind kind_ = Kind::nary;
    int keys_per_table_ = 0;
    int count_ = 0;
    int code_length_ = 0;
    int chunk_bits_ = 0;
    std::vector<std::vector<std::vector<int>>> tables_; // [table][key] -> ids
    std::optional<NaryCodeSet> nary_;
    std::optional<BinaryCodeSet> binary_;
};

MultiIndexHash build_nary_index(const NaryCodeSet& codes);
MultiIndexHash build_binary_index(const BinaryCodeSet& codes, int chunk_bits);

/// NARYIDX container (posting lists plus the base codes for re-ranking).
void save_index(const MultiIndexHash& index, const std::string& path);
MultiIndexHash load_index(const std::string& path);

/// Expansion costs for a level-quantized query: entry (i, j) = |theta(j+1) -
/// y_i| where y is the query's unquantized projection.
Eigen::MatrixXd nary_costs_from_levels(const UniformQuantizer& q,
                                       const Eigen::VectorXd& projection);

/// Expansion costs for a subspace-clustered query: entry (i, j) = distance
/// from the query's (rotated) i-th subvector to center j+1 of subspace i.
Eigen::MatrixXd nary_costs_from_codebooks(const SubspaceCodebooks& cb,
                                          const Eigen::VectorXd& x);

} // namespace naryq

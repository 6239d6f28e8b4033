#include "naryq/mih.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>

#include "naryq/detail/io_util.hpp"
#include "naryq/error.hpp"

namespace naryq {

namespace {

struct Substitution {
    double cost;
    int table;
    int key;
};

} // namespace

const std::vector<int>& MultiIndexHash::bucket(int table, int key) const {
    if (table < 0 || table >= tables() || key < 0 || key >= keys_per_table_)
        throw_arg("bucket out of range");
    return tables_[table][key];
}

const NaryCodeSet& MultiIndexHash::nary_codes() const {
    if (!nary_) throw_arg("index holds no n-ary codes");
    return *nary_;
}

const BinaryCodeSet& MultiIndexHash::binary_codes() const {
    if (!binary_) throw_arg("index holds no binary codes");
    return *binary_;
}

template <typename DistanceFn>
MihResult MultiIndexHash::run_query(const std::vector<int>& exact_keys,
                                    const Eigen::MatrixXd& costs, int k,
                                    DistanceFn&& candidate_distance,
                                    QueryStats* stats) const {
    if (k < 1) throw_arg("query k must be >= 1");
    const int t_count = tables();

    std::vector<int> score(count_, 0);
    std::vector<int> candidates;
    const auto probe = [&](int table, int key) {
        for (int id : tables_[table][key]) {
            if (score[id] == 0) candidates.push_back(id);
            ++score[id];
        }
        if (stats) ++stats->probes;
    };

    // Exact pass: the query's own key in every table.
    for (int t = 0; t < t_count; ++t) probe(t, exact_keys[t]);

    // Expansion: unvisited (table, key) pairs ordered by substitution cost,
    // ties to the lower table then the lower key; one bucket per step.
    if (static_cast<int>(candidates.size()) < k) {
        std::vector<Substitution> subs;
        subs.reserve(static_cast<std::size_t>(t_count) * (keys_per_table_ - 1));
        for (int t = 0; t < t_count; ++t)
            for (int key = 0; key < keys_per_table_; ++key)
                if (key != exact_keys[t]) subs.push_back({costs(t, key), t, key});
        std::sort(subs.begin(), subs.end(), [](const Substitution& a,
                                               const Substitution& b) {
            if (a.cost != b.cost) return a.cost < b.cost;
            if (a.table != b.table) return a.table < b.table;
            return a.key < b.key;
        });
        for (const Substitution& s : subs) {
            if (static_cast<int>(candidates.size()) >= k) break;
            probe(s.table, s.key);
            if (stats) ++stats->expansions;
        }
    }
    if (stats) stats->candidates_seen = static_cast<int>(candidates.size());

    // Rank: score desc, code distance asc, id asc.
    std::vector<double> dist(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        dist[i] = candidate_distance(candidates[i]);
    std::vector<int> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (score[candidates[a]] != score[candidates[b]])
            return score[candidates[a]] > score[candidates[b]];
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return candidates[a] < candidates[b];
    });

    MihResult out;
    const int take = std::min<int>(k, static_cast<int>(order.size()));
    out.ids.reserve(take);
    out.scores.reserve(take);
    out.distances.reserve(take);
    for (int r = 0; r < take; ++r) {
        const int id = candidates[order[r]];
        out.ids.push_back(id);
        out.scores.push_back(score[id]);
        out.distances.push_back(dist[order[r]]);
    }
    return out;
}

MihResult MultiIndexHash::query(const NaryQuery& q, int k,
                                QueryStats* stats) const {
    if (kind_ != Kind::nary) throw_arg("n-ary query against a binary index");
    if (static_cast<int>(q.code.size()) != code_length_)
        throw_arg("query code length mismatch");
    if (!q.costs || q.costs->rows() != tables() ||
        q.costs->cols() != keys_per_table_)
        throw_arg("query costs must be tables x keys");
    if (!q.rank_tables) throw_arg("n-ary query needs rank tables");

    std::vector<int> exact(code_length_);
    for (int i = 0; i < code_length_; ++i) {
        if (q.code[i] < 1 || q.code[i] > keys_per_table_)
            throw_arg("query code value out of range");
        exact[i] = q.code[i] - 1;
    }
    const std::span<const std::uint16_t> code(q.code);
    return run_query(
        exact, *q.costs, k,
        [&](int id) { return q.rank_tables->distance(code, nary_->point(id)); },
        stats);
}

MihResult MultiIndexHash::query(const BinaryQuery& q, int k,
                                QueryStats* stats) const {
    if (kind_ != Kind::binary) throw_arg("binary query against an n-ary index");
    if (q.code.size() != static_cast<std::size_t>(binary_->words_per_code()))
        throw_arg("query code length mismatch");

    const int t_count = tables();
    std::vector<int> exact(t_count);
    for (int t = 0; t < t_count; ++t) {
        int key = 0;
        for (int i = 0; i < chunk_bits_; ++i) {
            const int b = t * chunk_bits_ + i;
            const bool bit = (q.code[b / 64] >> (b % 64)) & 1u;
            key = (key << 1) | (bit ? 1 : 0);  // MSB-first within the chunk
        }
        exact[t] = key;
    }
    Eigen::MatrixXd costs(t_count, keys_per_table_);
    for (int t = 0; t < t_count; ++t)
        for (int key = 0; key < keys_per_table_; ++key)
            costs(t, key) = std::popcount(
                static_cast<unsigned>(key) ^ static_cast<unsigned>(exact[t]));
    const std::span<const std::uint64_t> code(q.code);
    return run_query(
        exact, costs, k,
        [&](int id) {
            return static_cast<double>(hamming_distance(binary_->words(id), code));
        },
        stats);
}

MultiIndexHash build_nary_index(const NaryCodeSet& codes) {
    MultiIndexHash idx;
    idx.kind_ = MultiIndexHash::Kind::nary;
    idx.keys_per_table_ = codes.arity();
    idx.count_ = codes.count();
    idx.code_length_ = codes.length();
    idx.tables_.assign(codes.length(),
                       std::vector<std::vector<int>>(codes.arity()));
    for (int p = 0; p < codes.count(); ++p)
        for (int i = 0; i < codes.length(); ++i)
            idx.tables_[i][codes.at(i, p) - 1].push_back(p);
    idx.nary_ = codes;
    return idx;
}

MultiIndexHash build_binary_index(const BinaryCodeSet& codes, int chunk_bits) {
    if (chunk_bits < 1 || chunk_bits > 24)
        throw_arg("binary index chunk size must be in [1, 24]");
    if (codes.bits() % chunk_bits != 0)
        throw_arg("chunk size must divide the code length");

    MultiIndexHash idx;
    idx.kind_ = MultiIndexHash::Kind::binary;
    idx.keys_per_table_ = 1 << chunk_bits;
    idx.count_ = codes.count();
    idx.code_length_ = codes.bits();
    idx.chunk_bits_ = chunk_bits;
    const int t_count = codes.bits() / chunk_bits;
    idx.tables_.assign(t_count, std::vector<std::vector<int>>(idx.keys_per_table_));
    for (int p = 0; p < codes.count(); ++p) {
        for (int t = 0; t < t_count; ++t) {
            int key = 0;
            for (int i = 0; i < chunk_bits; ++i)
                key = (key << 1) | (codes.bit(p, t * chunk_bits + i) ? 1 : 0);
            idx.tables_[t][key].push_back(p);
        }
    }
    idx.binary_ = codes;
    return idx;
}

Eigen::MatrixXd nary_costs_from_levels(const UniformQuantizer& q,
                                       const Eigen::VectorXd& projection) {
    Eigen::MatrixXd costs(projection.size(), q.arity());
    for (Eigen::Index i = 0; i < projection.size(); ++i)
        for (int j = 0; j < q.arity(); ++j)
            costs(i, j) = std::abs(q.level(j + 1) - projection(i));
    return costs;
}

Eigen::MatrixXd nary_costs_from_codebooks(const SubspaceCodebooks& cb,
                                          const Eigen::VectorXd& x) {
    if (x.size() != cb.dim()) throw_arg("cost vector dimension mismatch");
    const Eigen::VectorXd z = cb.rotation ? (cb.rotation->transpose() * x).eval() : x;
    Eigen::MatrixXd costs(cb.m, cb.n);
    for (int i = 0; i < cb.m; ++i) {
        const auto sub = z.segment(cb.subspace_offset(i), cb.subspace_dims[i]);
        for (int j = 0; j < cb.n; ++j)
            costs(i, j) = (sub - cb.codebooks[i].col(j)).norm();
    }
    return costs;
}

void save_index(const MultiIndexHash& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    detail::write_magic(out, "NARYIDX");
    const bool binary = index.kind_ == MultiIndexHash::Kind::binary;
    detail::write_scalar<std::uint32_t>(out, binary ? 1 : 0);
    detail::write_scalar<std::uint32_t>(out, index.tables());
    detail::write_scalar<std::uint32_t>(out, index.keys_per_table_);
    detail::write_scalar<std::uint32_t>(out, index.count_);
    detail::write_scalar<std::uint32_t>(out, index.code_length_);
    detail::write_scalar<std::uint32_t>(out, index.chunk_bits_);
    for (const auto& table : index.tables_) {
        for (const auto& bucket : table) {
            detail::write_scalar<std::uint32_t>(
                out, static_cast<std::uint32_t>(bucket.size()));
            for (int id : bucket)
                detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(id));
        }
    }
    // Base codes ride along so a loaded index can rank candidates.
    if (binary) {
        for (const std::uint64_t word : index.binary_->raw())
            detail::write_scalar<std::uint64_t>(out, word);
    } else {
        detail::write_scalar<std::uint32_t>(out, index.nary_->arity());
        for (const std::uint16_t v : index.nary_->data())
            detail::write_scalar<std::uint16_t>(out, v);
    }
    if (!out) throw_data("write failed for " + path);
}

MultiIndexHash load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open " + path);
    detail::expect_magic(in, "NARYIDX", "index");

    MultiIndexHash idx;
    const auto kind = detail::read_scalar<std::uint32_t>(in);
    if (kind > 1) throw_data("unknown index kind");
    idx.kind_ = kind ? MultiIndexHash::Kind::binary : MultiIndexHash::Kind::nary;
    const auto t_count = detail::read_scalar<std::uint32_t>(in);
    idx.keys_per_table_ = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
    idx.count_ = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
    idx.code_length_ = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
    idx.chunk_bits_ = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
    if (t_count < 1 || t_count > (1u << 20) || idx.keys_per_table_ < 1 ||
        idx.count_ < 1 || idx.code_length_ < 1)
        throw_data("index header out of range");

    idx.tables_.assign(t_count, std::vector<std::vector<int>>(idx.keys_per_table_));
    for (auto& table : idx.tables_) {
        for (auto& bucket : table) {
            const auto len = detail::read_scalar<std::uint32_t>(in);
            if (len > static_cast<std::uint32_t>(idx.count_))
                throw_data("posting list longer than the base set");
            bucket.resize(len);
            for (auto& id : bucket) {
                const auto v = detail::read_scalar<std::uint32_t>(in);
                if (v >= static_cast<std::uint32_t>(idx.count_))
                    throw_data("posting list id out of range");
                id = static_cast<int>(v);
            }
        }
    }
    if (idx.kind_ == MultiIndexHash::Kind::binary) {
        BinaryCodeSet codes(idx.code_length_, idx.count_);
        for (auto& word : codes.raw()) word = detail::read_scalar<std::uint64_t>(in);
        codes.mask_padding();
        idx.binary_ = std::move(codes);
    } else {
        const auto arity = detail::read_scalar<std::uint32_t>(in);
        if (arity != static_cast<std::uint32_t>(idx.keys_per_table_))
            throw_data("index arity disagrees with key count");
        NaryCodeSet codes(idx.code_length_, static_cast<int>(arity), idx.count_);
        for (auto& v : codes.data()) {
            v = detail::read_scalar<std::uint16_t>(in);
            if (v < 1 || v > arity) throw_data("code value out of range");
        }
        idx.nary_ = std::move(codes);
    }
    return idx;
}

} // namespace naryq

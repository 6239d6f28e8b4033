#pragma once

#include "naryq/error.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace naryq {

/// m-dimensional n-ary codes for N points; entries take values in 1..n.
class NaryCodeSet {
public:
    NaryCodeSet() = default;
    NaryCodeSet(int length, int arity, int count);

    int length() const { return length_; }
    int arity() const { return arity_; }
    int count() const { return count_; }

    std::uint16_t at(int dim, int point) const {
        return data_[static_cast<std::size_t>(point) * length_ + dim];
    }
    void set(int dim, int point, std::uint16_t value);

    /// One point's code, length() entries.
    std::span<const std::uint16_t> point(int j) const {
        return {data_.data() + static_cast<std::size_t>(j) * length_,
                static_cast<std::size_t>(length_)};
    }

    const std::vector<std::uint16_t>& data() const { return data_; }
    std::vector<std::uint16_t>& data() { return data_; }

private:
    int length_ = 0;
    int arity_ = 0;
    int count_ = 0;
    std::vector<std::uint16_t> data_;  // point-major
};

/// Bit-packed m-bit codes for N points. Bit 0 is the first code dimension;
/// bits are stored LSB-first inside 64-bit words and padding bits are kept
/// zero.
class BinaryCodeSet {
public:
    BinaryCodeSet() = default;
    BinaryCodeSet(int bits, int count);

    int bits() const { return bits_; }
    int count() const { return count_; }
    int words_per_code() const { return words_per_code_; }

    bool bit(int point, int b) const {
        const std::uint64_t word =
            words_[static_cast<std::size_t>(point) * words_per_code_ + b / 64];
        return (word >> (b % 64)) & 1u;
    }
    void set_bit(int point, int b, bool value);

    std::span<const std::uint64_t> words(int point) const {
        return {words_.data() + static_cast<std::size_t>(point) * words_per_code_,
                static_cast<std::size_t>(words_per_code_)};
    }

    const std::vector<std::uint64_t>& raw() const { return words_; }
    std::vector<std::uint64_t>& raw() { return words_; }

    /// Zeroes any padding bits beyond bits() in the last word of each code.
    void mask_padding();

private:
    int bits_ = 0;
    int count_ = 0;
    int words_per_code_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Reinterpret a 2-ary code set as packed binary codes (1 -> 0, 2 -> 1).
BinaryCodeSet to_binary(const NaryCodeSet& codes);

} // namespace naryq

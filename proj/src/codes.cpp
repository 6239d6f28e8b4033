#include "naryq/codes.hpp"

namespace naryq {

NaryCodeSet::NaryCodeSet(int length, int arity, int count)
    : length_(length), arity_(arity), count_(count) {
    if (length < 1 || count < 1) throw_arg("code set needs length, count >= 1");
    if (arity < 1 || arity > 65535) throw_arg("code arity must be in [1, 65535]");
    data_.assign(static_cast<std::size_t>(length) * count, 1);
}

void NaryCodeSet::set(int dim, int point, std::uint16_t value) {
    if (value < 1 || value > arity_) throw_arg("code value out of range");
    data_[static_cast<std::size_t>(point) * length_ + dim] = value;
}

BinaryCodeSet::BinaryCodeSet(int bits, int count)
    : bits_(bits), count_(count), words_per_code_((bits + 63) / 64) {
    if (bits < 1 || count < 1) throw_arg("code set needs bits, count >= 1");
    words_.assign(static_cast<std::size_t>(words_per_code_) * count, 0);
}

void BinaryCodeSet::set_bit(int point, int b, bool value) {
    std::uint64_t& word =
        words_[static_cast<std::size_t>(point) * words_per_code_ + b / 64];
    const std::uint64_t mask = std::uint64_t(1) << (b % 64);
    if (value)
        word |= mask;
    else
        word &= ~mask;
}

void BinaryCodeSet::mask_padding() {
    const int tail = bits_ % 64;
    if (tail == 0) return;
    const std::uint64_t mask = (std::uint64_t(1) << tail) - 1;
    for (int p = 0; p < count_; ++p)
        words_[static_cast<std::size_t>(p) * words_per_code_ + words_per_code_ - 1] &=
            mask;
}

BinaryCodeSet to_binary(const NaryCodeSet& codes) {
    if (codes.arity() != 2) throw_arg("to_binary requires arity-2 codes");
    BinaryCodeSet out(codes.length(), codes.count());
    for (int p = 0; p < codes.count(); ++p)
        for (int d = 0; d < codes.length(); ++d)
            if (codes.at(d, p) == 2) out.set_bit(p, d, true);
    return out;
}

} // namespace naryq

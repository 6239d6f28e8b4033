#include "naryq/quantizer.hpp"

#include <algorithm>
#include <cmath>

namespace naryq {

UniformQuantizer::UniformQuantizer(int arity) : arity_(arity) {
    if (arity < 2 || arity > 65535)
        throw_arg("quantizer arity must be in [2, 65535]");
    levels_.resize(arity);
    for (int i = 0; i < arity; ++i)
        levels_(i) = -1.0 + 2.0 * i / (arity - 1);
    midpoints_.resize(arity - 1);
    for (int i = 0; i + 1 < arity; ++i)
        midpoints_(i) = 0.5 * (levels_(i) + levels_(i + 1));
}

UniformQuantizer::Quantized UniformQuantizer::quantize(double x) const {
    if (!std::isfinite(x)) throw_arg("quantize requires finite input");
    // Level i wins on [mid(i-1), mid(i)); counting midpoints <= x sends exact
    // midpoints up and saturates out-of-range inputs to the extreme levels.
    const double* begin = midpoints_.data();
    const double* end = begin + midpoints_.size();
    const int idx = static_cast<int>(std::upper_bound(begin, end, x) - begin);
    return {idx + 1, levels_(idx)};
}

void UniformQuantizer::quantize_matrix(const Eigen::MatrixXd& in,
                                       IndexMatrix& indices,
                                       Eigen::MatrixXd& values) const {
    indices.resize(in.rows(), in.cols());
    values.resize(in.rows(), in.cols());
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
        for (Eigen::Index i = 0; i < in.rows(); ++i) {
            const Quantized q = quantize(in(i, j));
            indices(i, j) = static_cast<std::uint16_t>(q.index);
            values(i, j) = q.value;
        }
    }
}

Eigen::MatrixXd UniformQuantizer::quantize_values(const Eigen::MatrixXd& in) const {
    IndexMatrix indices;
    Eigen::MatrixXd values;
    quantize_matrix(in, indices, values);
    return values;
}

IndexMatrix UniformQuantizer::quantize_indices(const Eigen::MatrixXd& in) const {
    IndexMatrix indices;
    Eigen::MatrixXd values;
    quantize_matrix(in, indices, values);
    return indices;
}

double quantization_error(const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& reconstruction) {
    if (x.rows() != reconstruction.rows() || x.cols() != reconstruction.cols())
        throw_arg("quantization_error requires matching shapes");
    return (x - reconstruction).squaredNorm();
}

} // namespace naryq

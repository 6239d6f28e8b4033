#pragma once

#include "naryq/error.hpp"
#include "naryq/matrix.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace naryq {

using IndexMatrix = Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Uniform scalar quantizer with n levels evenly spaced on [-1,1]:
/// level i = -1 + 2(i-1)/(n-1), i in 1..n. Thresholds sit at the midpoints of
/// adjacent levels and exact midpoints resolve to the higher level; inputs
/// beyond [-1,1] saturate to the extreme levels.
class UniformQuantizer {
public:
    explicit UniformQuantizer(int arity);

    int arity() const { return arity_; }

    /// 1-based level value theta_n(i).
    double level(int index) const { return levels_(index - 1); }
    const Eigen::VectorXd& levels() const { return levels_; }

    struct Quantized {
        int index;     // 1..n
        double value;  // theta_n(index)
    };

    Quantized quantize(double x) const;

    /// Element-wise quantization; indices and level values of each entry.
    void quantize_matrix(const Eigen::MatrixXd& in, IndexMatrix& indices,
                         Eigen::MatrixXd& values) const;

    Eigen::MatrixXd quantize_values(const Eigen::MatrixXd& in) const;
    IndexMatrix quantize_indices(const Eigen::MatrixXd& in) const;

private:
    int arity_;
    Eigen::VectorXd levels_;     // n
    Eigen::VectorXd midpoints_;  // n-1 thresholds
};

/// Squared Frobenius norm of (x - reconstruction); shapes must match.
double quantization_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& reconstruction);

inline double quantization_error(const DataMatrix& x, const DataMatrix& reconstruction) {
    return quantization_error(x.values(), reconstruction.values());
}

} // namespace naryq

#pragma once

#include "naryq/error.hpp"

#include <Eigen/Dense>

#include <utility>

namespace naryq {

/// Column-major set of D-dimensional real vectors; column j is point x_j.
class DataMatrix {
public:
    DataMatrix() = default;

    explicit DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
        if (values_.rows() < 1 || values_.cols() < 1)
            throw_arg("DataMatrix requires dim >= 1 and count >= 1");
        if (!values_.allFinite())
            throw_data("DataMatrix rejects non-finite values");
    }

    Eigen::Index dim() const { return values_.rows(); }
    Eigen::Index count() const { return values_.cols(); }

    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::VectorXd point(Eigen::Index j) const { return values_.col(j); }

private:
    Eigen::MatrixXd values_;
};

} // namespace naryq

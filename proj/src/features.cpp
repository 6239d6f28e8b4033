#include "naryq/features.hpp"

namespace naryq {

DataMatrix codes_as_features_levels(const NaryCodeSet& codes,
                                    const UniformQuantizer& quantizer) {
    if (quantizer.arity() != codes.arity())
        throw_arg("codes_as_features arity mismatch");
    Eigen::MatrixXd out(codes.length(), codes.count());
    for (int j = 0; j < codes.count(); ++j)
        for (int i = 0; i < codes.length(); ++i)
            out(i, j) = quantizer.level(codes.at(i, j));
    return DataMatrix(std::move(out));
}

DataMatrix codes_as_features_refined(const NaryCodeSet& codes,
                                     const SubspaceCodebooks& cb) {
    if (!cb.index_values) throw_arg("codebooks carry no refined index values");
    if (codes.length() != cb.m || codes.arity() != cb.n)
        throw_arg("codes_as_features code shape mismatch");
    Eigen::MatrixXd out(codes.length(), codes.count());
    for (int j = 0; j < codes.count(); ++j)
        for (int i = 0; i < codes.length(); ++i)
            out(i, j) = (*cb.index_values)[i](codes.at(i, j) - 1);
    return DataMatrix(std::move(out));
}

DataMatrix codes_as_features_raw(const NaryCodeSet& codes) {
    Eigen::MatrixXd out(codes.length(), codes.count());
    for (int j = 0; j < codes.count(); ++j)
        for (int i = 0; i < codes.length(); ++i)
            out(i, j) = static_cast<double>(codes.at(i, j));
    return DataMatrix(std::move(out));
}

} // namespace naryq

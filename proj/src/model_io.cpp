#include "naryq/model_io.hpp"

#include <fstream>

#include "naryq/detail/io_util.hpp"

namespace naryq {

namespace {

// Matrix block: u32 rows, u32 cols, then rows*cols f32 column-major.
void write_block(std::ostream& out, const Eigen::MatrixXd& m) {
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            detail::write_scalar<float>(out, static_cast<float>(m(i, j)));
}

Eigen::MatrixXd read_block(std::istream& in) {
    const auto rows = detail::read_scalar<std::uint32_t>(in);
    const auto cols = detail::read_scalar<std::uint32_t>(in);
    if (rows > (1u << 20) || cols > (1u << 20))
        throw_data("matrix block dimensions out of range");
    Eigen::MatrixXd m(rows, cols);
    for (std::uint32_t j = 0; j < cols; ++j)
        for (std::uint32_t i = 0; i < rows; ++i)
            m(i, j) = detail::read_scalar<float>(in);
    return m;
}

void write_vector_block(std::ostream& out, const Eigen::VectorXd& v) {
    write_block(out, v);
}

Eigen::VectorXd read_vector_block(std::istream& in) {
    const Eigen::MatrixXd m = read_block(in);
    if (m.cols() != 1) throw_data("expected a column-vector block");
    return m.col(0);
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::lsq: return "lsq";
        case Method::itq: return "itq";
        case Method::pq: return "pq";
        case Method::ckmeans: return "ckmeans";
    }
    throw_arg("unknown method");
}

Method parse_method(const std::string& name) {
    if (name == "lsq") return Method::lsq;
    if (name == "itq") return Method::itq;
    if (name == "pq") return Method::pq;
    if (name == "ckmeans") return Method::ckmeans;
    throw_arg("unknown method '" + name + "'");
}

int TrainedModel::code_length() const {
    switch (method) {
        case Method::lsq: return std::get<LsqModel>(model).m;
        case Method::itq:
            return static_cast<int>(std::get<ItqModel>(model).rotation.rows());
        case Method::pq:
        case Method::ckmeans: return std::get<SubspaceCodebooks>(model).m;
    }
    throw_arg("unknown method");
}

int TrainedModel::arity() const {
    switch (method) {
        case Method::lsq: return std::get<LsqModel>(model).n;
        case Method::itq: return 2;
        case Method::pq:
        case Method::ckmeans: return std::get<SubspaceCodebooks>(model).n;
    }
    throw_arg("unknown method");
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    detail::write_magic(out, "NARYMDL");
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(model.method));
    detail::write_scalar<std::uint32_t>(out,
                                        model.preprocess.normalize_to_sphere ? 1 : 0);
    write_vector_block(out, model.preprocess.mean);

    switch (model.method) {
        case Method::lsq: {
            const auto& lsq = std::get<LsqModel>(model.model);
            detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(lsq.n));
            detail::write_scalar<float>(out, static_cast<float>(lsq.lambda));
            write_block(out, lsq.w);
            write_block(out, lsq.v);
            break;
        }
        case Method::itq: {
            const auto& itq = std::get<ItqModel>(model.model);
            write_block(out, itq.projection);
            write_block(out, itq.rotation);
            break;
        }
        case Method::pq:
        case Method::ckmeans: {
            const auto& cb = std::get<SubspaceCodebooks>(model.model);
            detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(cb.m));
            detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(cb.n));
            for (int d : cb.subspace_dims)
                detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(d));
            for (const auto& book : cb.codebooks) write_block(out, book);
            detail::write_scalar<std::uint32_t>(out, cb.rotation ? 1 : 0);
            if (cb.rotation) write_block(out, *cb.rotation);
            detail::write_scalar<std::uint32_t>(out, cb.index_values ? 1 : 0);
            if (cb.index_values) {
                for (const auto& v : *cb.index_values) write_vector_block(out, v);
                for (const std::uint8_t f : cb.refine_degenerate)
                    detail::write_scalar<std::uint32_t>(out, f);
            }
            break;
        }
    }
    if (!out) throw_data("write failed for " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open " + path);
    detail::expect_magic(in, "NARYMDL", "model");

    TrainedModel model;
    const auto method = detail::read_scalar<std::uint32_t>(in);
    if (method > 3) throw_data("unknown method tag");
    model.method = static_cast<Method>(method);
    model.preprocess.normalize_to_sphere = detail::read_scalar<std::uint32_t>(in) != 0;
    model.preprocess.mean = read_vector_block(in);

    switch (model.method) {
        case Method::lsq: {
            LsqModel lsq;
            lsq.n = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
            if (lsq.n < 2) throw_data("model arity out of range");
            lsq.lambda = detail::read_scalar<float>(in);
            lsq.w = read_block(in);
            lsq.v = read_block(in);
            lsq.m = static_cast<int>(lsq.w.cols());
            if (lsq.v.rows() != lsq.m || lsq.v.cols() != lsq.w.rows())
                throw_data("model matrices disagree on shape");
            model.model = std::move(lsq);
            break;
        }
        case Method::itq: {
            ItqModel itq;
            itq.projection = read_block(in);
            itq.rotation = read_block(in);
            if (itq.rotation.rows() != itq.rotation.cols() ||
                itq.rotation.rows() != itq.projection.cols())
                throw_data("model matrices disagree on shape");
            model.model = std::move(itq);
            break;
        }
        case Method::pq:
        case Method::ckmeans: {
            SubspaceCodebooks cb;
            cb.m = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
            cb.n = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
            if (cb.m < 1 || cb.m > (1 << 20) || cb.n < 1 || cb.n > 65535)
                throw_data("model header out of range");
            cb.subspace_dims.resize(cb.m);
            for (int& d : cb.subspace_dims)
                d = static_cast<int>(detail::read_scalar<std::uint32_t>(in));
            for (int i = 0; i < cb.m; ++i) {
                Eigen::MatrixXd book = read_block(in);
                if (book.rows() != cb.subspace_dims[i] || book.cols() != cb.n)
                    throw_data("codebook block disagrees with header");
                cb.codebooks.push_back(std::move(book));
            }
            if (detail::read_scalar<std::uint32_t>(in)) cb.rotation = read_block(in);
            if (detail::read_scalar<std::uint32_t>(in)) {
                std::vector<Eigen::VectorXd> values;
                for (int i = 0; i < cb.m; ++i) values.push_back(read_vector_block(in));
                cb.index_values = std::move(values);
                cb.refine_degenerate.assign(cb.m, 0);
                for (auto& f : cb.refine_degenerate)
                    f = detail::read_scalar<std::uint32_t>(in) ? 1 : 0;
            }
            model.model = std::move(cb);
            break;
        }
    }
    return model;
}

NaryCodeSet encode_points(const TrainedModel& model, const DataMatrix& x) {
    const DataMatrix pp = apply_preprocess(model.preprocess, x);
    switch (model.method) {
        case Method::lsq:
            return lsq_encode(std::get<LsqModel>(model.model), pp);
        case Method::itq: {
            // Keep one code currency: bits become arity-2 levels.
            const BinaryCodeSet bits =
                itq_encode(std::get<ItqModel>(model.model), pp);
            NaryCodeSet codes(bits.bits(), 2, bits.count());
            for (int j = 0; j < bits.count(); ++j)
                for (int i = 0; i < bits.bits(); ++i)
                    codes.set(i, j, bits.bit(j, i) ? 2 : 1);
            return codes;
        }
        case Method::pq:
        case Method::ckmeans:
            return sc_encode(std::get<SubspaceCodebooks>(model.model), pp);
    }
    throw_arg("unknown method");
}

void save_codes(const NaryCodeSet& codes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    detail::write_magic(out, "NARYCOD");
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(codes.length()));
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(codes.arity()));
    detail::write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(codes.count()));
    for (const std::uint16_t v : codes.data())
        detail::write_scalar<std::uint16_t>(out, v);
    if (!out) throw_data("write failed for " + path);
}

NaryCodeSet load_codes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open " + path);
    detail::expect_magic(in, "NARYCOD", "code set");
    const auto length = detail::read_scalar<std::uint32_t>(in);
    const auto arity = detail::read_scalar<std::uint32_t>(in);
    const auto count = detail::read_scalar<std::uint32_t>(in);
    if (length < 1 || length > (1u << 20) || arity < 1 || arity > 65535 ||
        count < 1 || count > (1u << 28))
        throw_data("code header out of range");
    NaryCodeSet codes(static_cast<int>(length), static_cast<int>(arity),
                      static_cast<int>(count));
    for (auto& v : codes.data()) {
        v = detail::read_scalar<std::uint16_t>(in);
        if (v < 1 || v > arity) throw_data("code value out of range");
    }
    if (in.peek() != std::ifstream::traits_type::eof())
        throw_data("code payload larger than header declares");
    return codes;
}

} // namespace naryq

#pragma once

#include <string>
#include <variant>

#include "naryq/codes.hpp"
#include "naryq/dataset.hpp"
#include "naryq/itq.hpp"
#include "naryq/lsq.hpp"
#include "naryq/subspace.hpp"

namespace naryq {

enum class Method { lsq, itq, pq, ckmeans };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// One trained coding model plus the preprocessing that was fit with it.
struct TrainedModel {
  Method method = Method::lsq;
  PreprocessModel preprocess;
  std::variant<LsqModel, ItqModel, SubspaceCodebooks> model;

  int code_length() const; // dimensions of the code (bits for itq)
  int arity() const;       // levels per dimension (2 for itq)
};

/// NARYMDL container.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

/// Encode a raw point set with whichever model is held.
NaryCodeSet encode_points(const TrainedModel& model, const DataMatrix& x);

/// NARYCOD container for code sets (n-ary layout; binary codes are stored as
/// n=2 and packed on demand).
void save_codes(const NaryCodeSet& codes, const std::string& path);
NaryCodeSet load_codes(const std::string& path);

} // namespace naryq

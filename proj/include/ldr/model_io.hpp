#pragma once

#include "ldr/construct.hpp"
#include "ldr/network.hpp"

#include "json.hpp"

#include <string>

namespace ldr {

using Json = nlohmann::json;

/// Model files are self-describing JSON with an explicit format_version.
/// Doubles survive a save/load round trip bit-for-bit.
inline constexpr int kModelFormatVersion = 1;

Json operator_to_json(const OperatorMatrix& op);
/// n is the dimension the surrounding context requires; mismatched array
/// lengths raise ValidationError naming the field.
OperatorMatrix operator_from_json(const Json& j, Index n, const std::string& field);

Json pair_to_json(const OperatorPair& pair);
OperatorPair pair_from_json(const Json& j, Index n, const std::string& field);

Json model_to_json(const NetworkModel& model);
NetworkModel model_from_json(const Json& j);

void save_model(const NetworkModel& model, const std::string& path);
NetworkModel load_model(const std::string& path);

/// Column-embedding artifact written by the construct command: generators,
/// column index, target vector, and the measured certificate residual.
Json embedding_to_json(const ColumnEmbedding& embedding);

void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

// array <-> vector/matrix helpers shared with config parsing
Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j, const std::string& field);
Json mat_to_json(const Mat& m);  // row-major flat array
Mat mat_from_json(const Json& j, Index rows, Index cols, const std::string& field);

}  // namespace ldr

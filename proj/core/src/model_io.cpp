#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbc/error.hpp"
#include "dbc/model.hpp"

namespace dbc {

using nlohmann::json;

std::string model_to_json(const MlpModel& model) {
  json doc;
  doc["format"] = kModelFormat;
  doc["layer_sizes"] = model.layer_sizes();
  doc["hidden_activation"] = to_string(model.hidden_activation());
  doc["output_activation"] = "sigmoid";
  json layers = json::array();
  for (const auto& layer : model.layers()) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row.push_back(layer.weights(r, c));
      rows.push_back(std::move(row));
    }
    json biases = json::array();
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) biases.push_back(layer.biases(r));
    layers.push_back({{"weights", std::move(rows)}, {"biases", std::move(biases)}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump(1) + "\n";
}

MlpModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }

  try {
    const auto format = doc.at("format").get<std::string>();
    if (format != kModelFormat)
      throw DataError("unsupported model format '" + format + "' (expected " + kModelFormat + ")");
    if (doc.value("output_activation", std::string("sigmoid")) != "sigmoid")
      throw DataError("output activation must be sigmoid");
    const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
    const Activation hidden = [&] {
      try {
        return parse_activation(doc.at("hidden_activation").get<std::string>());
      } catch (const UsageError& e) {
        throw DataError(e.what());
      }
    }();

    const auto& layers_doc = doc.at("layers");
    if (!layers_doc.is_array() || sizes.size() < 2 || layers_doc.size() != sizes.size() - 1)
      throw DataError("model file lists " + std::to_string(layers_doc.size()) +
                      " layers for " + std::to_string(sizes.size()) + " layer sizes");

    std::vector<DenseLayer> layers;
    for (std::size_t i = 0; i < layers_doc.size(); ++i) {
      const auto& rows = layers_doc[i].at("weights");
      const auto& biases = layers_doc[i].at("biases");
      const auto out = sizes[i + 1];
      const auto in = sizes[i];
      if (!rows.is_array() || rows.size() != out || !biases.is_array() || biases.size() != out)
        throw DataError("layer " + std::to_string(i) + " shape does not match layer_sizes");
      DenseLayer layer{Eigen::MatrixXd(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)),
                       Eigen::VectorXd(static_cast<Eigen::Index>(out))};
      for (std::size_t r = 0; r < out; ++r) {
        if (!rows[r].is_array() || rows[r].size() != in)
          throw DataError("layer " + std::to_string(i) + " row " + std::to_string(r) +
                          " has the wrong length");
        for (std::size_t c = 0; c < in; ++c)
          layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              rows[r][c].get<double>();
        layer.biases(static_cast<Eigen::Index>(r)) = biases[r].get<double>();
      }
      layers.push_back(std::move(layer));
    }
    return MlpModel(std::move(layers), hidden);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file '" + path.string() + "'");
  out << model_to_json(model);
  if (!out) throw DataError("failed writing model file '" + path.string() + "'");
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace dbc

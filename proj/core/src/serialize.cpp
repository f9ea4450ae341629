#include "delan/serialize.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace delan {

namespace {

using nlohmann::json;

json mat_to_json(const Mat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> flat(m.data(), m.data() + m.size());  // row-major
  j["data"] = flat;
  return j;
}

Mat mat_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != rows * cols)
    throw NumericError("serialize: matrix data length mismatch");
  Mat m(rows, cols);
  std::copy(flat.begin(), flat.end(), m.data());
  return m;
}

json layer_to_json(const LayerParams& lp) {
  json j;
  j["W"] = mat_to_json(lp.W);
  j["b"] = std::vector<double>(lp.b.data(), lp.b.data() + lp.b.size());
  return j;
}

LayerParams layer_from_json(const json& j) {
  LayerParams lp;
  lp.W = mat_from_json(j.at("W"));
  const auto b = j.at("b").get<std::vector<double>>();
  lp.b = Eigen::Map<const Vec>(b.data(), b.size());
  return lp;
}

std::string activation_name(Activation a) {
  return a == Activation::Softplus ? "softplus" : "relu";
}

Activation activation_from_name(const std::string& name) {
  if (name == "softplus") return Activation::Softplus;
  if (name == "relu") return Activation::Relu;
  throw NumericError("serialize: unknown activation '" + name + "'");
}

void check_version(const json& doc) {
  if (doc.at("format_version").get<int>() != 1)
    throw NumericError("serialize: unsupported format_version");
}

}  // namespace

nlohmann::json to_json(const DelanParams& params) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "delan";
  doc["n"] = params.cfg.n;
  doc["hidden"] = params.cfg.hidden;
  doc["activation"] = activation_name(params.cfg.activation);
  doc["diag_offset"] = params.cfg.diag_offset;
  json trunk = json::array();
  for (const auto& lp : params.trunk) trunk.push_back(layer_to_json(lp));
  doc["trunk"] = trunk;
  doc["head_ld"] = layer_to_json(params.head_ld);
  doc["head_lo"] = layer_to_json(params.head_lo);
  doc["head_g"] = layer_to_json(params.head_g);
  doc["normalization"] = {
      {"mean", std::vector<double>(params.norm_mean.data(),
                                   params.norm_mean.data() +
                                       params.norm_mean.size())},
      {"scale", std::vector<double>(params.norm_scale.data(),
                                    params.norm_scale.data() +
                                        params.norm_scale.size())}};
  return doc;
}

DelanParams delan_from_json(const nlohmann::json& doc) {
  check_version(doc);
  if (doc.at("kind") != "delan")
    throw NumericError("serialize: document is not a delan model");
  DelanParams p;
  p.cfg.n = doc.at("n").get<int>();
  p.cfg.hidden = doc.at("hidden").get<std::vector<int>>();
  p.cfg.activation = activation_from_name(doc.at("activation"));
  p.cfg.diag_offset = doc.at("diag_offset").get<double>();
  for (const auto& j : doc.at("trunk")) p.trunk.push_back(layer_from_json(j));
  p.head_ld = layer_from_json(doc.at("head_ld"));
  p.head_lo = layer_from_json(doc.at("head_lo"));
  p.head_g = layer_from_json(doc.at("head_g"));
  const auto mean = doc.at("normalization").at("mean").get<std::vector<double>>();
  const auto scale =
      doc.at("normalization").at("scale").get<std::vector<double>>();
  p.norm_mean = Eigen::Map<const Vec>(mean.data(), mean.size());
  p.norm_scale = Eigen::Map<const Vec>(scale.data(), scale.size());
  return p;
}

nlohmann::json to_json(const FfnnParams& params) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "ffnn";
  doc["n"] = params.cfg.n;
  doc["hidden"] = params.cfg.hidden;
  doc["activation"] = activation_name(params.cfg.activation);
  json layers = json::array();
  for (const auto& lp : params.layers) layers.push_back(layer_to_json(lp));
  doc["layers"] = layers;
  return doc;
}

FfnnParams ffnn_from_json(const nlohmann::json& doc) {
  check_version(doc);
  if (doc.at("kind") != "ffnn")
    throw NumericError("serialize: document is not a ffnn model");
  FfnnParams p;
  p.cfg.n = doc.at("n").get<int>();
  p.cfg.hidden = doc.at("hidden").get<std::vector<int>>();
  p.cfg.activation = activation_from_name(doc.at("activation"));
  for (const auto& j : doc.at("layers")) p.layers.push_back(layer_from_json(j));
  return p;
}

nlohmann::json to_json(const SiModel& model) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "si";
  doc["beta"] = std::vector<double>(model.beta.data(),
                                    model.beta.data() + model.beta.size());
  doc["rank"] = model.rank;
  return doc;
}

SiModel si_from_json(const nlohmann::json& doc) {
  check_version(doc);
  if (doc.at("kind") != "si")
    throw NumericError("serialize: document is not a si model");
  SiModel m;
  const auto beta = doc.at("beta").get<std::vector<double>>();
  m.beta = Eigen::Map<const Vec>(beta.data(), beta.size());
  m.rank = doc.at("rank").get<int>();
  return m;
}

void save_model(const nlohmann::json& doc, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw NumericError("serialize: cannot open " + path);
  file << doc.dump(2) << "\n";
}

nlohmann::json load_model(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw NumericError("serialize: cannot open " + path);
  json doc;
  file >> doc;
  return doc;
}

std::string model_kind(const nlohmann::json& doc) {
  return doc.at("kind").get<std::string>();
}

}  // namespace delan

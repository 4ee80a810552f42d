#include "infolearn/network_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "infolearn/errors.hpp"

namespace infolearn {

using nlohmann::json;

std::string network_to_json(const TeacherNetwork& net) {
  json doc;
  doc["format"] = "infolearn-network";
  doc["version"] = kNetworkFormatVersion;
  doc["kind"] = net.kind;
  doc["prior"] = net.prior;
  doc["input_dim"] = net.input_dim;
  doc["bias_input"] = net.bias_input;
  doc["seed"] = net.seed;
  doc["block_ends"] = net.block_ends;
  json layers = json::array();
  for (const auto& layer : net.layers) {
    json l;
    l["rows"] = layer.weights.rows();
    l["cols"] = layer.weights.cols();
    l["relu"] = layer.relu;
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) w.push_back(layer.weights(i, j));
    l["weights"] = std::move(w);
    l["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(1);
}

TeacherNetwork network_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("network json: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "infolearn-network") throw InputError("network json: unknown format");
    const int version = doc.at("version").get<int>();
    if (version != kNetworkFormatVersion) {
      throw InputError("network json: unsupported version " + std::to_string(version));
    }
    TeacherNetwork net;
    net.kind = doc.at("kind").get<std::string>();
    net.prior = doc.at("prior").get<std::string>();
    net.input_dim = doc.at("input_dim").get<int>();
    net.bias_input = doc.at("bias_input").get<bool>();
    net.seed = doc.at("seed").get<std::uint64_t>();
    net.block_ends = doc.at("block_ends").get<std::vector<int>>();
    Eigen::Index expected_in = net.fan_in();
    for (const auto& l : doc.at("layers")) {
      DenseLayer layer;
      const auto rows = l.at("rows").get<Eigen::Index>();
      const auto cols = l.at("cols").get<Eigen::Index>();
      if (cols != expected_in) throw ShapeError("network json: layer input width does not chain");
      const auto w = l.at("weights").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols) throw ShapeError("network json: weight count mismatch");
      layer.weights.resize(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) layer.weights(i, j) = w[static_cast<std::size_t>(i * cols + j)];
      const auto b = l.at("bias").get<std::vector<double>>();
      if (!b.empty() && static_cast<Eigen::Index>(b.size()) != rows) throw ShapeError("network json: bias size mismatch");
      layer.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
      layer.relu = l.at("relu").get<bool>();
      net.layers.push_back(std::move(layer));
      expected_in = rows;
    }
    return net;
  } catch (const json::exception& e) {
    throw InputError(std::string("network json: ") + e.what());
  }
}

void save_network(const TeacherNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << network_to_json(net) << '\n';
}

TeacherNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return network_from_json(ss.str());
}

}  // namespace infolearn

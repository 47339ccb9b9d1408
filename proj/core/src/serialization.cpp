#include "fracbayes/serialization.hpp"

#include <cstdio>

#include "fracbayes/error.hpp"
#include "json.hpp"

namespace fracbayes {

using nlohmann::json;

std::string coefficient_to_json(const Mesh1D& mesh, const Coefficient& a) {
  json j;
  j["mesh"] = {{"x_left", mesh.x_left()}, {"x_right", mesh.x_right()}, {"n_cells", mesh.n_cells()}};
  j["values"] = std::vector<double>(a.values().begin(), a.values().end());
  return j.dump(2);
}

MeshCoefficient coefficient_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    const auto& m = j.at("mesh");
    Mesh1D mesh(m.at("x_left").get<double>(), m.at("x_right").get<double>(),
                m.at("n_cells").get<int>());
    Coefficient a(j.at("values").get<std::vector<double>>());
    if (static_cast<int>(a.size()) != mesh.n_cells()) {
      throw ConfigError("coefficient has " + std::to_string(a.size()) + " values for " +
                        std::to_string(mesh.n_cells()) + " cells");
    }
    return {std::move(mesh), std::move(a)};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed coefficient JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid coefficient: ") + e.what());
  }
}

std::string data_to_json(const DataVector& data) {
  json j;
  j["points"] = data.setup.points;
  j["gamma"] = data.setup.noise_std;
  j["y"] = std::vector<double>(data.y.data(), data.y.data() + data.y.size());
  j["seed"] = data.seed;
  return j.dump(2);
}

DataVector data_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DataVector data;
    data.setup.points = j.at("points").get<std::vector<double>>();
    data.setup.noise_std = j.at("gamma").get<double>();
    const auto y = j.at("y").get<std::vector<double>>();
    if (y.size() != data.setup.points.size()) {
      throw ConfigError("data file has " + std::to_string(y.size()) + " values for " +
                        std::to_string(data.setup.points.size()) + " points");
    }
    if (!(data.setup.noise_std > 0.0)) throw ConfigError("data file gamma must be positive");
    data.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    data.seed = j.value("seed", std::uint64_t{0});
    return data;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed data JSON: ") + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace fracbayes

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sieve/error.hpp"
#include "sieve/model.hpp"

namespace sieve {

namespace {

constexpr int kModelVersion = 1;

using nlohmann::json;

template <typename T>
T field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw InputError(std::string("model file: missing field '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("model file: field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string model_to_json(const SieveModel& model) {
  json j;
  j["version"] = kModelVersion;
  j["basis"] = std::string(to_string(model.kind()));
  j["d"] = model.d();
  j["d_prime"] = model.index().d_prime();
  json rows = json::array();
  for (std::size_t r = 0; r < model.index().rows(); ++r) {
    auto row = model.index().row(r);
    rows.push_back(std::vector<std::uint32_t>(row.begin(), row.end()));
  }
  j["index"] = std::move(rows);
  j["beta"] = std::vector<double>(model.beta().data(), model.beta().data() + model.beta().size());
  json norm = json::array();
  for (const auto& [lo, hi] : model.normalizer().ranges) norm.push_back({lo, hi});
  j["normalizer"] = std::move(norm);
  j["meta"] = {{"n_train", model.meta().n_train},
               {"lambda", model.meta().lambda},
               {"converged", model.meta().converged}};
  return j.dump(1);
}

SieveModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model file: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("model file: top level must be an object");
  const int version = field<int>(j, "version");
  if (version != kModelVersion) {
    throw InputError("model file: unsupported version " + std::to_string(version) + " (expected " +
                     std::to_string(kModelVersion) + ")");
  }
  const BasisKind kind = [&] {
    try {
      return basis_kind_from_string(field<std::string>(j, "basis"));
    } catch (const DomainError& e) {
      throw InputError(std::string("model file: ") + e.what());
    }
  }();
  const int d = field<int>(j, "d");
  const int d_prime = field<int>(j, "d_prime");
  if (d < 1 || d_prime < 1 || d_prime > d) throw InputError("model file: invalid d / d_prime");

  const auto rows = field<std::vector<std::vector<std::int64_t>>>(j, "index");
  std::vector<std::uint32_t> entries;
  entries.reserve(rows.size() * static_cast<std::size_t>(d));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != static_cast<std::size_t>(d)) {
      throw InputError("model file: index row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " columns, expected " + std::to_string(d));
    }
    for (std::int64_t v : rows[r]) {
      if (v < 1 || v > static_cast<std::int64_t>(UINT32_MAX)) {
        throw InputError("model file: index entry out of range in row " + std::to_string(r + 1));
      }
      entries.push_back(static_cast<std::uint32_t>(v));
    }
  }
  auto index = std::make_shared<const IndexMatrix>(d, d_prime, std::move(entries));

  const auto beta_v = field<std::vector<double>>(j, "beta");
  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(beta_v.data(), static_cast<Eigen::Index>(beta_v.size()));

  Normalizer norm;
  for (const auto& pair : field<std::vector<std::vector<double>>>(j, "normalizer")) {
    if (pair.size() != 2 || !(pair[1] > pair[0])) throw InputError("model file: bad normalizer entry");
    norm.ranges.emplace_back(pair[0], pair[1]);
  }

  ModelMeta meta;
  if (j.contains("meta")) {
    const json& m = j.at("meta");
    meta.n_train = field<std::size_t>(m, "n_train");
    meta.lambda = field<double>(m, "lambda");
    meta.converged = field<bool>(m, "converged");
  }
  return SieveModel(kind, std::move(index), std::move(beta), std::move(norm), meta);
}

void save_model(const SieveModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open model file for writing: " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw InputError("failed writing model file: " + path.string());
}

SieveModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace sieve

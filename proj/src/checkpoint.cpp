// Copyright 2026 The Q2Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <map>

#include "q2q/errors.hpp"
#include "q2q/prediction.hpp"

namespace q2q {

Checkpoint make_checkpoint(const Q2QModel& model, nlohmann::json meta) {
  Checkpoint ck;
  ck.spec = model.spec();
  ck.input_dim = model.input_dim();
  ck.sif = model.sif_weights();
  ck.meta = std::move(meta);
  for (const Parameter<double>* p : model.parameters()) {
    const auto& d = p->value.data();
    ck.params.push_back({p->name, p->value.shape(), std::vector<double>(d.data(), d.data() + d.size())});
  }
  return ck;
}

Q2QModel model_from_checkpoint(const Checkpoint& ck) {
  Q2QModel model(ck.spec, ck.input_dim);
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : ck.params) {
    if (!by_name.emplace(t.name, &t).second) throw FormatError("checkpoint: duplicate parameter " + t.name);
  }
  auto params = model.parameters();
  if (params.size() != by_name.size()) {
    throw FormatError("checkpoint: " + std::to_string(by_name.size()) + " parameters stored, model has " +
                      std::to_string(params.size()));
  }
  for (Parameter<double>* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw FormatError("checkpoint: missing parameter " + p->name);
    const NamedTensor& t = *it->second;
    if (t.shape != p->value.shape() || static_cast<Index>(t.data.size()) != p->value.size()) {
      throw FormatError("checkpoint: parameter " + p->name + " has shape " + shape_string(t.shape) + ", expected " +
                        shape_string(p->value.shape()));
    }
    p->value.data() = Eigen::Map<const Eigen::VectorXd>(t.data.data(), p->value.size());
  }
  model.set_sif_weights(ck.sif);
  return model;
}

nlohmann::json checkpoint_to_json(const Checkpoint& ck) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& t : ck.params) params.push_back({{"name", t.name}, {"shape", t.shape}, {"data", t.data}});
  nlohmann::json meta = ck.meta;
  meta["input_dim"] = ck.input_dim;
  if (ck.spec.encoder == EncoderKind::sif_average) {
    meta["sif"] = {{"a", ck.sif.smoothing_a}, {"weights", ck.sif.weight}};
  }
  return {{"version", ck.version}, {"spec", to_json(ck.spec)}, {"params", std::move(params)}, {"meta", std::move(meta)}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer()) {
    throw FormatError("checkpoint: missing integer version");
  }
  int version = j["version"].get<int>();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kCheckpointVersion) + ")");
  }
  try {
    Checkpoint ck;
    ck.version = version;
    ck.spec = spec_from_json(j.at("spec"));
    ck.meta = j.at("meta");
    ck.input_dim = ck.meta.at("input_dim").get<Index>();
    if (ck.meta.contains("sif")) {
      ck.sif.smoothing_a = ck.meta["sif"].at("a").get<double>();
      ck.sif.weight = ck.meta["sif"].at("weights").get<std::map<std::string, double>>();
    }
    for (const auto& p : j.at("params")) {
      ck.params.push_back(
          {p.at("name").get<std::string>(), p.at("shape").get<Shape>(), p.at("data").get<std::vector<double>>()});
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << checkpoint_to_json(ck).dump() << '\n';
  if (!out) throw DataError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace q2q

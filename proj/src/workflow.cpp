// Copyright 2026 The TAIBOM Toolkit Authors
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

#include "taibom/workflow.hpp"

#include <fstream>
#include <sstream>

#include "taibom/errors.hpp"

namespace taibom {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out.str();
}

std::uint64_t total_bytes(const fs::path& path) {
  return artifact_byte_count(path);
}

std::string file_uri(const fs::path& path) {
  return "file://" + fs::absolute(path).lexically_normal().generic_string();
}

std::uint64_t pick_counter(const Store& store, const KeyPair& keypair,
                           const std::string& name,
                           std::optional<std::uint64_t> requested) {
  if (!requested) {
    return store.max_counter(keypair.fingerprint.value, name) + 1;
  }
  // explicit counters must be fresh in their series
  if (store.max_counter(keypair.fingerprint.value, name) >= *requested &&
      !store.find(std::nullopt, keypair.fingerprint.value, name).empty()) {
    for (const auto& id :
         store.find(std::nullopt, keypair.fingerprint.value, name)) {
      auto env = store.get(id);
      if (env && env->version.counter == *requested) {
        throw VersionError("counter " + std::to_string(*requested) +
                           " already used in series (" +
                           keypair.fingerprint.value + ", " + name + ")");
      }
    }
  }
  return *requested;
}

AttestationId sign_and_put(Envelope& env, const KeyPair& keypair,
                           Store& store) {
  env.issued_at = now_utc();
  sign_envelope(env, keypair);
  return store.put(env);
}

// unsigned annotations: a local bytes location for rehash checks, and the
// mutable access time the signed fields must not carry
void set_artifact_annotations(Envelope& env, const fs::path& path) {
  env.annotations[kLocalPathHint] =
      fs::absolute(path).lexically_normal().string();
  env.annotations["last_access_time"] = now_utc();
}

ManifestCode parse_manifest_code(const json& j, const fs::path& base,
                                 const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  ManifestCode code;
  if (!j.contains("path") || !j["path"].is_string()) {
    throw FormatError(where + ": missing path");
  }
  code.path = base / fs::path(j["path"].get<std::string>());
  if (!j.contains("sbom") || !j["sbom"].is_string()) {
    throw FormatError(where + ": missing sbom");
  }
  code.sbom = base / fs::path(j["sbom"].get<std::string>());
  std::string fmt = "spdx";
  if (j.contains("sbom_format")) {
    if (!j["sbom_format"].is_string()) {
      throw FormatError(where + ": sbom_format must be a string");
    }
    fmt = j["sbom_format"].get<std::string>();
  }
  if (fmt == "spdx" || fmt == "spdx-json") {
    code.sbom_format = SbomFormat::SpdxJson;
  } else if (fmt == "cyclonedx" || fmt == "cyclonedx-json") {
    code.sbom_format = SbomFormat::CycloneDxJson;
  } else {
    throw FormatError(where + ": unknown sbom_format '" + fmt + "'");
  }
  if (j.contains("name") && j["name"].is_string()) {
    code.name = j["name"].get<std::string>();
  } else {
    code.name = code.path.filename().string();
  }
  return code;
}

}  // namespace

PipelineManifest load_manifest(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("manifest: invalid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw FormatError("manifest: expected a JSON object");
  std::string version =
      doc.contains("schema_version") && doc["schema_version"].is_string()
          ? doc["schema_version"].get<std::string>()
          : "";
  if (version != kManifestVersion) {
    throw FormatError("manifest: schema_version must be '" +
                      std::string(kManifestVersion) + "'");
  }
  fs::path base = fs::absolute(path).parent_path();

  PipelineManifest m;
  if (doc.contains("name") && doc["name"].is_string()) {
    m.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("datasets") || !doc["datasets"].is_array() ||
      doc["datasets"].empty()) {
    throw FormatError("manifest: datasets must be a non-empty array");
  }
  std::size_t index = 0;
  for (const auto& d : doc["datasets"]) {
    std::string where = "manifest.datasets[" + std::to_string(index) + "]";
    if (!d.is_object() || !d.contains("path") || !d["path"].is_string()) {
      throw FormatError(where + ": missing path");
    }
    ManifestDataset ds;
    ds.path = base / fs::path(d["path"].get<std::string>());
    ds.name = d.contains("name") && d["name"].is_string()
                  ? d["name"].get<std::string>()
                  : ds.path.filename().string();
    if (d.contains("label") && d["label"].is_string()) {
      ds.label = d["label"].get<std::string>();
    }
    if (d.contains("license") && d["license"].is_string()) {
      ds.license = d["license"].get<std::string>();
    }
    if (d.contains("collection_method") && d["collection_method"].is_string()) {
      ds.collection_method = d["collection_method"].get<std::string>();
    }
    if (d.contains("role")) {
      if (!d["role"].is_string()) {
        throw FormatError(where + ": role must be a string");
      }
      auto role = training_role_from_name(d["role"].get<std::string>());
      if (!role) throw FormatError(where + ": unknown role");
      ds.role = *role;
    }
    m.datasets.push_back(std::move(ds));
    ++index;
  }
  if (!doc.contains("training_code")) {
    throw FormatError("manifest: missing training_code");
  }
  m.training_code =
      parse_manifest_code(doc["training_code"], base, "manifest.training_code");
  if (!doc.contains("inferencing_code")) {
    throw FormatError("manifest: missing inferencing_code");
  }
  m.inferencing_code = parse_manifest_code(doc["inferencing_code"], base,
                                           "manifest.inferencing_code");
  if (doc.contains("config")) {
    if (!doc["config"].is_object()) {
      throw FormatError("manifest: config must be an object");
    }
    if (doc["config"].contains("hyperparameters")) {
      const json& h = doc["config"]["hyperparameters"];
      if (!h.is_object()) {
        throw FormatError("manifest: config.hyperparameters must be an object");
      }
      for (const auto& [key, value] : h.items()) {
        if (!value.is_string()) {
          throw CanonicalizationError(
              "manifest: hyperparameter '" + key +
              "' must be a string (payload values are strings only)");
        }
        m.hyperparameters[key] = value.get<std::string>();
      }
    }
    if (doc["config"].contains("system_metadata")) {
      const json& s = doc["config"]["system_metadata"];
      if (!s.is_object()) {
        throw FormatError("manifest: config.system_metadata must be an object");
      }
      for (const auto& [key, value] : s.items()) {
        if (!value.is_string()) {
          throw CanonicalizationError(
              "manifest: system_metadata '" + key +
              "' must be a string (payload values are strings only)");
        }
        m.system_metadata[key] = value.get<std::string>();
      }
    }
  }
  if (doc.contains("weights")) {
    if (!doc["weights"].is_object() || !doc["weights"].contains("path") ||
        !doc["weights"]["path"].is_string()) {
      throw FormatError("manifest: weights must be {path}");
    }
    m.weights_path = base / fs::path(doc["weights"]["path"].get<std::string>());
  }
  if (!doc.contains("signing_key") || !doc["signing_key"].is_string()) {
    throw FormatError("manifest: missing signing_key");
  }
  m.signing_key = base / fs::path(doc["signing_key"].get<std::string>());
  if (doc.contains("counter")) {
    if (!doc["counter"].is_number_unsigned()) {
      throw FormatError("manifest: counter must be a non-negative integer");
    }
    m.counter = doc["counter"].get<std::uint64_t>();
  }
  return m;
}

KeyPair load_keypair(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("keypair: invalid JSON: " + std::string(e.what()));
  }
  KeyPair kp;
  kp.scheme = doc.value("scheme", std::string(kEd25519));
  auto pub = base64_decode(doc.value("public", std::string()));
  auto sec = base64_decode(doc.value("secret", std::string()));
  if (!pub || !sec || pub->empty() || sec->empty()) {
    throw FormatError("keypair: malformed public/secret encoding in " +
                      path.string());
  }
  kp.public_bytes = std::move(*pub);
  kp.secret_bytes = std::move(*sec);
  kp.fingerprint = hash_bytes(kp.public_bytes);
  return kp;
}

void save_keypair(const KeyPair& keypair, const fs::path& path) {
  json doc{{"scheme", keypair.scheme},
           {"public", base64_encode(keypair.public_bytes)},
           {"secret", base64_encode(keypair.secret_bytes)},
           {"fingerprint", keypair.fingerprint.value}};
  if (!path.parent_path().empty()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write: " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
  fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write,
                  fs::perm_options::replace);
  // companion public key, shareable with verifiers
  fs::path pub_path = path;
  pub_path += ".pub";
  std::ofstream pub(pub_path, std::ios::binary | std::ios::trunc);
  if (!pub) throw IoError("cannot write: " + pub_path.string());
  pub << keypair.scheme << " " << base64_encode(keypair.public_bytes) << "\n";
}

AttestationId attest_data_path(const fs::path& path, const std::string& name,
                               const std::string& label,
                               const std::string& license,
                               std::optional<TrainingRole> role,
                               const std::string& collection_method,
                               Store& store, const KeyPair& keypair,
                               std::optional<std::uint64_t> counter,
                               const std::string& semver) {
  if (!fs::exists(path)) throw IoError("no such path: " + path.string());
  Envelope env;
  auto fill = [&](DataPayload& p) {
    p.name = name;
    p.label = label;
    p.location = file_uri(path);
    p.content = merkle_path(path);
    p.byte_count = total_bytes(path);
    if (!license.empty()) p.license = LicenseInfo{license, std::nullopt};
  };
  if (role) {
    TrainingDataPayload p;
    fill(p);
    p.collection_method = collection_method;
    p.intended_role = *role;
    env.kind = Kind::TrainingData;
    env.payload = std::move(p);
  } else {
    DataPayload p;
    fill(p);
    env.kind = Kind::Data;
    env.payload = std::move(p);
  }
  env.version = VersionInfo{name, semver,
                            pick_counter(store, keypair, name, counter)};
  set_artifact_annotations(env, path);
  return sign_and_put(env, keypair, store);
}

AttestationId attest_code_path(const fs::path& path, const std::string& name,
                               CodeRole role,
                               std::optional<AttestationId> sbom_ref,
                               const std::string& license, Store& store,
                               const KeyPair& keypair,
                               std::optional<std::uint64_t> counter) {
  if (!fs::exists(path)) throw IoError("no such path: " + path.string());
  if (sbom_ref) {
    auto sbom = store.get(*sbom_ref);
    if (!sbom) throw NotFound("no such sbom attestation: " + *sbom_ref);
    if (sbom->kind != Kind::Sbom) {
      throw KindError("sbom_ref resolves to " + kind_name(sbom->kind) +
                      ", expected sbom");
    }
  }
  Envelope env;
  CodePayload p;
  p.name = name;
  p.location = file_uri(path);
  p.content = merkle_path(path);
  p.sbom_ref = std::move(sbom_ref);
  if (!license.empty()) p.license = LicenseInfo{license, std::nullopt};
  p.code_role = role;
  env.kind = Kind::Code;
  env.payload = std::move(p);
  env.version =
      VersionInfo{name, "1.0.0", pick_counter(store, keypair, name, counter)};
  set_artifact_annotations(env, path);
  return sign_and_put(env, keypair, store);
}

AttestationId attest_pack(const std::vector<AttestationId>& member_ids,
                          const std::string& name, Store& store,
                          const KeyPair& keypair,
                          std::optional<std::uint64_t> counter) {
  DataPackPayload p;
  for (const auto& id : member_ids) {
    auto env = store.get(id);
    if (!env) throw NotFound("no such attestation: " + id);
    if (env->kind != Kind::TrainingData) {
      throw KindError("pack member " + id + " is a " + kind_name(env->kind) +
                      " attestation, expected training-data");
    }
    p.members.push_back(PackMember{env->version.name, id});
  }
  for (std::size_t i = 0; i < p.members.size(); ++i) {
    for (std::size_t j = i + 1; j < p.members.size(); ++j) {
      if (p.members[i].name == p.members[j].name) {
        throw FormatError("duplicate pack member name '" + p.members[i].name +
                          "'");
      }
    }
  }
  Envelope env;
  env.kind = Kind::DataPack;
  env.payload = std::move(p);
  env.version =
      VersionInfo{name, "1.0.0", pick_counter(store, keypair, name, counter)};
  return sign_and_put(env, keypair, store);
}

AttestationId attest_trained_system(const AttestationId& pack_id,
                                    const AttestationId& code_id,
                                    const std::string& label,
                                    const std::string& name, Store& store,
                                    const KeyPair& keypair,
                                    std::optional<std::uint64_t> counter) {
  auto pack = store.get(pack_id);
  if (!pack) throw NotFound("no such attestation: " + pack_id);
  if (pack->kind != Kind::DataPack) {
    throw KindError("datapack_ref resolves to " + kind_name(pack->kind) +
                    ", expected data-pack");
  }
  auto code = store.get(code_id);
  if (!code) throw NotFound("no such attestation: " + code_id);
  if (code->kind != Kind::Code ||
      std::get<CodePayload>(code->payload).code_role != CodeRole::Training) {
    throw KindError("training_code_ref must resolve to code with role "
                    "'training'");
  }
  Envelope env;
  env.kind = Kind::TrainedSystem;
  env.payload = TrainedSystemPayload{label, pack_id, code_id};
  env.version =
      VersionInfo{name, "1.0.0", pick_counter(store, keypair, name, counter)};
  return sign_and_put(env, keypair, store);
}

AttestationId attest_inference_system(const AttestationId& config_id,
                                      const AttestationId& code_id,
                                      const std::string& label,
                                      const std::string& name, Store& store,
                                      const KeyPair& keypair,
                                      std::optional<std::uint64_t> counter) {
  auto config = store.get(config_id);
  if (!config) throw NotFound("no such attestation: " + config_id);
  if (config->kind != Kind::Config) {
    throw KindError("config_ref resolves to " + kind_name(config->kind) +
                    ", expected config");
  }
  auto code = store.get(code_id);
  if (!code) throw NotFound("no such attestation: " + code_id);
  if (code->kind != Kind::Code ||
      std::get<CodePayload>(code->payload).code_role != CodeRole::Inferencing) {
    throw KindError("inferencing_code_ref must resolve to code with role "
                    "'inferencing'");
  }
  Envelope env;
  env.kind = Kind::InferenceSystem;
  env.payload = InferenceSystemPayload{label, config_id, code_id};
  env.version =
      VersionInfo{name, "1.0.0", pick_counter(store, keypair, name, counter)};
  return sign_and_put(env, keypair, store);
}

TrainingPhaseResult attest_training_phase(const PipelineManifest& manifest,
                                          Store& store) {
  KeyPair keypair = load_keypair(manifest.signing_key);
  Store::WriteLock lock(store);
  TrainingPhaseResult result;
  for (const auto& ds : manifest.datasets) {
    result.datasets.push_back(attest_data_path(
        ds.path, ds.name, ds.label, ds.license, ds.role, ds.collection_method,
        store, keypair, manifest.counter));
  }
  result.data_pack = attest_pack(result.datasets, manifest.name + "-datapack",
                                 store, keypair, manifest.counter);
  IngestOptions sbom_options;
  if (manifest.counter) {
    sbom_options.version =
        VersionInfo{manifest.training_code.name + "-sbom", "1.0.0",
                    *manifest.counter};
  }
  result.sbom = ingest_sbom(read_file(manifest.training_code.sbom),
                            manifest.training_code.sbom_format, store, keypair,
                            sbom_options);
  result.code = attest_code_path(
      manifest.training_code.path, manifest.training_code.name,
      CodeRole::Training, result.sbom, "", store, keypair, manifest.counter);
  result.trained_system = attest_trained_system(
      result.data_pack, result.code, manifest.name,
      manifest.name + "-trained", store, keypair, manifest.counter);
  return result;
}

AttestationId attest_weights(const fs::path& weights_path,
                             const AttestationId& trained_system_id,
                             const std::string& name, Store& store,
                             const KeyPair& keypair,
                             std::optional<std::uint64_t> counter) {
  auto trained = store.get(trained_system_id);
  if (!trained) throw NotFound("no such attestation: " + trained_system_id);
  if (trained->kind != Kind::TrainedSystem) {
    throw KindError("produced_by must resolve to trained-system, found " +
                    kind_name(trained->kind));
  }
  if (!fs::exists(weights_path)) {
    throw IoError("no such path: " + weights_path.string());
  }
  WeightsPayload wp;
  wp.name = name;
  wp.label = "weights";
  wp.location = file_uri(weights_path);
  wp.content = merkle_path(weights_path);
  wp.byte_count = total_bytes(weights_path);
  wp.produced_by = trained_system_id;
  Envelope weights;
  weights.kind = Kind::Weights;
  weights.payload = std::move(wp);
  weights.version =
      VersionInfo{name, "1.0.0", pick_counter(store, keypair, name, counter)};
  set_artifact_annotations(weights, weights_path);
  return sign_and_put(weights, keypair, store);
}

AttestationId attest_config(
    const AttestationId& weights_id,
    const std::map<std::string, std::string>& hyperparameters,
    const std::map<std::string, std::string>& system_metadata,
    const std::string& name, Store& store, const KeyPair& keypair,
    std::optional<std::uint64_t> counter) {
  auto weights = store.get(weights_id);
  if (!weights) throw NotFound("no such attestation: " + weights_id);
  if (weights->kind != Kind::Weights) {
    throw KindError("weights_ref resolves to " + kind_name(weights->kind) +
                    ", expected weights");
  }
  Envelope config;
  config.kind = Kind::Config;
  config.payload = ConfigPayload{weights_id, hyperparameters, system_metadata};
  config.version =
      VersionInfo{name, "1.0.0", pick_counter(store, keypair, name, counter)};
  return sign_and_put(config, keypair, store);
}

WeightsConfigResult attest_weights_and_config(
    const fs::path& weights_path, const AttestationId& trained_system_id,
    const std::map<std::string, std::string>& hyperparameters,
    const std::map<std::string, std::string>& system_metadata, Store& store,
    const KeyPair& keypair, const std::string& name,
    std::optional<std::uint64_t> counter) {
  Store::WriteLock lock(store);
  WeightsConfigResult result;
  result.weights = attest_weights(weights_path, trained_system_id, name, store,
                                  keypair, counter);
  result.config = attest_config(result.weights, hyperparameters,
                                system_metadata, name + "-config", store,
                                keypair, counter);
  return result;
}

AttestationId attest_deployment(const AttestationId& config_id,
                                const ManifestCode& inferencing_code,
                                Store& store, const KeyPair& keypair,
                                const std::string& name,
                                std::optional<std::uint64_t> counter) {
  auto config = store.get(config_id);
  if (!config) throw NotFound("no such attestation: " + config_id);
  if (config->kind != Kind::Config) {
    throw KindError("config_ref resolves to " + kind_name(config->kind) +
                    ", expected config");
  }
  Store::WriteLock lock(store);
  IngestOptions sbom_options;
  if (counter) {
    sbom_options.version =
        VersionInfo{inferencing_code.name + "-sbom", "1.0.0", *counter};
  }
  AttestationId sbom_id =
      ingest_sbom(read_file(inferencing_code.sbom),
                  inferencing_code.sbom_format, store, keypair, sbom_options);
  AttestationId code_id = attest_code_path(
      inferencing_code.path, inferencing_code.name, CodeRole::Inferencing,
      sbom_id, "", store, keypair, counter);
  return attest_inference_system(config_id, code_id, name, name + "-inference",
                                 store, keypair, counter);
}

AttestationId attest_validation(const AttestationId& system_id,
                                const fs::path& report_path, Verdict verdict,
                                Store& store, const KeyPair& keypair,
                                const std::string& name,
                                std::optional<std::uint64_t> counter) {
  auto system = store.get(system_id);
  if (!system) throw NotFound("no such attestation: " + system_id);
  if (system->kind != Kind::TrainedSystem &&
      system->kind != Kind::InferenceSystem) {
    throw KindError("validation subject must be a trained-system or "
                    "inference-system, found " +
                    kind_name(system->kind));
  }
  Envelope env;
  env.kind = Kind::ValidationReport;
  env.payload = ValidationReportPayload{
      system_id, hash_bytes(read_file(report_path)), verdict};
  env.version =
      VersionInfo{name, "1.0.0", pick_counter(store, keypair, name, counter)};
  return sign_and_put(env, keypair, store);
}

PipelineResult run_pipeline(const PipelineManifest& manifest, Store& store) {
  if (!manifest.weights_path) {
    throw FormatError(
        "manifest: pipeline run needs a weights entry ({\"weights\": "
        "{\"path\": ...}}) to attest");
  }
  KeyPair keypair = load_keypair(manifest.signing_key);
  Store::WriteLock lock(store);
  PipelineResult result;
  result.training = attest_training_phase(manifest, store);
  result.weights_config = attest_weights_and_config(
      *manifest.weights_path, result.training.trained_system,
      manifest.hyperparameters, manifest.system_metadata, store, keypair,
      manifest.name + "-weights", manifest.counter);
  result.inference_system = attest_deployment(
      result.weights_config.config, manifest.inferencing_code, store, keypair,
      manifest.name, manifest.counter);
  return result;
}

json pipeline_result_to_json(const PipelineResult& result) {
  return json{{"trained_system", result.training.trained_system},
              {"datasets", result.training.datasets},
              {"data_pack", result.training.data_pack},
              {"training_sbom", result.training.sbom},
              {"training_code", result.training.code},
              {"weights", result.weights_config.weights},
              {"config", result.weights_config.config},
              {"inference_system", result.inference_system}};
}

}  // namespace taibom

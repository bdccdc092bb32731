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

#include "taibom/model.hpp"

#include <cctype>
#include <cstdio>
#include <ctime>
#include <iterator>
#include <regex>
#include <set>

#include "taibom/errors.hpp"

namespace taibom {

using nlohmann::json;

namespace {

const char* kKindNames[] = {
    "data",           "training-data",
    "data-pack",      "code",
    "sbom",           "weights",
    "config",         "trained-system",
    "inference-system", "validation-report",
    "revocation",
};

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json digest_to_json(const Digest& d) {
  return json{{"algorithm", d.algorithm}, {"value", d.value}};
}

Digest digest_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("algorithm") || !j.contains("value") ||
      !j["algorithm"].is_string() || !j["value"].is_string()) {
    throw FormatError(where + ": digest must be {algorithm, value}");
  }
  if (j.size() != 2) throw FormatError(where + ": unknown digest field");
  return Digest{j["algorithm"].get<std::string>(),
                j["value"].get<std::string>()};
}

json merkle_to_json(const MerkleRoot& m) {
  return json{{"chunk_size", m.chunk_size},
              {"leaf_count", m.leaf_count},
              {"root", digest_to_json(m.root)},
              {"scheme", m.scheme}};
}

MerkleRoot merkle_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("chunk_size") || !j.contains("leaf_count") ||
      !j.contains("root") || !j.contains("scheme")) {
    throw FormatError(where + ": content must carry chunk_size, leaf_count, "
                              "root, scheme");
  }
  if (j.size() != 4) throw FormatError(where + ": unknown content field");
  if (!j["chunk_size"].is_number_unsigned() ||
      !j["leaf_count"].is_number_unsigned() || !j["scheme"].is_string()) {
    throw FormatError(where + ": malformed content fields");
  }
  MerkleRoot m;
  m.chunk_size = j["chunk_size"].get<std::uint64_t>();
  m.leaf_count = j["leaf_count"].get<std::uint64_t>();
  m.root = digest_from_json(j["root"], where + ".root");
  m.scheme = j["scheme"].get<std::string>();
  return m;
}

json license_to_json(const LicenseInfo& l) {
  json j{{"identifier", l.identifier}};
  if (l.text_digest) j["text_digest"] = digest_to_json(*l.text_digest);
  return j;
}

LicenseInfo license_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("identifier") ||
      !j["identifier"].is_string()) {
    throw FormatError(where + ": license must carry an identifier");
  }
  LicenseInfo l;
  l.identifier = j["identifier"].get<std::string>();
  for (const auto& [key, value] : j.items()) {
    if (key == "identifier") continue;
    if (key == "text_digest") {
      l.text_digest = digest_from_json(value, where + ".text_digest");
    } else {
      throw FormatError(where + ": unknown license field '" + key + "'");
    }
  }
  return l;
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw FormatError(where + ": missing or non-string '" + key + "'");
  }
  return j[key].get<std::string>();
}

std::uint64_t require_uint(const json& j, const std::string& key,
                           const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_unsigned()) {
    throw FormatError(where + ": missing or non-integer '" + key + "'");
  }
  return j[key].get<std::uint64_t>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool found = false;
    for (const char* a : allowed) {
      if (key == a) {
        found = true;
        break;
      }
    }
    if (!found) throw FormatError(where + ": unknown field '" + key + "'");
  }
}

void data_fields_to_json(const DataPayload& p, json& j) {
  j["byte_count"] = p.byte_count;
  j["content"] = merkle_to_json(p.content);
  j["label"] = p.label;
  if (p.license) j["license"] = license_to_json(*p.license);
  j["location"] = p.location;
  j["name"] = p.name;
}

void data_fields_from_json(const json& j, DataPayload& p,
                           const std::string& where) {
  p.byte_count = require_uint(j, "byte_count", where);
  if (!j.contains("content")) throw FormatError(where + ": missing content");
  p.content = merkle_from_json(j["content"], where + ".content");
  p.label = require_string(j, "label", where);
  if (j.contains("license")) {
    p.license = license_from_json(j["license"], where + ".license");
  }
  p.location = require_string(j, "location", where);
  p.name = require_string(j, "name", where);
}

json payload_to_json(const Payload& payload) {
  return std::visit(
      Overloaded{
          [](const TrainingDataPayload& p) {
            json j;
            data_fields_to_json(p, j);
            j["collection_method"] = p.collection_method;
            j["intended_role"] = training_role_name(p.intended_role);
            return j;
          },
          [](const WeightsPayload& p) {
            json j;
            data_fields_to_json(p, j);
            j["produced_by"] = p.produced_by;
            return j;
          },
          [](const DataPayload& p) {
            json j;
            data_fields_to_json(p, j);
            return j;
          },
          [](const DataPackPayload& p) {
            json members = json::array();
            for (const auto& m : p.members) {
              members.push_back(json{{"name", m.name}, {"ref", m.ref}});
            }
            return json{{"members", members}};
          },
          [](const CodePayload& p) {
            json j;
            j["code_role"] = code_role_name(p.code_role);
            j["content"] = merkle_to_json(p.content);
            if (p.license) j["license"] = license_to_json(*p.license);
            j["location"] = p.location;
            j["name"] = p.name;
            if (p.sbom_ref) j["sbom_ref"] = *p.sbom_ref;
            return j;
          },
          [](const SbomPayload& p) {
            json components = json::array();
            for (const auto& c : p.components) {
              json cj;
              cj["declared_cves"] = c.declared_cves;
              cj["declared_cwes"] = c.declared_cwes;
              if (c.cpe) cj["cpe"] = *c.cpe;
              if (c.license) cj["license"] = license_to_json(*c.license);
              cj["name"] = c.name;
              if (c.purl) cj["purl"] = *c.purl;
              cj["version"] = c.version;
              components.push_back(cj);
            }
            return json{{"components", components},
                        {"document_digest", digest_to_json(p.document_digest)},
                        {"source_format", sbom_format_name(p.source_format)}};
          },
          [](const ConfigPayload& p) {
            return json{{"hyperparameters", p.hyperparameters},
                        {"system_metadata", p.system_metadata},
                        {"weights_ref", p.weights_ref}};
          },
          [](const TrainedSystemPayload& p) {
            return json{{"datapack_ref", p.datapack_ref},
                        {"label", p.label},
                        {"training_code_ref", p.training_code_ref}};
          },
          [](const InferenceSystemPayload& p) {
            return json{{"config_ref", p.config_ref},
                        {"inferencing_code_ref", p.inferencing_code_ref},
                        {"label", p.label}};
          },
          [](const ValidationReportPayload& p) {
            return json{{"report_digest", digest_to_json(p.report_digest)},
                        {"system_ref", p.system_ref},
                        {"verdict", verdict_name(p.verdict)}};
          },
          [](const RevocationPayload& p) {
            return json{{"reason", p.reason},
                        {"revoked_at", p.revoked_at},
                        {"target", p.target}};
          },
      },
      payload);
}

std::map<std::string, std::string> string_map_from_json(
    const json& j, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) {
      throw CanonicalizationError(where + "." + key +
                                  ": values must be strings");
    }
    out[key] = value.get<std::string>();
  }
  return out;
}

std::vector<std::string> string_list_from_json(const json& j,
                                               const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw FormatError(where + ": expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Payload payload_from_json(Kind kind, const json& j) {
  const std::string where = "payload(" + kind_name(kind) + ")";
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  switch (kind) {
    case Kind::Data: {
      check_keys(j, {"byte_count", "content", "label", "license", "location",
                     "name"},
                 where);
      DataPayload p;
      data_fields_from_json(j, p, where);
      return p;
    }
    case Kind::TrainingData: {
      check_keys(j, {"byte_count", "collection_method", "content",
                     "intended_role", "label", "license", "location", "name"},
                 where);
      TrainingDataPayload p;
      data_fields_from_json(j, p, where);
      p.collection_method = require_string(j, "collection_method", where);
      auto role = training_role_from_name(
          require_string(j, "intended_role", where));
      if (!role) throw FormatError(where + ": unknown intended_role");
      p.intended_role = *role;
      return p;
    }
    case Kind::DataPack: {
      check_keys(j, {"members"}, where);
      if (!j.contains("members") || !j["members"].is_array()) {
        throw FormatError(where + ": missing members array");
      }
      DataPackPayload p;
      for (const auto& m : j["members"]) {
        PackMember member;
        member.name = require_string(m, "name", where + ".members");
        member.ref = require_string(m, "ref", where + ".members");
        check_keys(m, {"name", "ref"}, where + ".members");
        p.members.push_back(std::move(member));
      }
      return p;
    }
    case Kind::Code: {
      check_keys(j, {"code_role", "content", "license", "location", "name",
                     "sbom_ref"},
                 where);
      CodePayload p;
      auto role = code_role_from_name(require_string(j, "code_role", where));
      if (!role) throw FormatError(where + ": unknown code_role");
      p.code_role = *role;
      if (!j.contains("content")) throw FormatError(where + ": missing content");
      p.content = merkle_from_json(j["content"], where + ".content");
      if (j.contains("license")) {
        p.license = license_from_json(j["license"], where + ".license");
      }
      p.location = require_string(j, "location", where);
      p.name = require_string(j, "name", where);
      if (j.contains("sbom_ref")) {
        p.sbom_ref = require_string(j, "sbom_ref", where);
      }
      return p;
    }
    case Kind::Sbom: {
      check_keys(j, {"components", "document_digest", "source_format"}, where);
      SbomPayload p;
      auto fmt =
          sbom_format_from_name(require_string(j, "source_format", where));
      if (!fmt) throw FormatError(where + ": unknown source_format");
      p.source_format = *fmt;
      if (!j.contains("document_digest")) {
        throw FormatError(where + ": missing document_digest");
      }
      p.document_digest =
          digest_from_json(j["document_digest"], where + ".document_digest");
      if (!j.contains("components") || !j["components"].is_array()) {
        throw FormatError(where + ": missing components array");
      }
      for (const auto& c : j["components"]) {
        check_keys(c, {"cpe", "declared_cves", "declared_cwes", "license",
                       "name", "purl", "version"},
                   where + ".components");
        SbomComponent comp;
        comp.name = require_string(c, "name", where + ".components");
        comp.version = require_string(c, "version", where + ".components");
        if (c.contains("purl")) {
          comp.purl = require_string(c, "purl", where + ".components");
        }
        if (c.contains("cpe")) {
          comp.cpe = require_string(c, "cpe", where + ".components");
        }
        if (c.contains("license")) {
          comp.license =
              license_from_json(c["license"], where + ".components.license");
        }
        if (c.contains("declared_cves")) {
          comp.declared_cves =
              string_list_from_json(c["declared_cves"], where + ".components");
        }
        if (c.contains("declared_cwes")) {
          comp.declared_cwes =
              string_list_from_json(c["declared_cwes"], where + ".components");
        }
        p.components.push_back(std::move(comp));
      }
      return p;
    }
    case Kind::Weights: {
      check_keys(j, {"byte_count", "content", "label", "license", "location",
                     "name", "produced_by"},
                 where);
      WeightsPayload p;
      data_fields_from_json(j, p, where);
      p.produced_by = require_string(j, "produced_by", where);
      return p;
    }
    case Kind::Config: {
      check_keys(j, {"hyperparameters", "system_metadata", "weights_ref"},
                 where);
      ConfigPayload p;
      p.weights_ref = require_string(j, "weights_ref", where);
      if (j.contains("hyperparameters")) {
        p.hyperparameters = string_map_from_json(j["hyperparameters"],
                                                 where + ".hyperparameters");
      }
      if (j.contains("system_metadata")) {
        p.system_metadata = string_map_from_json(j["system_metadata"],
                                                 where + ".system_metadata");
      }
      return p;
    }
    case Kind::TrainedSystem: {
      check_keys(j, {"datapack_ref", "label", "training_code_ref"}, where);
      TrainedSystemPayload p;
      p.datapack_ref = require_string(j, "datapack_ref", where);
      p.label = require_string(j, "label", where);
      p.training_code_ref = require_string(j, "training_code_ref", where);
      return p;
    }
    case Kind::InferenceSystem: {
      check_keys(j, {"config_ref", "inferencing_code_ref", "label"}, where);
      InferenceSystemPayload p;
      p.config_ref = require_string(j, "config_ref", where);
      p.inferencing_code_ref =
          require_string(j, "inferencing_code_ref", where);
      p.label = require_string(j, "label", where);
      return p;
    }
    case Kind::ValidationReport: {
      check_keys(j, {"report_digest", "system_ref", "verdict"}, where);
      ValidationReportPayload p;
      p.system_ref = require_string(j, "system_ref", where);
      if (!j.contains("report_digest")) {
        throw FormatError(where + ": missing report_digest");
      }
      p.report_digest =
          digest_from_json(j["report_digest"], where + ".report_digest");
      auto v = verdict_from_name(require_string(j, "verdict", where));
      if (!v) throw FormatError(where + ": unknown verdict");
      p.verdict = *v;
      return p;
    }
    case Kind::Revocation: {
      check_keys(j, {"reason", "revoked_at", "target"}, where);
      RevocationPayload p;
      p.reason = require_string(j, "reason", where);
      p.revoked_at = require_string(j, "revoked_at", where);
      p.target = require_string(j, "target", where);
      return p;
    }
  }
  throw FormatError("unreachable kind");
}

void reject_floats(const json& j, const std::string& where) {
  if (j.is_number_float()) {
    throw FormatError(where + ": floating-point values are not representable");
  }
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      reject_floats(value, where + "." + key);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      reject_floats(j[i], where + "[" + std::to_string(i) + "]");
    }
  }
}

json envelope_signed_json(const Envelope& e) {
  json j;
  j["schema_version"] = e.schema_version;
  j["kind"] = kind_name(e.kind);
  j["payload"] = payload_to_json(e.payload);
  j["version"] = json{{"counter", e.version.counter},
                      {"name", e.version.name},
                      {"semver", e.version.semver}};
  j["issuer"] = digest_to_json(e.issuer);
  j["issued_at"] = e.issued_at;
  return j;
}

}  // namespace

std::string kind_name(Kind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<Kind> kind_from_name(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (name == kKindNames[i]) return static_cast<Kind>(i);
  }
  return std::nullopt;
}

std::string training_role_name(TrainingRole role) {
  switch (role) {
    case TrainingRole::Train: return "train";
    case TrainingRole::Validation: return "validation";
    case TrainingRole::Test: return "test";
    case TrainingRole::Refinement: return "refinement";
  }
  return "train";
}

std::optional<TrainingRole> training_role_from_name(const std::string& name) {
  if (name == "train") return TrainingRole::Train;
  if (name == "validation") return TrainingRole::Validation;
  if (name == "test") return TrainingRole::Test;
  if (name == "refinement") return TrainingRole::Refinement;
  return std::nullopt;
}

std::string code_role_name(CodeRole role) {
  switch (role) {
    case CodeRole::Training: return "training";
    case CodeRole::Inferencing: return "inferencing";
    case CodeRole::Other: return "other";
  }
  return "other";
}

std::optional<CodeRole> code_role_from_name(const std::string& name) {
  if (name == "training") return CodeRole::Training;
  if (name == "inferencing") return CodeRole::Inferencing;
  if (name == "other") return CodeRole::Other;
  return std::nullopt;
}

std::string sbom_format_name(SbomFormat format) {
  switch (format) {
    case SbomFormat::SpdxJson: return "spdx-json";
    case SbomFormat::CycloneDxJson: return "cyclonedx-json";
    case SbomFormat::Native: return "native";
  }
  return "native";
}

std::optional<SbomFormat> sbom_format_from_name(const std::string& name) {
  if (name == "spdx-json") return SbomFormat::SpdxJson;
  if (name == "cyclonedx-json") return SbomFormat::CycloneDxJson;
  if (name == "native") return SbomFormat::Native;
  return std::nullopt;
}

std::string verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Conditional: return "conditional";
  }
  return "fail";
}

std::optional<Verdict> verdict_from_name(const std::string& name) {
  if (name == "pass") return Verdict::Pass;
  if (name == "fail") return Verdict::Fail;
  if (name == "conditional") return Verdict::Conditional;
  return std::nullopt;
}

std::optional<std::array<std::uint64_t, 3>> parse_semver(
    const std::string& text) {
  std::array<std::uint64_t, 3> out{};
  std::size_t pos = 0;
  for (int part = 0; part < 3; ++part) {
    if (pos >= text.size() || !isdigit(static_cast<unsigned char>(text[pos]))) {
      return std::nullopt;
    }
    std::uint64_t value = 0;
    while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + static_cast<std::uint64_t>(text[pos] - '0');
      ++pos;
    }
    out[static_cast<std::size_t>(part)] = value;
    if (part < 2) {
      if (pos >= text.size() || text[pos] != '.') return std::nullopt;
      ++pos;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return out;
}

Kind payload_kind(const Payload& payload) {
  return static_cast<Kind>(payload.index());
}

std::string canonicalize(const Envelope& envelope) {
  try {
    return envelope_signed_json(envelope).dump();
  } catch (const json::type_error& e) {
    throw CanonicalizationError(std::string("non-representable field: ") +
                                e.what());
  }
}

Digest attestation_id_digest(const Envelope& envelope) {
  return hash_bytes(canonicalize(envelope));
}

AttestationId attestation_id(const Envelope& envelope) {
  return attestation_id_digest(envelope).value;
}

nlohmann::json envelope_to_json(const Envelope& envelope) {
  json j = envelope_signed_json(envelope);
  j["signature"] = envelope.signature;
  if (!envelope.annotations.empty()) j["annotations"] = envelope.annotations;
  return j;
}

Envelope envelope_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw FormatError("envelope: expected a JSON object");
  reject_floats(doc, "envelope");
  check_keys(doc,
             {"annotations", "issued_at", "issuer", "kind", "payload",
              "schema_version", "signature", "version"},
             "envelope");
  Envelope e;
  e.schema_version = require_string(doc, "schema_version", "envelope");
  if (e.schema_version != kSchemaVersion) {
    throw FormatError("unsupported schema_version '" + e.schema_version +
                      "' (expected " + std::string(kSchemaVersion) + ")");
  }
  auto kind = kind_from_name(require_string(doc, "kind", "envelope"));
  if (!kind) throw FormatError("envelope: unknown kind");
  e.kind = *kind;
  if (!doc.contains("payload")) throw FormatError("envelope: missing payload");
  e.payload = payload_from_json(e.kind, doc["payload"]);
  if (!doc.contains("version") || !doc["version"].is_object()) {
    throw FormatError("envelope: missing version");
  }
  const json& v = doc["version"];
  check_keys(v, {"counter", "name", "semver"}, "envelope.version");
  e.version.name = require_string(v, "name", "envelope.version");
  e.version.semver = require_string(v, "semver", "envelope.version");
  e.version.counter = require_uint(v, "counter", "envelope.version");
  if (!doc.contains("issuer")) throw FormatError("envelope: missing issuer");
  e.issuer = digest_from_json(doc["issuer"], "envelope.issuer");
  e.issued_at = require_string(doc, "issued_at", "envelope");
  if (doc.contains("signature")) {
    if (!doc["signature"].is_string()) {
      throw FormatError("envelope: signature must be a string");
    }
    e.signature = doc["signature"].get<std::string>();
  }
  if (doc.contains("annotations")) {
    e.annotations =
        string_map_from_json(doc["annotations"], "envelope.annotations");
  }
  return e;
}

Envelope parse_envelope(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("envelope: invalid JSON: ") + e.what());
  }
  return envelope_from_json(doc);
}

std::string serialize_envelope(const Envelope& envelope) {
  return envelope_to_json(envelope).dump(2) + "\n";
}

void sign_envelope(Envelope& envelope, const KeyPair& keypair) {
  envelope.issuer = keypair.fingerprint;
  std::string canonical = canonicalize(envelope);
  auto sig = sign(
      std::span<const std::uint8_t>(
          reinterpret_cast<const std::uint8_t*>(canonical.data()),
          canonical.size()),
      keypair);
  envelope.signature = base64_encode(sig);
}

bool envelope_signature_valid(const Envelope& envelope,
                              std::span<const std::uint8_t> public_bytes,
                              const std::string& scheme) {
  auto sig = base64_decode(envelope.signature);
  if (!sig) return false;
  std::string canonical = canonicalize(envelope);
  return verify_sig(
      std::span<const std::uint8_t>(
          reinterpret_cast<const std::uint8_t*>(canonical.data()),
          canonical.size()),
      *sig, public_bytes, scheme);
}

const MerkleRoot* envelope_content(const Envelope& envelope) {
  switch (envelope.kind) {
    case Kind::Data:
      return &std::get<DataPayload>(envelope.payload).content;
    case Kind::TrainingData:
      return &std::get<TrainingDataPayload>(envelope.payload).content;
    case Kind::Weights:
      return &std::get<WeightsPayload>(envelope.payload).content;
    case Kind::Code:
      return &std::get<CodePayload>(envelope.payload).content;
    default:
      return nullptr;
  }
}

const DataPayload* envelope_data_fields(const Envelope& envelope) {
  switch (envelope.kind) {
    case Kind::Data:
      return &std::get<DataPayload>(envelope.payload);
    case Kind::TrainingData:
      return &std::get<TrainingDataPayload>(envelope.payload);
    case Kind::Weights:
      return &std::get<WeightsPayload>(envelope.payload);
    default:
      return nullptr;
  }
}

std::optional<std::filesystem::path> envelope_artifact_path(
    const Envelope& envelope,
    const std::optional<std::filesystem::path>& base) {
  auto hint = envelope.annotations.find(kLocalPathHint);
  if (hint != envelope.annotations.end() && !hint->second.empty()) {
    std::filesystem::path p(hint->second);
    if (p.is_absolute() || !base) return p;
    return *base / p;
  }
  const std::string* location = nullptr;
  if (const DataPayload* data = envelope_data_fields(envelope)) {
    location = &data->location;
  } else if (envelope.kind == Kind::Code) {
    location = &std::get<CodePayload>(envelope.payload).location;
  }
  if (location && location->rfind("file://", 0) == 0) {
    return std::filesystem::path(location->substr(7));
  }
  return std::nullopt;
}

bool is_valid_uri(const std::string& text) {
  static const std::regex re(R"(^[A-Za-z][A-Za-z0-9+.\-]*:[^\s]*$)");
  return std::regex_match(text, re);
}

bool is_valid_cve_id(const std::string& text) {
  static const std::regex re(R"(^CVE-\d{4}-\d{4,}$)");
  return std::regex_match(text, re);
}

bool is_valid_cwe_id(const std::string& text) {
  static const std::regex re(R"(^CWE-\d+$)");
  return std::regex_match(text, re);
}

bool is_valid_timestamp(const std::string& text) {
  int year, month, day, hour, minute, second;
  char tail;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ%c", &year, &month,
                  &day, &hour, &minute, &second, &tail) != 6) {
    return false;
  }
  if (text.size() != 20) return false;
  return year >= 1970 && month >= 1 && month <= 12 && day >= 1 && day <= 31 &&
         hour >= 0 && hour <= 23 && minute >= 0 && minute <= 59 &&
         second >= 0 && second <= 59;
}

std::string now_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

void check_ref_syntax(const AttestationId& ref, const std::string& field,
                      std::vector<Violation>& out) {
  if (!is_hex64(ref)) {
    out.push_back({field, "reference is not a 64-hex attestation id"});
  }
}

// Kind check only when the reference resolves; missing references are the
// graph layer's concern (MISSING_REF), not a structural violation.
void check_ref_kind(const AttestationId& ref, Kind expected,
                    const std::string& field, const Resolver& resolver,
                    std::vector<Violation>& out) {
  check_ref_syntax(ref, field, out);
  if (!resolver) return;
  auto target = resolver(ref);
  if (!target) return;
  if (target->kind != expected) {
    out.push_back({field, "expected a " + kind_name(expected) +
                              " attestation, found " +
                              kind_name(target->kind)});
  }
}

void check_data_fields(const DataPayload& p, const std::string& prefix,
                       std::vector<Violation>& out) {
  if (!is_valid_uri(p.location)) {
    out.push_back({prefix + "location", "not a syntactically valid URI"});
  }
  if (!p.content.root.well_formed()) {
    out.push_back({prefix + "content.root", "malformed digest"});
  }
  if (p.content.scheme != kMerkleScheme) {
    out.push_back({prefix + "content.scheme", "unknown merkle scheme"});
  }
  if (p.license && p.license->identifier.empty()) {
    out.push_back({prefix + "license.identifier", "must be non-empty"});
  }
}

}  // namespace

std::vector<Violation> validate_payload(const Envelope& envelope,
                                        const Resolver& resolver) {
  std::vector<Violation> out;
  if (envelope.schema_version != kSchemaVersion) {
    out.push_back({"schema_version", "unsupported schema version"});
  }
  if (payload_kind(envelope.payload) != envelope.kind) {
    out.push_back({"payload", "payload type does not match kind " +
                                  kind_name(envelope.kind)});
    return out;  // further checks would visit the wrong alternative
  }
  if (!parse_semver(envelope.version.semver)) {
    out.push_back({"version.semver",
                   "does not parse as MAJOR.MINOR.PATCH integers"});
  }
  if (!envelope.issuer.well_formed()) {
    out.push_back({"issuer", "malformed issuer fingerprint"});
  }
  if (!is_valid_timestamp(envelope.issued_at)) {
    out.push_back({"issued_at", "not an RFC 3339 UTC second-precision time"});
  }

  std::visit(
      Overloaded{
          [&](const TrainingDataPayload& p) {
            check_data_fields(p, "payload.", out);
          },
          [&](const WeightsPayload& p) {
            check_data_fields(p, "payload.", out);
            check_ref_kind(p.produced_by, Kind::TrainedSystem,
                           "payload.produced_by", resolver, out);
          },
          [&](const DataPayload& p) { check_data_fields(p, "payload.", out); },
          [&](const DataPackPayload& p) {
            std::set<std::string> seen;
            for (std::size_t i = 0; i < p.members.size(); ++i) {
              const auto& m = p.members[i];
              std::string field =
                  "payload.members[" + std::to_string(i) + "]";
              if (!seen.insert(m.name).second) {
                out.push_back({field + ".name",
                               "duplicate member name '" + m.name + "'"});
              }
              check_ref_kind(m.ref, Kind::TrainingData, field + ".ref",
                             resolver, out);
            }
          },
          [&](const CodePayload& p) {
            if (!is_valid_uri(p.location)) {
              out.push_back({"payload.location",
                             "not a syntactically valid URI"});
            }
            if (!p.content.root.well_formed()) {
              out.push_back({"payload.content.root", "malformed digest"});
            }
            if (p.license && p.license->identifier.empty()) {
              out.push_back(
                  {"payload.license.identifier", "must be non-empty"});
            }
            if (p.sbom_ref) {
              check_ref_kind(*p.sbom_ref, Kind::Sbom, "payload.sbom_ref",
                             resolver, out);
            }
          },
          [&](const SbomPayload& p) {
            if (!p.document_digest.well_formed()) {
              out.push_back({"payload.document_digest", "malformed digest"});
            }
            for (std::size_t i = 0; i < p.components.size(); ++i) {
              const auto& c = p.components[i];
              std::string field =
                  "payload.components[" + std::to_string(i) + "]";
              for (const auto& cve : c.declared_cves) {
                if (!is_valid_cve_id(cve)) {
                  out.push_back({field + ".declared_cves",
                                 "'" + cve + "' does not match CVE-YYYY-NNNN"});
                }
              }
              for (const auto& cwe : c.declared_cwes) {
                if (!is_valid_cwe_id(cwe)) {
                  out.push_back({field + ".declared_cwes",
                                 "'" + cwe + "' does not match CWE-N"});
                }
              }
              if (c.license && c.license->identifier.empty()) {
                out.push_back(
                    {field + ".license.identifier", "must be non-empty"});
              }
            }
          },
          [&](const ConfigPayload& p) {
            check_ref_kind(p.weights_ref, Kind::Weights, "payload.weights_ref",
                           resolver, out);
          },
          [&](const TrainedSystemPayload& p) {
            check_ref_kind(p.datapack_ref, Kind::DataPack,
                           "payload.datapack_ref", resolver, out);
            check_ref_kind(p.training_code_ref, Kind::Code,
                           "payload.training_code_ref", resolver, out);
            if (resolver) {
              auto code = resolver(p.training_code_ref);
              if (code && code->kind == Kind::Code) {
                const auto& cp = std::get<CodePayload>(code->payload);
                if (cp.code_role != CodeRole::Training) {
                  out.push_back({"payload.training_code_ref",
                                 "referenced code has role '" +
                                     code_role_name(cp.code_role) +
                                     "', expected 'training'"});
                }
              }
            }
          },
          [&](const InferenceSystemPayload& p) {
            check_ref_kind(p.config_ref, Kind::Config, "payload.config_ref",
                           resolver, out);
            check_ref_kind(p.inferencing_code_ref, Kind::Code,
                           "payload.inferencing_code_ref", resolver, out);
            if (resolver) {
              auto code = resolver(p.inferencing_code_ref);
              if (code && code->kind == Kind::Code) {
                const auto& cp = std::get<CodePayload>(code->payload);
                if (cp.code_role != CodeRole::Inferencing) {
                  out.push_back({"payload.inferencing_code_ref",
                                 "referenced code has role '" +
                                     code_role_name(cp.code_role) +
                                     "', expected 'inferencing'"});
                }
              }
            }
          },
          [&](const ValidationReportPayload& p) {
            check_ref_syntax(p.system_ref, "payload.system_ref", out);
            if (!p.report_digest.well_formed()) {
              out.push_back({"payload.report_digest", "malformed digest"});
            }
            if (resolver) {
              auto target = resolver(p.system_ref);
              if (target && target->kind != Kind::TrainedSystem &&
                  target->kind != Kind::InferenceSystem) {
                out.push_back({"payload.system_ref",
                               "expected a trained-system or inference-system "
                               "attestation, found " +
                                   kind_name(target->kind)});
              }
            }
          },
          [&](const RevocationPayload& p) {
            check_ref_syntax(p.target, "payload.target", out);
            if (!is_valid_timestamp(p.revoked_at)) {
              out.push_back({"payload.revoked_at",
                             "not an RFC 3339 UTC second-precision time"});
            }
          },
      },
      envelope.payload);
  return out;
}

}  // namespace taibom

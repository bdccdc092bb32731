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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "taibom/crypto.hpp"
#include "taibom/digest.hpp"
#include "taibom/merkle.hpp"

namespace taibom {

inline constexpr const char* kSchemaVersion = "taibom/1";
inline constexpr const char* kAttestationExtension = ".taibom.json";

enum class Kind {
  Data,
  TrainingData,
  DataPack,
  Code,
  Sbom,
  Weights,
  Config,
  TrainedSystem,
  InferenceSystem,
  ValidationReport,
  Revocation,
};

std::string kind_name(Kind kind);
std::optional<Kind> kind_from_name(const std::string& name);

enum class TrainingRole { Train, Validation, Test, Refinement };
enum class CodeRole { Training, Inferencing, Other };
enum class SbomFormat { SpdxJson, CycloneDxJson, Native };
enum class Verdict { Pass, Fail, Conditional };

std::string training_role_name(TrainingRole role);
std::optional<TrainingRole> training_role_from_name(const std::string& name);
std::string code_role_name(CodeRole role);
std::optional<CodeRole> code_role_from_name(const std::string& name);
std::string sbom_format_name(SbomFormat format);
std::optional<SbomFormat> sbom_format_from_name(const std::string& name);
std::string verdict_name(Verdict verdict);
std::optional<Verdict> verdict_from_name(const std::string& name);

/// Human label plus a machine ordering. The counter is authoritative for
/// newer-than comparisons within one (issuer, name) series.
struct VersionInfo {
  std::string name;
  std::string semver{"1.0.0"};
  std::uint64_t counter{1};

  auto operator<=>(const VersionInfo&) const = default;
};

/// "MAJOR.MINOR.PATCH" with three non-negative integer components.
std::optional<std::array<std::uint64_t, 3>> parse_semver(
    const std::string& text);

struct LicenseInfo {
  std::string identifier;
  std::optional<Digest> text_digest;

  auto operator<=>(const LicenseInfo&) const = default;
};

struct DataPayload {
  std::string name;
  std::string label;
  std::string location;  // URI
  MerkleRoot content;
  std::uint64_t byte_count{0};
  std::optional<LicenseInfo> license;

  auto operator<=>(const DataPayload&) const = default;
};

struct TrainingDataPayload : DataPayload {
  std::string collection_method;
  TrainingRole intended_role{TrainingRole::Train};

  auto operator<=>(const TrainingDataPayload&) const = default;
};

struct PackMember {
  std::string name;
  AttestationId ref;

  auto operator<=>(const PackMember&) const = default;
};

struct DataPackPayload {
  std::vector<PackMember> members;  // ordered

  auto operator<=>(const DataPackPayload&) const = default;
};

struct CodePayload {
  std::string name;
  std::string location;
  MerkleRoot content;
  std::optional<AttestationId> sbom_ref;
  std::optional<LicenseInfo> license;
  CodeRole code_role{CodeRole::Other};

  auto operator<=>(const CodePayload&) const = default;
};

struct SbomComponent {
  std::string name;
  std::string version;
  std::optional<std::string> purl;
  std::optional<std::string> cpe;
  std::optional<LicenseInfo> license;
  std::vector<std::string> declared_cves;
  std::vector<std::string> declared_cwes;

  auto operator<=>(const SbomComponent&) const = default;
};

struct SbomPayload {
  SbomFormat source_format{SbomFormat::Native};
  Digest document_digest;
  std::vector<SbomComponent> components;

  auto operator<=>(const SbomPayload&) const = default;
};

struct WeightsPayload : DataPayload {
  AttestationId produced_by;

  auto operator<=>(const WeightsPayload&) const = default;
};

struct ConfigPayload {
  AttestationId weights_ref;
  std::map<std::string, std::string> hyperparameters;
  std::map<std::string, std::string> system_metadata;

  auto operator<=>(const ConfigPayload&) const = default;
};

struct TrainedSystemPayload {
  std::string label;
  AttestationId datapack_ref;
  AttestationId training_code_ref;

  auto operator<=>(const TrainedSystemPayload&) const = default;
};

struct InferenceSystemPayload {
  std::string label;
  AttestationId config_ref;
  AttestationId inferencing_code_ref;

  auto operator<=>(const InferenceSystemPayload&) const = default;
};

struct ValidationReportPayload {
  AttestationId system_ref;
  Digest report_digest;
  Verdict verdict{Verdict::Pass};

  auto operator<=>(const ValidationReportPayload&) const = default;
};

struct RevocationPayload {
  AttestationId target;
  std::string reason;
  std::string revoked_at;  // RFC 3339 UTC

  auto operator<=>(const RevocationPayload&) const = default;
};

using Payload =
    std::variant<DataPayload, TrainingDataPayload, DataPackPayload,
                 CodePayload, SbomPayload, WeightsPayload, ConfigPayload,
                 TrainedSystemPayload, InferenceSystemPayload,
                 ValidationReportPayload, RevocationPayload>;

/// Kind that a payload alternative belongs to.
Kind payload_kind(const Payload& payload);

/// The universal signed record. Everything except `signature` and
/// `annotations` is covered by the signature and by the attestation id.
struct Envelope {
  std::string schema_version{kSchemaVersion};
  Kind kind{Kind::Data};
  Payload payload;
  VersionInfo version;
  Digest issuer;          // fingerprint of the signing public key
  std::string issued_at;  // RFC 3339 UTC, second precision
  std::string signature;  // base64 detached signature; empty until signed
  std::map<std::string, std::string> annotations;  // unsigned, mutable

  bool operator==(const Envelope& other) const = default;
};

/// Annotation key used by rehash verification to locate artifact bytes.
inline constexpr const char* kLocalPathHint = "local_path_hint";

/// Deterministic signed byte sequence: minified UTF-8 JSON, object keys
/// sorted lexicographically, integers only, signature and annotations
/// excluded. Raises CanonicalizationError for non-representable values.
std::string canonicalize(const Envelope& envelope);

/// Digest of the canonical bytes; the envelope's content-addressed id.
Digest attestation_id_digest(const Envelope& envelope);
AttestationId attestation_id(const Envelope& envelope);

/// Full JSON form including signature and annotations (disk format).
nlohmann::json envelope_to_json(const Envelope& envelope);

/// Parses the disk/JSON form. Rejects unknown schema versions, unknown
/// kinds, floating-point values, and missing required fields.
Envelope envelope_from_json(const nlohmann::json& doc);
Envelope parse_envelope(const std::string& text);

/// Pretty on-disk serialization; signatures are always computed over the
/// canonical form, never this one.
std::string serialize_envelope(const Envelope& envelope);

/// Sets issuer from the keypair and signs the canonical bytes.
void sign_envelope(Envelope& envelope, const KeyPair& keypair);

/// Verifies the envelope's detached signature against a public key.
bool envelope_signature_valid(const Envelope& envelope,
                              std::span<const std::uint8_t> public_bytes,
                              const std::string& scheme);

struct Violation {
  std::string field;
  std::string message;
};

using Resolver = std::function<std::optional<Envelope>(const AttestationId&)>;

/// Every structural and referential invariant violation in one pass.
/// Violations are data, not errors: an empty list means structurally valid.
/// Unresolvable references are not violations here (graph verification
/// reports them as MISSING_REF).
std::vector<Violation> validate_payload(const Envelope& envelope,
                                        const Resolver& resolver);

/// Content tree carried by data / training-data / weights / code payloads;
/// nullptr for the other kinds.
const MerkleRoot* envelope_content(const Envelope& envelope);

/// Data-payload fields shared by data-like kinds (data, training-data,
/// weights); nullptr otherwise.
const DataPayload* envelope_data_fields(const Envelope& envelope);

/// Artifact bytes location for digest rechecks: the unsigned
/// local_path_hint annotation first (relative hints resolve against
/// `base`), then the signed location URI when it is a file: URI.
std::optional<std::filesystem::path> envelope_artifact_path(
    const Envelope& envelope,
    const std::optional<std::filesystem::path>& base);

bool is_valid_uri(const std::string& text);
bool is_valid_cve_id(const std::string& text);
bool is_valid_cwe_id(const std::string& text);
bool is_valid_timestamp(const std::string& text);

/// Current time as RFC 3339 UTC with second precision.
std::string now_utc();

}  // namespace taibom

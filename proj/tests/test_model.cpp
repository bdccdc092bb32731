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

#include <doctest.h>

#include <random>

#include "taibom/errors.hpp"
#include "taibom/model.hpp"
#include "test_support.hpp"

using namespace taibom;
using nlohmann::json;

namespace {

// The pinned canonical encoding of one fixed training-data envelope,
// cross-computed with python json.dumps(sort_keys=True,
// separators=(",", ":")) over the same fields.
constexpr const char* kGoldenCanonical =
    R"({"issued_at":"2026-01-02T03:04:05Z","issuer":{"algorithm":"sha-256","value":"abababababababababababababababababababababababababababababababab"},"kind":"training-data","payload":{"byte_count":12,"collection_method":"manual curation","content":{"chunk_size":4096,"leaf_count":1,"root":{"algorithm":"sha-256","value":"03881828921010a03cbf0f5a6f78ac385bdddeeba12e466c49093b9fc81c0d4c"},"scheme":"taibom-merkle/1"},"intended_role":"train","label":"unit-fixture","license":{"identifier":"CC-BY-4.0"},"location":"file:///tmp/corpus-a","name":"corpus-a"},"schema_version":"taibom/1","version":{"counter":1,"name":"corpus-a","semver":"1.0.0"}})";

constexpr const char* kGoldenId =
    "97a648de2791f5597006314ea302af963949c8d8e9ea1c578599808eb3b0b71e";

Envelope golden_envelope() {
  TrainingDataPayload p;
  p.name = "corpus-a";
  p.label = "unit-fixture";
  p.location = "file:///tmp/corpus-a";
  p.content.chunk_size = 4096;
  p.content.leaf_count = 1;
  p.content.root = Digest{
      kSha256,
      "03881828921010a03cbf0f5a6f78ac385bdddeeba12e466c49093b9fc81c0d4c"};
  p.byte_count = 12;
  p.license = LicenseInfo{"CC-BY-4.0", std::nullopt};
  p.collection_method = "manual curation";
  p.intended_role = TrainingRole::Train;

  Envelope e;
  e.kind = Kind::TrainingData;
  e.payload = std::move(p);
  e.version = VersionInfo{"corpus-a", "1.0.0", 1};
  e.issuer = Digest{kSha256, std::string(64, 'b')};
  for (std::size_t i = 0; i < 64; i += 2) e.issuer.value[i] = 'a';
  e.issued_at = "2026-01-02T03:04:05Z";
  return e;
}

}  // namespace

TEST_CASE("canonical encoding is pinned") {
  Envelope e = golden_envelope();
  CHECK(canonicalize(e) == kGoldenCanonical);
  CHECK(attestation_id(e) == kGoldenId);
  // the id is, definitionally, the module's own hash of the canonical bytes
  CHECK(attestation_id(e) == hash_bytes(canonicalize(e)).value);
}

TEST_CASE("canonicalization ignores field construction order") {
  // same fields, scrambled JSON order
  std::string a = R"({
    "kind": "config",
    "schema_version": "taibom/1",
    "issued_at": "2026-01-02T03:04:05Z",
    "version": {"semver": "1.0.0", "counter": 3, "name": "cfg"},
    "payload": {"weights_ref": ")" +
                  std::string(64, 'e') +
                  R"(", "system_metadata": {}, "hyperparameters": {"lr": "0.1", "batch": "32"}},
    "issuer": {"value": ")" +
                  std::string(64, 'd') + R"(", "algorithm": "sha-256"}
  })";
  std::string b = R"({
    "issuer": {"algorithm": "sha-256", "value": ")" +
                  std::string(64, 'd') + R"("},
    "payload": {"hyperparameters": {"batch": "32", "lr": "0.1"}, "weights_ref": ")" +
                  std::string(64, 'e') +
                  R"(", "system_metadata": {}},
    "schema_version": "taibom/1",
    "issued_at": "2026-01-02T03:04:05Z",
    "kind": "config",
    "version": {"counter": 3, "name": "cfg", "semver": "1.0.0"}
  })";
  CHECK(canonicalize(parse_envelope(a)) == canonicalize(parse_envelope(b)));
  CHECK(parse_envelope(a) == parse_envelope(b));
}

TEST_CASE("canonicalization is a fixed point under parse") {
  Envelope e = golden_envelope();
  std::string canonical = canonicalize(e);
  CHECK(canonicalize(parse_envelope(canonical)) == canonical);
}

TEST_CASE("signed fields are injective into canonical bytes") {
  Envelope e1 = golden_envelope();
  Envelope e2 = golden_envelope();
  e2.version.counter = 2;
  CHECK(canonicalize(e1) != canonicalize(e2));
  CHECK(attestation_id(e1) != attestation_id(e2));
}

TEST_CASE("annotations and signature never affect the id") {
  Envelope bare = golden_envelope();
  Envelope annotated = golden_envelope();
  annotated.annotations["local_path_hint"] = "/somewhere/on/disk";
  annotated.annotations["last_access_time"] = "2026-08-08T00:00:00Z";
  annotated.signature = "c2lnbmF0dXJl";
  CHECK(attestation_id(bare) == attestation_id(annotated));
  CHECK(canonicalize(bare) == canonicalize(annotated));
}

TEST_CASE("one payload byte change changes the id") {
  Envelope e1 = golden_envelope();
  Envelope e2 = golden_envelope();
  auto& p = std::get<TrainingDataPayload>(e2.payload);
  p.name = "corpus-b";  // one byte differs
  CHECK(attestation_id(e1) != attestation_id(e2));
}

TEST_CASE("serialize/parse round trip on 1000 random envelopes") {
  std::mt19937 rng(123456);
  for (int i = 0; i < 1000; ++i) {
    Envelope e = test::random_envelope(rng);
    CAPTURE(i);
    Envelope back = parse_envelope(serialize_envelope(e));
    REQUIRE(back == e);
    REQUIRE(canonicalize(back) == canonicalize(e));
  }
}

TEST_CASE("signing binds issuer and survives round trip") {
  KeyPair kp = keygen();
  Envelope e = golden_envelope();
  sign_envelope(e, kp);
  CHECK(e.issuer == kp.fingerprint);
  CHECK(envelope_signature_valid(e, kp.public_bytes, kp.scheme));

  Envelope back = parse_envelope(serialize_envelope(e));
  CHECK(envelope_signature_valid(back, kp.public_bytes, kp.scheme));

  KeyPair other = keygen();
  CHECK(!envelope_signature_valid(e, other.public_bytes, other.scheme));

  // any signed-field mutation invalidates
  Envelope tampered = e;
  std::get<TrainingDataPayload>(tampered.payload).byte_count += 1;
  CHECK(!envelope_signature_valid(tampered, kp.public_bytes, kp.scheme));
}

TEST_CASE("non-representable values raise CanonicalizationError") {
  Envelope e = golden_envelope();
  std::get<TrainingDataPayload>(e.payload).name = std::string("\xff\xfe bad");
  CHECK_THROWS_AS(canonicalize(e), CanonicalizationError);
}

TEST_CASE("parse rejections") {
  Envelope e = golden_envelope();
  json doc = envelope_to_json(e);

  SUBCASE("unknown schema version") {
    doc["schema_version"] = "taibom/2";
    CHECK_THROWS_AS(envelope_from_json(doc), FormatError);
  }
  SUBCASE("unknown kind") {
    doc["kind"] = "mystery";
    CHECK_THROWS_AS(envelope_from_json(doc), FormatError);
  }
  SUBCASE("floating point anywhere") {
    doc["payload"]["byte_count"] = 1.5;
    CHECK_THROWS_AS(envelope_from_json(doc), FormatError);
  }
  SUBCASE("unknown top-level field") {
    doc["extra"] = "surprise";
    CHECK_THROWS_AS(envelope_from_json(doc), FormatError);
  }
  SUBCASE("unknown payload field") {
    doc["payload"]["surprise"] = 1;
    CHECK_THROWS_AS(envelope_from_json(doc), FormatError);
  }
  SUBCASE("negative counter") {
    doc["version"]["counter"] = -1;
    CHECK_THROWS_AS(envelope_from_json(doc), FormatError);
  }
  SUBCASE("non-string hyperparameter value") {
    json cfg = R"({
      "schema_version": "taibom/1", "kind": "config",
      "payload": {"weights_ref": "", "hyperparameters": {"lr": 5},
                  "system_metadata": {}},
      "version": {"counter": 1, "name": "c", "semver": "1.0.0"},
      "issuer": {"algorithm": "sha-256", "value": ""},
      "issued_at": "2026-01-01T00:00:00Z"})"_json;
    CHECK_THROWS_AS(envelope_from_json(cfg), CanonicalizationError);
  }
  SUBCASE("invalid JSON text") {
    CHECK_THROWS_AS(parse_envelope("{not json"), FormatError);
  }
}

TEST_CASE("validate_payload") {
  // tiny in-memory resolver
  std::map<AttestationId, Envelope> objects;
  Resolver resolver = [&](const AttestationId& id) -> std::optional<Envelope> {
    auto it = objects.find(id);
    if (it == objects.end()) return std::nullopt;
    return it->second;
  };
  auto remember = [&](Envelope env) {
    AttestationId id = attestation_id(env);
    objects[id] = std::move(env);
    return id;
  };

  Envelope dataset = golden_envelope();
  AttestationId dataset_id = remember(dataset);

  Envelope code;
  code.kind = Kind::Code;
  CodePayload cp;
  cp.name = "train";
  cp.location = "file:///code/train.py";
  cp.content = std::get<TrainingDataPayload>(dataset.payload).content;
  cp.code_role = CodeRole::Training;
  code.payload = cp;
  code.version = VersionInfo{"train", "1.0.0", 1};
  code.issuer = dataset.issuer;
  code.issued_at = dataset.issued_at;
  AttestationId code_id = remember(code);

  Envelope pack;
  pack.kind = Kind::DataPack;
  pack.payload = DataPackPayload{{PackMember{"split-a", dataset_id}}};
  pack.version = VersionInfo{"pack", "1.0.0", 1};
  pack.issuer = dataset.issuer;
  pack.issued_at = dataset.issued_at;
  AttestationId pack_id = remember(pack);

  SUBCASE("well-formed envelopes validate clean") {
    CHECK(validate_payload(dataset, resolver).empty());
    CHECK(validate_payload(code, resolver).empty());
    CHECK(validate_payload(pack, resolver).empty());
  }

  SUBCASE("wrong referenced kind is a named violation") {
    Envelope trained;
    trained.kind = Kind::TrainedSystem;
    trained.payload = TrainedSystemPayload{"model", code_id, code_id};
    trained.version = VersionInfo{"model", "1.0.0", 1};
    trained.issuer = dataset.issuer;
    trained.issued_at = dataset.issued_at;
    auto violations = validate_payload(trained, resolver);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].field == "payload.datapack_ref");
    CHECK(violations[0].message.find("data-pack") != std::string::npos);
  }

  SUBCASE("duplicate pack member names") {
    Envelope dup = pack;
    std::get<DataPackPayload>(dup.payload)
        .members.push_back(PackMember{"split-a", dataset_id});
    auto violations = validate_payload(dup, resolver);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].field == "payload.members[1].name");
    CHECK(violations[0].message.find("duplicate") != std::string::npos);
  }

  SUBCASE("well-formed inference-system referencing config and code") {
    Envelope weights;
    weights.kind = Kind::Weights;
    WeightsPayload wp;
    wp.name = "w";
    wp.label = "weights";
    wp.location = "file:///w.bin";
    wp.content = cp.content;
    wp.produced_by = std::string(64, '1');
    weights.payload = wp;
    weights.version = VersionInfo{"w", "1.0.0", 1};
    weights.issuer = dataset.issuer;
    weights.issued_at = dataset.issued_at;
    AttestationId weights_id = remember(weights);

    Envelope config;
    config.kind = Kind::Config;
    config.payload = ConfigPayload{weights_id, {{"lr", "0.1"}}, {}};
    config.version = VersionInfo{"cfg", "1.0.0", 1};
    config.issuer = dataset.issuer;
    config.issued_at = dataset.issued_at;
    AttestationId config_id = remember(config);

    Envelope icode = code;
    std::get<CodePayload>(icode.payload).code_role = CodeRole::Inferencing;
    std::get<CodePayload>(icode.payload).name = "infer";
    AttestationId icode_id = remember(icode);

    Envelope inference;
    inference.kind = Kind::InferenceSystem;
    inference.payload = InferenceSystemPayload{"svc", config_id, icode_id};
    inference.version = VersionInfo{"svc", "1.0.0", 1};
    inference.issuer = dataset.issuer;
    inference.issued_at = dataset.issued_at;
    CHECK(validate_payload(inference, resolver).empty());

    // wrong code role on the inferencing edge
    Envelope wrong = inference;
    std::get<InferenceSystemPayload>(wrong.payload).inferencing_code_ref =
        code_id;
    auto violations = validate_payload(wrong, resolver);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].field == "payload.inferencing_code_ref");
  }

  SUBCASE("single-field mutations produce exactly the expected violation") {
    struct Case {
      const char* field;
      std::function<void(Envelope&)> mutate;
    };
    std::vector<Case> cases = {
        {"version.semver",
         [](Envelope& e) { e.version.semver = "1.0"; }},
        {"version.semver",
         [](Envelope& e) { e.version.semver = "a.b.c"; }},
        {"issuer", [](Envelope& e) { e.issuer.value = "zz"; }},
        {"issued_at",
         [](Envelope& e) { e.issued_at = "yesterday at noon"; }},
        {"issued_at",
         [](Envelope& e) { e.issued_at = "2026-13-02T03:04:05Z"; }},
        {"payload.location",
         [](Envelope& e) {
           std::get<TrainingDataPayload>(e.payload).location = "no uri here";
         }},
        {"payload.content.root",
         [](Envelope& e) {
           std::get<TrainingDataPayload>(e.payload).content.root.value =
               "tooshort";
         }},
        {"payload.license.identifier",
         [](Envelope& e) {
           std::get<TrainingDataPayload>(e.payload).license =
               LicenseInfo{"", std::nullopt};
         }},
    };
    for (std::size_t i = 0; i < cases.size(); ++i) {
      CAPTURE(i);
      Envelope mutated = golden_envelope();
      cases[i].mutate(mutated);
      auto violations = validate_payload(mutated, resolver);
      REQUIRE(violations.size() == 1);
      CHECK(violations[0].field == cases[i].field);
    }
  }

  SUBCASE("sbom component id syntax") {
    Envelope sbom;
    sbom.kind = Kind::Sbom;
    SbomPayload sp;
    sp.source_format = SbomFormat::SpdxJson;
    sp.document_digest = Digest{kSha256, std::string(64, '2')};
    SbomComponent comp;
    comp.name = "libfoo";
    comp.version = "1.0.0";
    comp.declared_cves = {"CVE-2021-44228", "WRONG-1"};
    comp.declared_cwes = {"CWE-79", "CWE-"};
    sp.components.push_back(comp);
    sbom.payload = sp;
    sbom.version = VersionInfo{"sbom", "1.0.0", 1};
    sbom.issuer = Digest{kSha256, std::string(64, '3')};
    sbom.issued_at = "2026-01-01T00:00:00Z";
    auto violations = validate_payload(sbom, resolver);
    REQUIRE(violations.size() == 2);
    CHECK(violations[0].field == "payload.components[0].declared_cves");
    CHECK(violations[1].field == "payload.components[0].declared_cwes");
  }

  SUBCASE("kind/payload mismatch") {
    Envelope wrong = golden_envelope();
    wrong.kind = Kind::Config;
    auto violations = validate_payload(wrong, resolver);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].field == "payload");
  }

  SUBCASE("revocation target syntax") {
    Envelope rev;
    rev.kind = Kind::Revocation;
    rev.payload = RevocationPayload{"not-an-id", "compromised",
                                    "2026-01-01T00:00:00Z"};
    rev.version = VersionInfo{"r", "1.0.0", 1};
    rev.issuer = Digest{kSha256, std::string(64, '4')};
    rev.issued_at = "2026-01-01T00:00:00Z";
    auto violations = validate_payload(rev, resolver);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].field == "payload.target");
  }
}

TEST_CASE("semver parsing") {
  CHECK(parse_semver("1.2.3") == std::array<std::uint64_t, 3>{1, 2, 3});
  CHECK(parse_semver("0.0.0") == std::array<std::uint64_t, 3>{0, 0, 0});
  CHECK(parse_semver("10.200.3000") ==
        std::array<std::uint64_t, 3>{10, 200, 3000});
  CHECK(!parse_semver("1.2"));
  CHECK(!parse_semver("1.2.3.4"));
  CHECK(!parse_semver("1.2.3-rc1"));
  CHECK(!parse_semver("v1.2.3"));
  CHECK(!parse_semver(""));
}

TEST_CASE("timestamp and id syntax helpers") {
  CHECK(is_valid_timestamp("2026-08-08T12:00:00Z"));
  CHECK(!is_valid_timestamp("2026-08-08 12:00:00"));
  CHECK(!is_valid_timestamp("2026-08-08T12:00:00.123Z"));
  CHECK(!is_valid_timestamp("2026-00-08T12:00:00Z"));
  CHECK(is_valid_cve_id("CVE-2021-44228"));
  CHECK(is_valid_cve_id("CVE-2024-123456"));
  CHECK(!is_valid_cve_id("CVE-21-44228"));
  CHECK(!is_valid_cve_id("cve-2021-44228"));
  CHECK(is_valid_cwe_id("CWE-79"));
  CHECK(!is_valid_cwe_id("CWE-"));
  CHECK(is_valid_uri("file:///data/corpus"));
  CHECK(is_valid_uri("https://example.org/x?y=1"));
  CHECK(!is_valid_uri("not a uri"));
  CHECK(!is_valid_uri("/just/a/path"));
}

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
//
// Scenario acceptance suite. One line per criterion:
//
//   PASS  <n>. <name>
//   FAIL  <n>. <name>: <reason>
//
// The process exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "taibom/audit.hpp"
#include "taibom/errors.hpp"
#include "taibom/graph.hpp"
#include "taibom/sbom.hpp"
#include "taibom/workflow.hpp"
#include "test_support.hpp"

using namespace taibom;
using namespace taibom::test;
namespace fs = std::filesystem;
using nlohmann::json;

#ifndef TAIBOM_SOURCE_DIR
#define TAIBOM_SOURCE_DIR "."
#endif

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name,
               const std::function<void()>& body) {
  try {
    body();
    std::printf("PASS  %d. %s\n", number, name.c_str());
  } catch (const std::exception& e) {
    std::printf("FAIL  %d. %s: %s\n", number, name.c_str(), e.what());
    ++g_failures;
  }
  std::fflush(stdout);
}

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

Envelope canon_probe_envelope() {
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
  Envelope e;
  e.kind = Kind::TrainingData;
  e.payload = std::move(p);
  e.version = VersionInfo{"corpus-a", "1.0.0", 1};
  std::string issuer;
  for (int i = 0; i < 32; ++i) issuer += "ab";
  e.issuer = Digest{kSha256, issuer};
  e.issued_at = "2026-01-02T03:04:05Z";
  return e;
}

// UC1 -------------------------------------------------------------------

void criterion_uc1() {
  TempDir tmp;
  Store store(tmp.path() / "store");
  ChainFixture fx = build_chain_fixture(store, tmp.path() / "artifacts");

  // trace through the CLI, the operational surface for UC1
  auto traced = run_cli({"trace", fx.inference},
                        {{"TAIBOM_STORE", (tmp.path() / "store").string()}});
  require(traced.exit_code == 0, "trace exited " +
                                     std::to_string(traced.exit_code));
  json lineage = json::parse(traced.out);
  require(lineage.at("datasets").size() == 2,
          "trace must list both training datasets");
  for (const auto& d : lineage.at("datasets")) {
    require(is_hex64(d.at("digest").get<std::string>()),
            "dataset entry lacks a digest");
    require(!d.at("license").get<std::string>().empty(),
            "dataset entry lacks a license id");
    require(is_valid_timestamp(d.at("issued_at").get<std::string>()),
            "dataset entry lacks a signed timestamp");
    require(d.at("counter").get<std::uint64_t>() >= 1 &&
                !d.at("version").get<std::string>().empty(),
            "dataset entry lacks version information");
  }

  // deleting any of these fields from the envelope must break parse,
  // structural validation, or the signature
  auto key = store.trusted_key(fx.key.fingerprint.value);
  json doc = envelope_to_json(*store.get(fx.dataset_a));
  std::vector<std::function<void(json&)>> deletions = {
      [](json& d) { d["payload"].erase("content"); },    // digest
      [](json& d) { d["payload"].erase("license"); },    // license id
      [](json& d) { d.erase("issued_at"); },             // timestamp
      [](json& d) { d.erase("version"); },               // version
      [](json& d) { d["version"].erase("counter"); },
  };
  for (std::size_t i = 0; i < deletions.size(); ++i) {
    json mutated = doc;
    deletions[i](mutated);
    bool detected = false;
    try {
      Envelope e = envelope_from_json(mutated);
      detected = !validate_payload(e, nullptr).empty() ||
                 !envelope_signature_valid(e, key->public_bytes, key->scheme);
    } catch (const Error&) {
      detected = true;  // refuses to even parse
    }
    require(detected,
            "field deletion #" + std::to_string(i) + " went undetected");
  }
}

// UC2 -------------------------------------------------------------------

void copy_tree(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  fs::copy(from, to,
           fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

void criterion_uc2() {
  TempDir tmp;
  std::string store_path = (tmp.path() / "store").string();
  Store store(store_path);
  KeyPair key = keygen();
  store.add_trusted_key(key.public_bytes, key.scheme);
  std::map<std::string, std::string> env{{"TAIBOM_STORE", store_path}};

  // a 100-file dataset, version 1
  fs::path v1_dir = tmp.path() / "bigset-v1";
  for (int i = 0; i < 100; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "f-%03d.txt", i);
    write_file(v1_dir / name, "row content " + std::to_string(i) + "\n");
  }
  fs::path other_dir = tmp.path() / "other";
  write_file(other_dir / "x.txt", "unrelated member\n");

  AttestationId bigset_v1 =
      attest_data_path(v1_dir, "bigset", "text", "CC0-1.0",
                       TrainingRole::Train, "", store, key);
  AttestationId other = attest_data_path(
      other_dir, "other", "text", "CC0-1.0", TrainingRole::Train, "", store,
      key);
  AttestationId pack_v1 =
      attest_pack({bigset_v1, other}, "audit-pack", store, key);

  // version 2: one byte flipped in one of the 100 files
  fs::path v2_dir = tmp.path() / "bigset-v2";
  copy_tree(v1_dir, v2_dir);
  flip_byte(v2_dir / "f-042.txt", 4);
  AttestationId bigset_v2 =
      attest_data_path(v2_dir, "bigset", "text", "CC0-1.0",
                       TrainingRole::Train, "", store, key);
  AttestationId pack_v2 =
      attest_pack({bigset_v2, other}, "audit-pack", store, key);

  // diff reports exactly one modified member
  auto diff_result = run_cli({"--json", "diff", pack_v1, pack_v2}, env);
  require(diff_result.exit_code == 0, "diff exited nonzero");
  json diff = json::parse(diff_result.out);
  require(diff.at("modified").size() == 1, "diff must report one modification");
  require(diff.at("modified")[0].at("name") == "bigset",
          "diff named the wrong member");
  require(diff.at("added").empty() && diff.at("removed").empty(),
          "diff reported spurious adds/removes");
  require(diff.at("unchanged_count") == 1, "unchanged count wrong");

  // now silently corrupt the v2 artifact after signing: one byte in one file
  flip_byte(v2_dir / "f-077.txt", 0);

  auto series_result = run_cli(
      {"--json", "series", key.fingerprint.value, "bigset"}, env);
  require(series_result.exit_code == 1,
          "series must exit 1 on a failing version");
  json series = json::parse(series_result.out);
  require(series.size() == 2, "series must list both versions");
  require(series[0].at("status") == "PASS", "v1 must still pass");
  require(series[1].at("status") == "FAIL_DIGEST", "v2 must fail digest");

  auto verify_result = run_cli({"--json", "verify", pack_v2, "--rehash",
                                tmp.path().string()},
                               env);
  require(verify_result.exit_code == 1, "verify --rehash must exit 1");
  json report = json::parse(verify_result.out);
  int failing = 0;
  for (const auto& node : report.at("nodes")) {
    if (node.at("status") != "PASS") {
      ++failing;
      require(node.at("id") == bigset_v2,
              "the failing node must be the tampered dataset");
      require(node.at("status") == "FAIL_DIGEST", "status must be FAIL_DIGEST");
    }
  }
  require(failing == 1, "exactly one node must fail");
}

// UC3 -------------------------------------------------------------------

void criterion_uc3() {
  TempDir tmp;
  Store store(tmp.path() / "store");
  ChainFixture fx = build_chain_fixture(store, tmp.path() / "artifacts");

  struct ArtifactCase {
    const char* what;
    fs::path path;
    AttestationId owner;
  };
  // exhaustive over every artifact in the fixture
  std::vector<ArtifactCase> artifact_cases = {
      {"training data file", fx.dataset_a_path / "part-0.txt", fx.dataset_a},
      {"validation data file", fx.dataset_b_path / "shard/0.bin",
       fx.dataset_b},
      {"training code file", fx.training_code_path, fx.training_code},
      {"weights file", fx.weights_path, fx.weights},
      {"inferencing code file", fx.inferencing_code_path,
       fx.inferencing_code},
  };
  for (const auto& c : artifact_cases) {
    std::string original = read_file(c.path);
    flip_byte(c.path, 1);
    VerificationReport report =
        verify_chain(fx.inference, store, tmp.path() / "artifacts");
    require(!report.pass, std::string(c.what) + ": verdict must fail");
    int failing = 0;
    for (const auto& n : report.nodes) {
      if (n.state != NodeState::Pass) {
        ++failing;
        require(n.id == c.owner,
                std::string(c.what) + ": wrong node flagged");
        require(n.state == NodeState::FailDigest,
                std::string(c.what) + ": status must be FAIL_DIGEST");
      }
    }
    require(failing == 1,
            std::string(c.what) + ": exactly one node must fail, saw " +
                std::to_string(failing));
    write_file(c.path, original);
    require(verify_chain(fx.inference, store, tmp.path() / "artifacts").pass,
            std::string(c.what) + ": restore must verify clean again");
  }

  // config payload byte flipped inside the store object itself
  fs::path config_file = tmp.path() / "store" / "objects" /
                         fx.config.substr(0, 2) /
                         (fx.config + ".taibom.json");
  std::string stored = read_file(config_file);
  auto pos = stored.find("\"lr\"");
  require(pos != std::string::npos, "config object must carry lr");
  std::string mutated = stored;
  mutated[pos + 1] = 'x';
  write_file(config_file, mutated);
  VerificationReport report =
      verify_chain(fx.inference, store, tmp.path() / "artifacts");
  require(!report.pass, "store mutation: verdict must fail");
  int failing = 0;
  for (const auto& n : report.nodes) {
    if (n.state != NodeState::Pass) {
      ++failing;
      require(n.id == fx.config, "store mutation: wrong node flagged");
      require(n.state == NodeState::FailDigest,
              "store mutation: must surface the digest mismatch");
      require(n.detail.find("do not hash") != std::string::npos,
              "store mutation: detail must name the id self-check");
    }
  }
  require(failing == 1, "store mutation: exactly one node must fail");
}

// UC4 -------------------------------------------------------------------

void criterion_uc4() {
  TempDir tmp;
  std::string store_path = (tmp.path() / "store").string();
  Store store(store_path);
  KeyPair key = keygen();
  store.add_trusted_key(key.public_bytes, key.scheme);
  std::map<std::string, std::string> env{{"TAIBOM_STORE", store_path}};

  // three code packages with their own sboms, two trained systems,
  // two inference systems sharing one inferencing code
  auto spdx = [](const char* name, const char* pkg, const char* version) {
    return json{{"name", name},
                {"packages", json::array({json{{"name", pkg},
                                               {"versionInfo", version}}})}}
        .dump();
  };
  AttestationId sbom1 = ingest_spdx(spdx("s1", "libalpha", "1.2.0"), store, key);
  AttestationId sbom2 = ingest_spdx(spdx("s2", "libbeta", "2.0.0"), store, key);
  AttestationId sbom3 = ingest_spdx(spdx("s3", "libgamma", "0.9.1"), store, key);

  write_file(tmp.path() / "t1.py", "train 1");
  write_file(tmp.path() / "t2.py", "train 2");
  write_file(tmp.path() / "i.py", "infer");
  AttestationId tcode1 = attest_code_path(tmp.path() / "t1.py", "tcode1",
                                          CodeRole::Training, sbom1, "", store,
                                          key);
  AttestationId tcode2 = attest_code_path(tmp.path() / "t2.py", "tcode2",
                                          CodeRole::Training, sbom2, "", store,
                                          key);
  AttestationId icode = attest_code_path(tmp.path() / "i.py", "icode",
                                         CodeRole::Inferencing, sbom3, "",
                                         store, key);

  write_file(tmp.path() / "ds" / "rows.txt", "rows");
  AttestationId ds = attest_data_path(tmp.path() / "ds", "ds", "", "",
                                      TrainingRole::Train, "", store, key);
  AttestationId pack = attest_pack({ds}, "pack", store, key);

  std::vector<AttestationId> trained, weights, configs, inferences;
  for (int i = 0; i < 2; ++i) {
    trained.push_back(attest_trained_system(
        pack, i == 0 ? tcode1 : tcode2, "model",
        "trained" + std::to_string(i), store, key));
    fs::path w = tmp.path() / ("w" + std::to_string(i) + ".bin");
    write_file(w, "weights " + std::to_string(i));
    auto wc = attest_weights_and_config(w, trained[i], {}, {}, store, key,
                                        "weights" + std::to_string(i));
    weights.push_back(wc.weights);
    configs.push_back(wc.config);
    inferences.push_back(attest_inference_system(
        wc.config, icode, "svc", "inference" + std::to_string(i), store, key));
  }

  json feed = json::array(
      {json{{"cve_id", "CVE-2040-0001"},
            {"affected", {json{{"package_name", "libalpha"},
                               {"version_range", ">=1.0.0 <2.0.0"}}}}},
       json{{"cve_id", "CVE-2040-0002"},
            {"affected", {json{{"package_name", "libbeta"},
                               {"version_range", "=2.0.0"}}}}},
       json{{"cve_id", "CVE-2040-0003"},
            {"affected", {json{{"package_name", "libgamma"},
                               {"version_range", "*"}}}}},
       json{{"cve_id", "CVE-2040-0004"},
            {"affected", {json{{"package_name", "libnothing"},
                               {"version_range", "*"}}}}}});
  write_file(tmp.path() / "feed.json", feed.dump());
  auto ingest = run_cli(
      {"cve", "ingest", (tmp.path() / "feed.json").string()}, env);
  require(ingest.exit_code == 0, "feed ingest failed");

  for (const auto& record : store.vulns()) {
    auto impact_result =
        run_cli({"--json", "cve", "impact", record.cve_id}, env);
    require(impact_result.exit_code == 0, record.cve_id + ": impact failed");
    json doc = json::parse(impact_result.out);

    std::set<AttestationId> actual;
    for (const auto& s : doc.at("affected_systems")) {
      actual.insert(s.at("id").get<std::string>());
    }
    // brute-force oracle over the raw stored JSON
    std::set<AttestationId> expected;
    for (const auto& c : doc.at("affected_code")) {
      for (const auto& id : raw_lifecycle_dependents(
               tmp.path() / "store", c.get<std::string>())) {
        auto env_obj = store.get(id);
        if (env_obj && (env_obj->kind == Kind::TrainedSystem ||
                        env_obj->kind == Kind::InferenceSystem ||
                        env_obj->kind == Kind::Weights ||
                        env_obj->kind == Kind::Config)) {
          expected.insert(id);
        }
      }
    }
    require(actual == expected,
            record.cve_id + ": affected set differs from the oracle");
  }

  // spot-check the shape of the answers
  auto impact1 = json::parse(
      run_cli({"--json", "cve", "impact", "CVE-2040-0001"}, env).out);
  std::set<AttestationId> chain1{trained[0], weights[0], configs[0],
                                 inferences[0]};
  std::set<AttestationId> got1;
  for (const auto& s : impact1.at("affected_systems")) {
    got1.insert(s.at("id").get<std::string>());
  }
  require(got1 == chain1, "training CVE must hit exactly its derived chain");

  auto impact3 = json::parse(
      run_cli({"--json", "cve", "impact", "CVE-2040-0003"}, env).out);
  std::set<AttestationId> both{inferences[0], inferences[1]};
  std::set<AttestationId> got3;
  for (const auto& s : impact3.at("affected_systems")) {
    got3.insert(s.at("id").get<std::string>());
  }
  require(got3 == both,
          "inferencing CVE must hit exactly the inference systems");

  auto impact4 = json::parse(
      run_cli({"--json", "cve", "impact", "CVE-2040-0004"}, env).out);
  require(impact4.at("affected_systems").empty() &&
              impact4.at("matched_components").empty(),
          "unmatched CVE must have empty impact");
}

// Sampled signing ---------------------------------------------------------

void criterion_sampling() {
  // empirical: n=20 leaves, s=5 samples, one corrupted leaf, 10000 seeds
  const std::uint64_t corrupted = 13;
  int detected = 0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    auto idx = sample_indices(static_cast<std::uint64_t>(seed), 20,
                              Fraction{1, 4});
    if (idx.size() != 5) throw std::runtime_error("sample size must be 5");
    if (std::find(idx.begin(), idx.end(), corrupted) != idx.end()) ++detected;
  }
  double rate = static_cast<double>(detected) / trials;
  require(rate >= 0.23 && rate <= 0.27,
          "detection rate " + std::to_string(rate) +
              " outside 25% +/- 2pp");

  // the same event through the real proof machinery on disk
  TempDir tmp;
  fs::path pristine = tmp.path() / "pristine.bin";
  std::string content;
  for (int i = 0; i < 20; ++i) content += std::string(4096, char('a' + i));
  write_file(pristine, content);
  fs::path corrupt = tmp.path() / "corrupt.bin";
  std::string bad = content;
  bad[corrupted * 4096 + 7] ^= 0x01;
  write_file(corrupt, bad);
  for (int seed = 0; seed < 200; ++seed) {
    SampledProof proof =
        make_sampled_proof(pristine, 4096, seed, Fraction{1, 4});
    bool caught = !sampled_verify(corrupt, proof);
    bool sampled = std::find(proof.indices.begin(), proof.indices.end(),
                             corrupted) != proof.indices.end();
    require(caught == sampled,
            "sampled_verify must detect exactly when the corrupted leaf is "
            "sampled");
    require(sampled_verify(pristine, proof),
            "pristine bytes must always verify");
  }

  // analytic n=4, s=2: enumerate all 6 sample sets, 3 contain the corrupted
  // leaf, detection probability exactly 1/2
  int containing = 0, total = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      ++total;
      if (i == 2 || j == 2) ++containing;
    }
  }
  require(total == 6 && containing * 2 == total,
          "n=4 s=2 enumeration must give exactly 1/2");
}

// Revocation --------------------------------------------------------------

void criterion_revocation() {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 2; ++trial) {
    TempDir tmp;
    fs::path store_dir = tmp.path() / "store";
    Store store(store_dir);
    KeyPair key = keygen();
    store.add_trusted_key(key.public_bytes, key.scheme);
    auto pick = [&](std::size_t n) { return rng() % n; };

    // a layered random DAG out of real kinds, then revoke every node in turn
    std::vector<AttestationId> datasets, packs, codes, systems;
    for (int i = 0; i < 4; ++i) {
      fs::path p = tmp.path() / ("ds" + std::to_string(i));
      write_file(p / "f", "rows " + std::to_string(rng()));
      datasets.push_back(attest_data_path(p, "ds" + std::to_string(i), "", "",
                                          TrainingRole::Train, "", store,
                                          key));
    }
    for (int i = 0; i < 3; ++i) {
      std::vector<AttestationId> members;
      for (const auto& d : datasets) {
        if (pick(2)) members.push_back(d);
      }
      if (members.empty()) members.push_back(datasets[pick(datasets.size())]);
      packs.push_back(
          attest_pack(members, "pack" + std::to_string(i), store, key));
    }
    for (int i = 0; i < 2; ++i) {
      fs::path p = tmp.path() / ("code" + std::to_string(i));
      write_file(p, "code " + std::to_string(i));
      codes.push_back(attest_code_path(p, "code" + std::to_string(i),
                                       CodeRole::Training, std::nullopt, "",
                                       store, key));
    }
    fs::path ip = tmp.path() / "icode";
    write_file(ip, "serve");
    AttestationId icode = attest_code_path(ip, "icode", CodeRole::Inferencing,
                                           std::nullopt, "", store, key);
    for (int i = 0; i < 3; ++i) {
      AttestationId trained = attest_trained_system(
          packs[pick(packs.size())], codes[pick(codes.size())], "m",
          "trained" + std::to_string(i), store, key);
      fs::path w = tmp.path() / ("w" + std::to_string(i));
      write_file(w, "w" + std::to_string(i));
      auto wc = attest_weights_and_config(w, trained, {}, {}, store, key,
                                          "w" + std::to_string(i));
      systems.push_back(attest_inference_system(
          wc.config, icode, "svc", "inf" + std::to_string(i), store, key));
    }

    auto all = store.all_ids();
    require(all.size() <= 50, "fixture graph must stay at desk scale");

    auto raw_adjacency = raw_reference_adjacency(store_dir);
    auto closure_of = [&](const AttestationId& start) {
      std::set<AttestationId> seen{start};
      std::vector<AttestationId> queue{start};
      while (!queue.empty()) {
        AttestationId cur = queue.back();
        queue.pop_back();
        for (const auto& next : raw_adjacency[cur]) {
          if (seen.insert(next).second) queue.push_back(next);
        }
      }
      return seen;
    };

    for (const auto& victim : all) {
      // clone the store so each revocation starts from the same state
      fs::path clone_dir = tmp.path() / ("clone-" + victim.substr(0, 8));
      fs::copy(store_dir, clone_dir, fs::copy_options::recursive);
      Store clone(clone_dir);
      revoke(victim, "acceptance trial", key, clone);

      std::set<AttestationId> tainted = raw_reverse_reachable(store_dir,
                                                              victim);
      tainted.insert(victim);

      // verify_chain fails for exactly the attestations whose reference
      // closure intersects the tainted set
      for (const auto& target : all) {
        auto closure = closure_of(target);
        bool expect_fail = false;
        for (const auto& t : tainted) {
          if (closure.count(t)) {
            expect_fail = true;
            break;
          }
        }
        VerificationReport report = verify_chain(target, clone);
        require(report.pass == !expect_fail,
                "verify_chain(" + target.substr(0, 8) + ") after revoking " +
                    victim.substr(0, 8) + " disagrees with the oracle");
      }
      fs::remove_all(clone_dir);
    }

    // monotonicity: growing the store never un-revokes
    AttestationId victim = datasets[0];
    revoke(victim, "monotonicity", key, store);
    std::vector<bool> before;
    for (const auto& target : systems) {
      before.push_back(verify_chain(target, store).pass);
    }
    ChainFixture growth =
        build_chain_fixture(store, tmp.path() / "growth", "growth");
    (void)growth;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      require(verify_chain(systems[i], store).pass == before[i],
              "store growth changed a revocation verdict");
    }
  }
}

// Format stability ---------------------------------------------------------

constexpr const char* kGoldenCanonical =
    R"({"issued_at":"2026-01-02T03:04:05Z","issuer":{"algorithm":"sha-256","value":"abababababababababababababababababababababababababababababababab"},"kind":"training-data","payload":{"byte_count":12,"collection_method":"manual curation","content":{"chunk_size":4096,"leaf_count":1,"root":{"algorithm":"sha-256","value":"03881828921010a03cbf0f5a6f78ac385bdddeeba12e466c49093b9fc81c0d4c"},"scheme":"taibom-merkle/1"},"intended_role":"train","label":"unit-fixture","license":{"identifier":"CC-BY-4.0"},"location":"file:///tmp/corpus-a","name":"corpus-a"},"schema_version":"taibom/1","version":{"counter":1,"name":"corpus-a","semver":"1.0.0"}})";

void criterion_format_stability(const char* self) {
  // 1000 randomized envelopes: serialize -> parse -> canonicalize fixed point
  std::mt19937 rng(20260101);
  for (int i = 0; i < 1000; ++i) {
    Envelope e = random_envelope(rng);
    std::string canonical = canonicalize(e);
    Envelope back = parse_envelope(serialize_envelope(e));
    require(back == e, "round trip lost fields at case " + std::to_string(i));
    require(canonicalize(back) == canonical,
            "canonical fixed point broke at case " + std::to_string(i));
    require(canonicalize(parse_envelope(canonical)) == canonical,
            "parse(canonicalize) fixed point broke at case " +
                std::to_string(i));
  }

  // canonical bytes across two independent process runs (re-exec self)
  std::string command = std::string("'") + self + "' --canon-probe";
  auto run_probe = [&]() -> std::string {
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot re-exec for canon probe");
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe)) out += buf;
    pclose(pipe);
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
  };
  std::string first = run_probe();
  std::string second = run_probe();
  require(!first.empty() && first == second,
          "canonical bytes differ across process runs");
  require(first == kGoldenCanonical,
          "canonical bytes differ from the pinned golden encoding");

  // golden values for the canonical id and merkle construction
  Envelope golden = canon_probe_envelope();
  require(canonicalize(golden) == kGoldenCanonical,
          "in-process canonical bytes differ from the golden");
  require(attestation_id(golden) ==
              "97a648de2791f5597006314ea302af963949c8d8e9ea1c578599808eb3b0b71e",
          "golden attestation id drifted");

  TempDir tmp;
  fs::path empty_dir = tmp.path() / "empty";
  fs::create_directories(empty_dir);
  require(merkle_tree(empty_dir, 4096).root.value ==
              "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d",
          "empty-dir merkle golden drifted");
  std::string single = "hello taibom";
  require(merkle_blob(std::vector<std::uint8_t>(single.begin(), single.end()),
                      4096)
                  .root.value ==
              "03881828921010a03cbf0f5a6f78ac385bdddeeba12e466c49093b9fc81c0d4c",
          "single-leaf merkle golden drifted");

  // store layout golden: object fan-out, keys, vulns, revocations
  Store store(tmp.path() / "store");
  KeyPair key = keygen();
  store.add_trusted_key(key.public_bytes, key.scheme);
  write_file(tmp.path() / "artifact.txt", "layout probe");
  AttestationId id = attest_data_path(tmp.path() / "artifact.txt", "layout",
                                      "", "", std::nullopt, "", store, key);
  require(fs::exists(tmp.path() / "store" / "objects" / id.substr(0, 2) /
                     (id + ".taibom.json")),
          "objects/xx/<id>.taibom.json layout drifted");
  require(fs::exists(tmp.path() / "store" / "keys" /
                     (key.fingerprint.value + ".pub")),
          "keys/<fingerprint>.pub layout drifted");
  VulnRecord r;
  r.cve_id = "CVE-2024-4242";
  r.affected = {{"x", "*"}};
  store.put_vuln(r);
  require(fs::exists(tmp.path() / "store" / "vulns" / "CVE-2024-4242.json"),
          "vulns/<cve>.json layout drifted");
  AttestationId rev = revoke(id, "layout probe", key, store);
  require(fs::exists(tmp.path() / "store" / "revocations" /
                     (rev + ".taibom.json")),
          "revocations/<id>.taibom.json layout drifted");
}

// End to end ---------------------------------------------------------------

void criterion_end_to_end() {
  TempDir tmp;
  fs::path sample_src = fs::path(TAIBOM_SOURCE_DIR) / "samples";
  require(fs::exists(sample_src / "manifest.json"),
          "samples/manifest.json missing from the source tree");
  fs::path work = tmp.path() / "samples";
  fs::create_directories(work);
  fs::copy(sample_src, work, fs::copy_options::recursive);

  std::string store_path = (tmp.path() / "store").string();
  std::map<std::string, std::string> env{{"TAIBOM_STORE", store_path}};

  auto keygen_result = run_cli(
      {"keygen", "--out", (work / "keys" / "pipeline.key").string()});
  require(keygen_result.exit_code == 0, "keygen failed");
  require(run_cli({"trust", "add",
                   (work / "keys" / "pipeline.key.pub").string()},
                  env)
                  .exit_code == 0,
          "trust add failed");

  auto run = run_cli(
      {"--json", "pipeline", "run", (work / "manifest.json").string()}, env);
  require(run.exit_code == 0, "pipeline run exited " +
                                  std::to_string(run.exit_code) + ": " +
                                  run.err);
  json result = json::parse(run.out);
  std::string inference = result.at("inference_system").get<std::string>();

  auto verify = run_cli(
      {"verify", inference, "--rehash", work.string()}, env);
  require(verify.exit_code == 0,
          "verify --rehash exited " + std::to_string(verify.exit_code));

  // the shipped cve feed ingests cleanly and reports impact on the sample
  require(run_cli({"cve", "ingest", (work / "cve-feed.json").string()}, env)
                  .exit_code == 0,
          "sample feed ingest failed");
  auto impact_result =
      run_cli({"--json", "cve", "impact", "CVE-2024-9100"}, env);
  require(impact_result.exit_code == 0, "sample impact failed");
  json impact_doc = json::parse(impact_result.out);
  require(!impact_doc.at("affected_systems").empty(),
          "the sample training CVE must reach the sample systems");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--canon-probe") {
    std::cout << canonicalize(canon_probe_envelope()) << "\n";
    return 0;
  }

  auto started = std::chrono::steady_clock::now();

  criterion(1,
            "UC1 signed, versioned, hash-verified datasets with licence and "
            "timestamp metadata",
            criterion_uc1);
  criterion(2, "UC2 dataset deviations trigger verification failures",
            criterion_uc2);
  criterion(3, "UC3 detection of unauthorized changes to any component",
            criterion_uc3);
  criterion(4, "UC4 automated identification of affected models",
            criterion_uc4);
  criterion(5, "sampled signing detection rate (s/n empirical, 1/2 analytic)",
            criterion_sampling);
  criterion(6, "revocation blast radius equals brute-force reachability",
            criterion_revocation);
  criterion(7, "format stability: round trips, cross-process canonical "
               "bytes, pinned goldens",
            [&] { criterion_format_stability(argv[0]); });
  criterion(8, "end to end: pipeline run + verify --rehash on the sample "
               "manifest",
            criterion_end_to_end);

  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();
  std::printf("%d/8 criteria passed in %llds\n", 8 - g_failures,
              static_cast<long long>(elapsed));
  if (elapsed >= 120) {
    std::printf("FAIL  suite exceeded the 2 minute budget\n");
    return 1;
  }
  return g_failures == 0 ? 0 : 1;
}

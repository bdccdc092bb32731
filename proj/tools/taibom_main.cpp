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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "taibom/audit.hpp"
#include "taibom/errors.hpp"
#include "taibom/graph.hpp"
#include "taibom/sbom.hpp"
#include "taibom/store.hpp"
#include "taibom/workflow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace taibom;

namespace {

// 0 success / verification PASS
// 1 verification or audit failure (valid run, negative result)
// 2 usage or format error
// 3 store or IO error
constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kStoreError = 3;

struct GlobalOptions {
  std::string store_path;
  bool json_output{false};
};

Store open_store(const GlobalOptions& global) {
  std::string path = global.store_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kStoreEnvVar)) path = env;
  }
  if (path.empty()) {
    throw FormatError(
        "no store configured: pass --store PATH or set TAIBOM_STORE");
  }
  return Store(fs::path(path));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out.str();
}

void emit(const GlobalOptions& global, const json& machine,
          const std::string& human) {
  if (global.json_output) {
    std::cout << machine.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

std::map<std::string, std::string> parse_kv(
    const std::vector<std::string>& pairs, const char* what) {
  std::map<std::string, std::string> out;
  for (const auto& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError(std::string(what) + " must be KEY=VALUE, got: " + pair);
    }
    out[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return out;
}

// public key material from a .pub line or a keypair JSON file
std::pair<std::vector<std::uint8_t>, std::string> load_public_key(
    const fs::path& path) {
  std::string text = read_file(path);
  auto first_nonspace = text.find_first_not_of(" \t\r\n");
  if (first_nonspace != std::string::npos && text[first_nonspace] == '{') {
    KeyPair kp = load_keypair(path);
    return {kp.public_bytes, kp.scheme};
  }
  auto space = text.find(' ');
  if (space == std::string::npos) {
    throw FormatError("malformed public key file: " + path.string());
  }
  std::string scheme = text.substr(0, space);
  std::string b64 = text.substr(space + 1);
  while (!b64.empty() && (b64.back() == '\n' || b64.back() == '\r')) {
    b64.pop_back();
  }
  auto bytes = base64_decode(b64);
  if (!bytes) throw FormatError("malformed public key file: " + path.string());
  return {*bytes, scheme};
}

SbomFormat parse_sbom_format(const std::string& text) {
  if (text == "spdx" || text == "spdx-json") return SbomFormat::SpdxJson;
  if (text == "cyclonedx" || text == "cyclonedx-json") {
    return SbomFormat::CycloneDxJson;
  }
  throw FormatError("unknown sbom format '" + text + "' (spdx|cyclonedx)");
}

int cmd_verify(const GlobalOptions& global, const std::string& id,
               const std::string& rehash_root) {
  Store store = open_store(global);
  std::optional<fs::path> rehash;
  if (!rehash_root.empty()) rehash = fs::path(rehash_root);
  VerificationReport report = verify_chain(id, store, rehash);

  std::ostringstream human;
  for (const auto& n : report.nodes) {
    human << node_state_name(n.state) << "  " << n.id;
    if (!n.detail.empty()) human << "  (" << n.detail << ")";
    human << "\n";
  }
  human << "verdict: " << (report.pass ? "PASS" : "FAIL") << "\n";
  emit(global, verification_report_to_json(report), human.str());
  return report.pass ? kOk : kNegative;
}

int cmd_trace(const GlobalOptions& global, const std::string& id,
              const std::string& format) {
  Store store = open_store(global);
  json lineage = trace_lineage(id, store);
  if (format == "dot") {
    std::cout << lineage_to_dot(lineage);
  } else if (format == "json") {
    std::cout << lineage.dump(2) << "\n";
  } else {
    throw FormatError("unknown trace format '" + format + "' (json|dot)");
  }
  return kOk;
}

int cmd_diff(const GlobalOptions& global, const std::string& pack_a,
             const std::string& pack_b) {
  Store store = open_store(global);
  PackDiff diff = diff_packs(pack_a, pack_b, store);
  std::ostringstream human;
  for (const auto& a : diff.added) {
    human << "added     " << a.name << "  " << a.digest << "\n";
  }
  for (const auto& r : diff.removed) {
    human << "removed   " << r.name << "  " << r.digest << "\n";
  }
  for (const auto& m : diff.modified) {
    human << "modified  " << m.name << "  " << m.old_digest << " -> "
          << m.new_digest << "\n";
  }
  human << "unchanged " << diff.unchanged_count << "\n";
  emit(global, pack_diff_to_json(diff), human.str());
  return kOk;
}

int cmd_series(const GlobalOptions& global, const std::string& issuer,
               const std::string& name, const std::string& rehash_root) {
  Store store = open_store(global);
  std::optional<fs::path> rehash;
  if (!rehash_root.empty()) rehash = fs::path(rehash_root);
  auto entries = audit_series(issuer, name, store, rehash);
  std::ostringstream human;
  bool failed = false;
  for (const auto& e : entries) {
    human << "counter " << e.counter << "  " << series_state_name(e.state)
          << "  " << e.id;
    if (!e.detail.empty()) human << "  (" << e.detail << ")";
    human << "\n";
    failed = failed || e.state == SeriesState::FailDigest;
  }
  emit(global, series_to_json(entries), human.str());
  return failed ? kNegative : kOk;
}

int cmd_audit_store(const GlobalOptions& global) {
  Store store = open_store(global);
  auto findings = store.audit();
  json machine = json::array();
  std::ostringstream human;
  for (const auto& f : findings) {
    machine.push_back(json{{"path", f.path.string()}, {"message", f.message}});
    human << f.path.string() << ": " << f.message << "\n";
  }
  if (findings.empty()) {
    human << "store intact, " << store.all_ids().size() << " attestations\n";
  }
  emit(global, json{{"findings", machine}, {"intact", findings.empty()}},
       human.str());
  return findings.empty() ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taibom - trusted AI bill of materials toolkit"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--store", global.store_path,
                 "store directory (default: $TAIBOM_STORE)");
  app.add_flag("--json", global.json_output, "machine-readable JSON output");

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a signing keypair");
  std::string keygen_out = "taibom.key";
  std::string keygen_scheme = "ed25519";
  keygen_cmd->add_option("--out", keygen_out, "secret key output path");
  keygen_cmd->add_option("--scheme", keygen_scheme, "signature scheme");

  // trust add | trust list
  auto* trust_cmd = app.add_subcommand("trust", "manage trusted keys");
  trust_cmd->require_subcommand(1);
  auto* trust_add = trust_cmd->add_subcommand("add", "trust a public key");
  std::string trust_key_file;
  trust_add->add_option("keyfile", trust_key_file, "public key (.pub or .key)")
      ->required();
  auto* trust_list = trust_cmd->add_subcommand("list", "list trusted keys");

  // hash
  auto* hash_cmd =
      app.add_subcommand("hash", "merkle-hash a file or directory");
  std::string hash_path;
  std::uint64_t hash_chunk = kDefaultChunkSize;
  hash_cmd->add_option("path", hash_path, "file or directory")->required();
  hash_cmd->add_option("--chunk-size", hash_chunk, "chunk size (power of two)");

  // attest ...
  auto* attest_cmd = app.add_subcommand("attest", "create signed attestations");
  attest_cmd->require_subcommand(1);
  std::string key_file, name, label, license, role, collection;
  std::string semver = "1.0.0";
  std::optional<std::uint64_t> counter;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--key", key_file, "signing keypair file")->required();
    cmd->add_option("--name", name, "version series name")->required();
    cmd->add_option("--counter", counter,
                    "explicit version counter (default: auto-increment)");
  };

  auto* attest_data =
      attest_cmd->add_subcommand("data", "attest a dataset file or directory");
  std::string data_path;
  attest_data->add_option("path", data_path, "dataset path")->required();
  add_common(attest_data);
  attest_data->add_option("--label", label, "free-form classification tag");
  attest_data->add_option("--license", license, "SPDX license id");
  attest_data->add_option(
      "--role", role,
      "training role (train|validation|test|refinement); omit for a plain "
      "data attestation");
  attest_data->add_option("--collection-method", collection,
                          "how the data was collected");
  attest_data->add_option("--semver", semver, "human version string");

  auto* attest_code = attest_cmd->add_subcommand("code", "attest source code");
  std::string code_path, code_role_opt = "other", sbom_file, sbom_format_opt,
                         sbom_id;
  attest_code->add_option("path", code_path, "code file or directory")
      ->required();
  add_common(attest_code);
  attest_code->add_option("--role", code_role_opt,
                          "code role (training|inferencing|other)");
  attest_code->add_option("--sbom", sbom_file, "SBOM document to ingest");
  attest_code->add_option("--sbom-format", sbom_format_opt,
                          "spdx|cyclonedx (with --sbom)");
  attest_code->add_option("--sbom-id", sbom_id, "existing sbom attestation id");
  attest_code->add_option("--license", license, "SPDX license id");

  auto* attest_weights_cmd =
      attest_cmd->add_subcommand("weights", "attest trained weights");
  std::string weights_path, trained_system_id;
  attest_weights_cmd->add_option("path", weights_path, "weights file")
      ->required();
  add_common(attest_weights_cmd);
  attest_weights_cmd
      ->add_option("--trained-system", trained_system_id,
                   "trained-system attestation id")
      ->required();

  auto* attest_config_cmd =
      attest_cmd->add_subcommand("config", "attest a deployment config");
  std::string weights_id;
  std::vector<std::string> hyper_kv, meta_kv;
  add_common(attest_config_cmd);
  attest_config_cmd->add_option("--weights", weights_id, "weights attestation id")
      ->required();
  attest_config_cmd->add_option("--hyperparam", hyper_kv,
                                "hyperparameter KEY=VALUE (repeatable)");
  attest_config_cmd->add_option("--meta", meta_kv,
                                "system metadata KEY=VALUE (repeatable)");

  auto* attest_validation_cmd =
      attest_cmd->add_subcommand("validation", "attest a QA/validation report");
  std::string system_id, report_file, verdict_opt;
  attest_validation_cmd
      ->add_option("system_id", system_id, "trained/inference system id")
      ->required();
  attest_validation_cmd->add_option("report", report_file, "report file")
      ->required();
  add_common(attest_validation_cmd);
  attest_validation_cmd
      ->add_option("--verdict", verdict_opt, "pass|fail|conditional")
      ->required();

  auto* attest_trained_cmd = attest_cmd->add_subcommand(
      "training-system", "attest a trained system from pack + code");
  std::string pack_id, code_id, config_id;
  attest_trained_cmd->add_option("--pack", pack_id, "data-pack id")->required();
  attest_trained_cmd->add_option("--code", code_id, "training code id")
      ->required();
  add_common(attest_trained_cmd);
  attest_trained_cmd->add_option("--label", label, "system label");

  auto* attest_inference_cmd = attest_cmd->add_subcommand(
      "inference-system", "attest an inference system from config + code");
  attest_inference_cmd->add_option("--config", config_id, "config id")
      ->required();
  attest_inference_cmd->add_option("--code", code_id, "inferencing code id")
      ->required();
  add_common(attest_inference_cmd);
  attest_inference_cmd->add_option("--label", label, "system label");

  // pack
  auto* pack_cmd =
      app.add_subcommand("pack", "aggregate training-data into a data-pack");
  std::vector<std::string> member_ids;
  pack_cmd->add_option("ids", member_ids, "training-data attestation ids")
      ->required();
  add_common(pack_cmd);

  // pipeline run
  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "lifecycle orchestration");
  pipeline_cmd->require_subcommand(1);
  auto* pipeline_run =
      pipeline_cmd->add_subcommand("run", "attest a full pipeline manifest");
  std::string manifest_path;
  pipeline_run->add_option("manifest", manifest_path, "manifest/1 JSON file")
      ->required();

  // verify / trace
  auto* verify_cmd = app.add_subcommand("verify", "verify a chain of trust");
  std::string target_id, rehash_root;
  verify_cmd->add_option("id", target_id, "attestation id")->required();
  verify_cmd->add_option("--rehash", rehash_root,
                         "recompute artifact digests, resolving relative path "
                         "hints against this root");

  auto* trace_cmd = app.add_subcommand("trace", "emit the lineage document");
  std::string trace_id;
  std::string trace_format = "json";
  trace_cmd->add_option("id", trace_id, "attestation id")->required();
  trace_cmd->add_option("--format", trace_format, "json|dot");

  // diff / reuse / series
  auto* diff_cmd = app.add_subcommand("diff", "compare two data-packs");
  std::string pack_a, pack_b;
  diff_cmd->add_option("pack_a", pack_a, "older pack id")->required();
  diff_cmd->add_option("pack_b", pack_b, "newer pack id")->required();

  auto* reuse_cmd =
      app.add_subcommand("reuse", "find attestations sharing a content digest");
  std::string reuse_digest;
  reuse_cmd->add_option("digest", reuse_digest, "64-hex content root")
      ->required();

  auto* series_cmd =
      app.add_subcommand("series", "audit every version of a series");
  std::string series_issuer, series_name, series_rehash;
  series_cmd->add_option("issuer", series_issuer, "issuer fingerprint (hex)")
      ->required();
  series_cmd->add_option("name", series_name, "version series name")
      ->required();
  series_cmd->add_option("--rehash", series_rehash,
                         "artifact root for relative path hints");

  // sbom import
  auto* sbom_cmd = app.add_subcommand("sbom", "software bill of materials");
  sbom_cmd->require_subcommand(1);
  auto* sbom_import = sbom_cmd->add_subcommand("import", "ingest an SBOM file");
  std::string sbom_doc_path, sbom_import_format, sbom_import_key,
      sbom_import_name;
  std::optional<std::uint64_t> sbom_counter;
  sbom_import->add_option("file", sbom_doc_path, "SBOM JSON document")
      ->required();
  sbom_import->add_option("--format", sbom_import_format, "spdx|cyclonedx")
      ->required();
  sbom_import->add_option("--key", sbom_import_key, "signing keypair file")
      ->required();
  sbom_import->add_option("--name", sbom_import_name, "version series name");
  sbom_import->add_option("--counter", sbom_counter,
                          "explicit version counter");

  // cve ingest | cve impact
  auto* cve_cmd = app.add_subcommand("cve", "vulnerability feed operations");
  cve_cmd->require_subcommand(1);
  auto* cve_ingest =
      cve_cmd->add_subcommand("ingest", "ingest a CVE feed file");
  std::string feed_path;
  cve_ingest->add_option("feed", feed_path, "feed JSON file")->required();
  auto* cve_impact =
      cve_cmd->add_subcommand("impact", "systems affected by a CVE");
  std::string cve_id;
  cve_impact->add_option("cve_id", cve_id, "CVE identifier")->required();

  // revoke / audit-store
  auto* revoke_cmd = app.add_subcommand("revoke", "revoke an attestation");
  std::string revoke_id, revoke_reason, revoke_key;
  revoke_cmd->add_option("id", revoke_id, "attestation id")->required();
  revoke_cmd->add_option("--reason", revoke_reason, "why it is revoked")
      ->required();
  revoke_cmd->add_option("--key", revoke_key, "signing keypair file")
      ->required();

  auto* audit_cmd = app.add_subcommand(
      "audit-store", "recompute every stored object id and key fingerprint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*keygen_cmd) {
      KeyPair kp = taibom::keygen(keygen_scheme);
      save_keypair(kp, keygen_out);
      emit(global,
           json{{"fingerprint", kp.fingerprint.value},
                {"secret_key", keygen_out},
                {"public_key", keygen_out + ".pub"}},
           "fingerprint " + kp.fingerprint.value + "\nsecret key " +
               keygen_out + "\npublic key " + keygen_out + ".pub\n");
      return kOk;
    }
    if (*trust_add) {
      Store store = open_store(global);
      auto [bytes, scheme] = load_public_key(trust_key_file);
      Digest fp = store.add_trusted_key(bytes, scheme);
      emit(global, json{{"fingerprint", fp.value}}, fp.value + "\n");
      return kOk;
    }
    if (*trust_list) {
      Store store = open_store(global);
      json machine = json::array();
      std::ostringstream human;
      for (const auto& key : store.trusted_keys()) {
        machine.push_back(json{{"fingerprint", key.fingerprint.value},
                               {"scheme", key.scheme}});
        human << key.fingerprint.value << "  " << key.scheme << "\n";
      }
      emit(global, json{{"trusted_keys", machine}}, human.str());
      return kOk;
    }
    if (*hash_cmd) {
      MerkleRoot root = merkle_path(hash_path, hash_chunk);
      emit(global,
           json{{"root", root.root.value},
                {"algorithm", root.root.algorithm},
                {"chunk_size", root.chunk_size},
                {"leaf_count", root.leaf_count},
                {"scheme", root.scheme}},
           "root " + root.root.value + "\nleaf_count " +
               std::to_string(root.leaf_count) + "\nchunk_size " +
               std::to_string(root.chunk_size) + "\n");
      return kOk;
    }
    if (*attest_data) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      std::optional<TrainingRole> training_role;
      if (!role.empty()) {
        training_role = training_role_from_name(role);
        if (!training_role) {
          throw FormatError("unknown role '" + role +
                            "' (train|validation|test|refinement)");
        }
      }
      AttestationId id =
          attest_data_path(data_path, name, label, license, training_role,
                           collection, store, kp, counter, semver);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*attest_code) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      auto parsed_role = code_role_from_name(code_role_opt);
      if (!parsed_role) {
        throw FormatError("unknown role '" + code_role_opt +
                          "' (training|inferencing|other)");
      }
      std::optional<AttestationId> sbom_ref;
      if (!sbom_id.empty()) {
        sbom_ref = sbom_id;
      } else if (!sbom_file.empty()) {
        if (sbom_format_opt.empty()) {
          throw FormatError("--sbom requires --sbom-format spdx|cyclonedx");
        }
        sbom_ref = ingest_sbom(read_file(sbom_file),
                               parse_sbom_format(sbom_format_opt), store, kp);
      }
      AttestationId id = attest_code_path(code_path, name, *parsed_role,
                                          sbom_ref, license, store, kp,
                                          counter);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*attest_weights_cmd) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      AttestationId id = attest_weights(weights_path, trained_system_id, name,
                                        store, kp, counter);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*attest_config_cmd) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      AttestationId id =
          attest_config(weights_id, parse_kv(hyper_kv, "--hyperparam"),
                        parse_kv(meta_kv, "--meta"), name, store, kp, counter);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*attest_validation_cmd) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      auto verdict = verdict_from_name(verdict_opt);
      if (!verdict) {
        throw FormatError("unknown verdict '" + verdict_opt +
                          "' (pass|fail|conditional)");
      }
      AttestationId id = attest_validation(system_id, report_file, *verdict,
                                           store, kp, name, counter);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*attest_trained_cmd) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      AttestationId id = attest_trained_system(
          pack_id, code_id, label.empty() ? name : label, name, store, kp,
          counter);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*attest_inference_cmd) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      AttestationId id = attest_inference_system(
          config_id, code_id, label.empty() ? name : label, name, store, kp,
          counter);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*pack_cmd) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(key_file);
      AttestationId id = attest_pack(member_ids, name, store, kp, counter);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*pipeline_run) {
      Store store = open_store(global);
      PipelineManifest manifest = load_manifest(manifest_path);
      PipelineResult result = run_pipeline(manifest, store);
      std::ostringstream human;
      human << "trained_system   " << result.training.trained_system << "\n"
            << "weights          " << result.weights_config.weights << "\n"
            << "config           " << result.weights_config.config << "\n"
            << "inference_system " << result.inference_system << "\n";
      emit(global, pipeline_result_to_json(result), human.str());
      return kOk;
    }
    if (*verify_cmd) return cmd_verify(global, target_id, rehash_root);
    if (*trace_cmd) return cmd_trace(global, trace_id, trace_format);
    if (*diff_cmd) return cmd_diff(global, pack_a, pack_b);
    if (*reuse_cmd) {
      Store store = open_store(global);
      ReuseReport report = audit_reuse(reuse_digest, store);
      std::ostringstream human;
      for (const auto& h : report.hits) {
        human << h.id << "  " << kind_name(h.kind) << "  " << h.name << "@"
              << h.version.counter << "\n";
      }
      if (report.hits.empty()) human << "digest never attested\n";
      emit(global, reuse_report_to_json(report), human.str());
      return kOk;
    }
    if (*series_cmd) {
      return cmd_series(global, series_issuer, series_name, series_rehash);
    }
    if (*sbom_import) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(sbom_import_key);
      IngestOptions options;
      if (!sbom_import_name.empty()) {
        std::uint64_t c = sbom_counter.value_or(
            store.max_counter(kp.fingerprint.value, sbom_import_name) + 1);
        options.version = VersionInfo{sbom_import_name, "1.0.0", c};
      }
      AttestationId id =
          ingest_sbom(read_file(sbom_doc_path),
                      parse_sbom_format(sbom_import_format), store, kp,
                      options);
      emit(global, json{{"id", id}}, id + "\n");
      return kOk;
    }
    if (*cve_ingest) {
      Store store = open_store(global);
      FeedResult result = ingest_cve_feed(read_file(feed_path), store);
      json errors = json::array();
      for (const auto& [index, message] : result.errors) {
        errors.push_back(json{{"index", index}, {"message", message}});
        std::cerr << "record " << index << ": " << message << "\n";
      }
      emit(global, json{{"upserted", result.upserted}, {"errors", errors}},
           "upserted " + std::to_string(result.upserted) + "\n");
      return result.errors.empty() ? kOk : kUsage;
    }
    if (*cve_impact) {
      Store store = open_store(global);
      ImpactReport report = impact(cve_id, store);
      std::ostringstream human;
      human << "matched components: " << report.matched_components.size()
            << "\n";
      for (const auto& m : report.matched_components) {
        human << "  " << m.component_name << " " << m.component_version
              << "  (sbom " << m.sbom_id.substr(0, 12) << ")\n";
      }
      human << "affected code: " << report.affected_code.size() << "\n";
      for (const auto& c : report.affected_code) human << "  " << c << "\n";
      human << "affected systems: " << report.affected_systems.size() << "\n";
      for (const auto& [id, kind] : report.affected_systems) {
        human << "  " << id << "  " << kind_name(kind) << "\n";
      }
      emit(global, impact_report_to_json(report), human.str());
      return kOk;
    }
    if (*revoke_cmd) {
      Store store = open_store(global);
      KeyPair kp = load_keypair(revoke_key);
      AttestationId id = revoke(revoke_id, revoke_reason, kp, store);
      emit(global, json{{"revocation_id", id}, {"target", revoke_id}},
           id + "\n");
      return kOk;
    }
    if (*audit_cmd) return cmd_audit_store(global);

    std::cerr << "no subcommand given\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const KindError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const VersionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedScheme& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const AuthorizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CanonicalizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    // IoError, IntegrityError, DigestMismatch, CycleError, BusyError
    std::cerr << "error: " << e.what() << "\n";
    return kStoreError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kStoreError;
  }
}

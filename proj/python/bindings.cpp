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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "taibom/audit.hpp"
#include "taibom/errors.hpp"
#include "taibom/graph.hpp"
#include "taibom/sbom.hpp"
#include "taibom/store.hpp"
#include "taibom/workflow.hpp"

namespace py = pybind11;
using namespace taibom;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = json_to_py(value);
      }
      return out;
    }
    default:
      throw FormatError("unrepresentable JSON value");
  }
}

json py_to_json(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) {
    auto as_int = h.cast<std::int64_t>();
    if (as_int >= 0) return static_cast<std::uint64_t>(as_int);
    return as_int;
  }
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::bytes>(h)) {
    throw FormatError("raw bytes are not representable in envelope JSON");
  }
  if (py::isinstance<py::dict>(h)) {
    json out = json::object();
    for (auto item : h.cast<py::dict>()) {
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    }
    return out;
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    json out = json::array();
    for (auto item : h.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw FormatError("unrepresentable python value in JSON conversion");
}

std::vector<std::uint8_t> bytes_to_vector(const py::bytes& data) {
  std::string s = data;
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

py::bytes vector_to_bytes(const std::vector<std::uint8_t>& data) {
  return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

KeyPair keypair_from_py(const py::dict& d) {
  KeyPair kp;
  kp.scheme = d.contains("scheme") ? d["scheme"].cast<std::string>()
                                   : std::string(kEd25519);
  kp.public_bytes = bytes_to_vector(d["public"].cast<py::bytes>());
  kp.secret_bytes = bytes_to_vector(d["secret"].cast<py::bytes>());
  kp.fingerprint = hash_bytes(kp.public_bytes);
  return kp;
}

py::dict keypair_to_py(const KeyPair& kp) {
  py::dict out;
  out["scheme"] = kp.scheme;
  out["public"] = vector_to_bytes(kp.public_bytes);
  out["secret"] = vector_to_bytes(kp.secret_bytes);
  out["fingerprint"] = kp.fingerprint.value;
  return out;
}

Envelope envelope_from_py(py::handle h) {
  return envelope_from_json(py_to_json(h));
}

py::object envelope_to_py(const Envelope& e) {
  return json_to_py(envelope_to_json(e));
}

Fraction fraction_from(std::uint64_t numerator, std::uint64_t denominator) {
  return Fraction{numerator, denominator};
}

json proof_to_json(const SampledProof& proof) {
  json digests = json::array();
  for (const auto& d : proof.digests) digests.push_back(d.value);
  return json{{"parent",
               json{{"root", proof.parent.root.value},
                    {"chunk_size", proof.parent.chunk_size},
                    {"leaf_count", proof.parent.leaf_count},
                    {"scheme", proof.parent.scheme}}},
              {"indices", proof.indices},
              {"digests", digests},
              {"seed", proof.seed},
              {"fraction", json{{"numerator", proof.fraction.numerator},
                                {"denominator", proof.fraction.denominator}}}};
}

SampledProof proof_from_json(const json& j) {
  SampledProof proof;
  proof.parent.root = Digest{kSha256, j.at("parent").at("root")};
  proof.parent.chunk_size = j.at("parent").at("chunk_size");
  proof.parent.leaf_count = j.at("parent").at("leaf_count");
  proof.parent.scheme = j.at("parent").at("scheme");
  proof.indices = j.at("indices").get<std::vector<std::uint64_t>>();
  for (const auto& d : j.at("digests")) {
    proof.digests.push_back(Digest{kSha256, d.get<std::string>()});
  }
  proof.seed = j.at("seed");
  proof.fraction = Fraction{j.at("fraction").at("numerator"),
                            j.at("fraction").at("denominator")};
  return proof;
}

std::optional<Kind> kind_arg(const py::object& kind) {
  if (kind.is_none()) return std::nullopt;
  auto parsed = kind_from_name(kind.cast<std::string>());
  if (!parsed) throw FormatError("unknown kind: " + kind.cast<std::string>());
  return parsed;
}

std::optional<std::string> str_arg(const py::object& value) {
  if (value.is_none()) return std::nullopt;
  return value.cast<std::string>();
}

std::optional<std::filesystem::path> path_arg(const py::object& value) {
  if (value.is_none()) return std::nullopt;
  return std::filesystem::path(value.cast<std::string>());
}

std::optional<std::uint64_t> counter_arg(const py::object& value) {
  if (value.is_none()) return std::nullopt;
  return value.cast<std::uint64_t>();
}

}  // namespace

PYBIND11_MODULE(_taibom, m) {
  m.doc() = "trusted AI bill of materials toolkit";

  auto base = py::register_exception<Error>(m, "TaibomError");
  py::register_exception<CanonicalizationError>(m, "CanonicalizationError",
                                                base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<UnsupportedScheme>(m, "UnsupportedScheme", base);
  py::register_exception<IntegrityError>(m, "IntegrityError", base);
  py::register_exception<DigestMismatch>(m, "DigestMismatch", base);
  py::register_exception<CycleError>(m, "CycleError", base);
  py::register_exception<AuthorizationError>(m, "AuthorizationError", base);
  py::register_exception<KindError>(m, "KindError", base);
  py::register_exception<NotFound>(m, "NotFound", base);
  py::register_exception<VersionError>(m, "VersionError", base);
  py::register_exception<BusyError>(m, "BusyError", base);

  // crypto
  m.def(
      "keygen",
      [](const std::string& scheme) { return keypair_to_py(keygen(scheme)); },
      py::arg("scheme") = kEd25519);
  m.def("hash_bytes", [](const py::bytes& data) {
    return hash_bytes(bytes_to_vector(data)).value;
  });
  m.def(
      "sign",
      [](const py::bytes& data, const py::dict& keypair) {
        return vector_to_bytes(
            sign(bytes_to_vector(data), keypair_from_py(keypair)));
      },
      py::arg("data"), py::arg("keypair"));
  m.def(
      "verify_sig",
      [](const py::bytes& data, const py::bytes& signature,
         const py::bytes& public_bytes, const std::string& scheme) {
        return verify_sig(bytes_to_vector(data), bytes_to_vector(signature),
                          bytes_to_vector(public_bytes), scheme);
      },
      py::arg("data"), py::arg("signature"), py::arg("public"),
      py::arg("scheme") = kEd25519);
  m.def("load_keypair", [](const std::string& path) {
    return keypair_to_py(load_keypair(path));
  });
  m.def("save_keypair",
        [](const py::dict& keypair, const std::string& path) {
          save_keypair(keypair_from_py(keypair), path);
        });

  // merkle
  m.def(
      "merkle_blob",
      [](const py::bytes& data, std::uint64_t chunk_size) {
        auto root = merkle_blob(bytes_to_vector(data), chunk_size);
        return json_to_py(json{{"root", root.root.value},
                               {"chunk_size", root.chunk_size},
                               {"leaf_count", root.leaf_count},
                               {"scheme", root.scheme}});
      },
      py::arg("data"), py::arg("chunk_size") = kDefaultChunkSize);
  m.def(
      "merkle_path",
      [](const std::string& path, std::uint64_t chunk_size) {
        auto root = merkle_path(path, chunk_size);
        return json_to_py(json{{"root", root.root.value},
                               {"chunk_size", root.chunk_size},
                               {"leaf_count", root.leaf_count},
                               {"scheme", root.scheme}});
      },
      py::arg("path"), py::arg("chunk_size") = kDefaultChunkSize);
  m.def(
      "sample_indices",
      [](std::uint64_t seed, std::uint64_t leaf_count, std::uint64_t numerator,
         std::uint64_t denominator) {
        return sample_indices(seed, leaf_count,
                              fraction_from(numerator, denominator));
      },
      py::arg("seed"), py::arg("leaf_count"), py::arg("numerator"),
      py::arg("denominator"));
  m.def(
      "make_sampled_proof",
      [](const std::string& path, std::uint64_t chunk_size, std::uint64_t seed,
         std::uint64_t numerator, std::uint64_t denominator) {
        return json_to_py(proof_to_json(make_sampled_proof(
            path, chunk_size, seed, fraction_from(numerator, denominator))));
      },
      py::arg("path"), py::arg("chunk_size"), py::arg("seed"),
      py::arg("numerator"), py::arg("denominator"));
  m.def(
      "sampled_verify",
      [](const std::string& path, const py::dict& proof) {
        return sampled_verify(path, proof_from_json(py_to_json(proof)));
      },
      py::arg("path"), py::arg("proof"));

  // envelopes
  m.def("canonicalize", [](const py::dict& envelope) {
    std::string canonical = canonicalize(envelope_from_py(envelope));
    return py::bytes(canonical);
  });
  m.def("attestation_id", [](const py::dict& envelope) {
    return attestation_id(envelope_from_py(envelope));
  });
  m.def(
      "sign_envelope",
      [](const py::dict& envelope, const py::dict& keypair) {
        Envelope e = envelope_from_py(envelope);
        sign_envelope(e, keypair_from_py(keypair));
        return envelope_to_py(e);
      },
      py::arg("envelope"), py::arg("keypair"));
  m.def(
      "validate_payload",
      [](const py::dict& envelope, py::object store) {
        Envelope e = envelope_from_py(envelope);
        Resolver resolver;
        if (!store.is_none()) {
          auto& s = store.cast<Store&>();
          resolver = [&s](const AttestationId& id) { return s.get(id); };
        }
        py::list out;
        for (const auto& v : validate_payload(e, resolver)) {
          py::dict item;
          item["field"] = v.field;
          item["message"] = v.message;
          out.append(item);
        }
        return out;
      },
      py::arg("envelope"), py::arg("store") = py::none());

  // store
  py::class_<Store>(m, "Store")
      .def(py::init([](const std::string& path, bool fail_fast) {
             return Store(path, fail_fast ? Store::LockMode::FailFast
                                          : Store::LockMode::Wait);
           }),
           py::arg("path"), py::arg("fail_fast") = false)
      .def("put",
           [](Store& s, const py::dict& envelope) {
             return s.put(envelope_from_py(envelope));
           })
      .def("get",
           [](const Store& s, const std::string& id) -> py::object {
             auto env = s.get(id);
             if (!env) return py::none();
             return envelope_to_py(*env);
           })
      .def(
          "find",
          [](const Store& s, py::object kind, py::object issuer,
             py::object name) {
            return s.find(kind_arg(kind), str_arg(issuer), str_arg(name));
          },
          py::arg("kind") = py::none(), py::arg("issuer") = py::none(),
          py::arg("name") = py::none())
      .def("max_counter", &Store::max_counter)
      .def("add_trusted_key",
           [](Store& s, const py::bytes& public_bytes,
              const std::string& scheme) {
             return s.add_trusted_key(bytes_to_vector(public_bytes), scheme)
                 .value;
           },
           py::arg("public"), py::arg("scheme") = kEd25519)
      .def("is_trusted",
           [](const Store& s, const std::string& fingerprint) {
             return s.is_trusted(fingerprint);
           })
      .def("trusted_keys",
           [](const Store& s) {
             py::list out;
             for (const auto& key : s.trusted_keys()) {
               py::dict item;
               item["fingerprint"] = key.fingerprint.value;
               item["scheme"] = key.scheme;
               item["public"] = vector_to_bytes(key.public_bytes);
               out.append(item);
             }
             return out;
           })
      .def("put_vuln",
           [](Store& s, const py::dict& record) {
             s.put_vuln(vuln_from_json(py_to_json(record)));
           })
      .def("get_vuln",
           [](const Store& s, const std::string& cve_id) -> py::object {
             auto record = s.get_vuln(cve_id);
             if (!record) return py::none();
             return json_to_py(vuln_to_json(*record));
           })
      .def("vulns",
           [](const Store& s) {
             py::list out;
             for (const auto& r : s.vulns()) out.append(json_to_py(vuln_to_json(r)));
             return out;
           })
      .def("all_ids", &Store::all_ids)
      .def("audit",
           [](const Store& s) {
             py::list out;
             for (const auto& f : s.audit()) {
               py::dict item;
               item["path"] = f.path.string();
               item["message"] = f.message;
               out.append(item);
             }
             return out;
           })
      .def("rebuild_index", &Store::rebuild_index)
      .def_property_readonly(
          "root", [](const Store& s) { return s.root().string(); });

  // trust graph
  m.def(
      "verify_chain",
      [](const Store& store, const std::string& id, py::object rehash) {
        return json_to_py(
            verification_report_to_json(verify_chain(id, store,
                                                     path_arg(rehash))));
      },
      py::arg("store"), py::arg("id"), py::arg("rehash") = py::none());
  m.def("trace_lineage",
        [](const Store& store, const std::string& id) {
          return json_to_py(trace_lineage(id, store));
        });
  m.def("lineage_dot", [](const Store& store, const std::string& id) {
    return lineage_to_dot(trace_lineage(id, store));
  });
  m.def(
      "revoke",
      [](Store& store, const std::string& id, const std::string& reason,
         const py::dict& keypair) {
        return revoke(id, reason, keypair_from_py(keypair), store);
      },
      py::arg("store"), py::arg("id"), py::arg("reason"), py::arg("keypair"));

  // poisoning audit
  m.def("diff_packs",
        [](const Store& store, const std::string& a, const std::string& b) {
          return json_to_py(pack_diff_to_json(diff_packs(a, b, store)));
        });
  m.def("audit_reuse",
        [](const Store& store, const std::string& digest) {
          return json_to_py(reuse_report_to_json(audit_reuse(digest, store)));
        });
  m.def(
      "audit_series",
      [](const Store& store, const std::string& issuer, const std::string& name,
         py::object rehash) {
        return json_to_py(
            series_to_json(audit_series(issuer, name, store,
                                        path_arg(rehash))));
      },
      py::arg("store"), py::arg("issuer"), py::arg("name"),
      py::arg("rehash") = py::none());

  // sbom + cve
  m.def(
      "ingest_spdx",
      [](Store& store, const std::string& document, const py::dict& keypair) {
        return ingest_spdx(document, store, keypair_from_py(keypair));
      },
      py::arg("store"), py::arg("document"), py::arg("keypair"));
  m.def(
      "ingest_cyclonedx",
      [](Store& store, const std::string& document, const py::dict& keypair) {
        return ingest_cyclonedx(document, store, keypair_from_py(keypair));
      },
      py::arg("store"), py::arg("document"), py::arg("keypair"));
  m.def("ingest_cve_feed",
        [](Store& store, const std::string& feed) {
          FeedResult result = ingest_cve_feed(feed, store);
          py::dict out;
          out["upserted"] = result.upserted;
          py::list errors;
          for (const auto& [index, message] : result.errors) {
            py::dict item;
            item["index"] = index;
            item["message"] = message;
            errors.append(item);
          }
          out["errors"] = errors;
          return out;
        });
  m.def("match_components",
        [](const Store& store, const py::dict& record) {
          py::list out;
          for (const auto& match :
               match_components(vuln_from_json(py_to_json(record)), store)) {
            py::dict item;
            item["sbom_id"] = match.sbom_id;
            item["name"] = match.component_name;
            item["version"] = match.component_version;
            out.append(item);
          }
          return out;
        });
  m.def("impact", [](const Store& store, const std::string& cve_id) {
    return json_to_py(impact_report_to_json(impact(cve_id, store)));
  });

  // workflow
  m.def(
      "attest_data",
      [](Store& store, const py::dict& keypair, const std::string& path,
         const std::string& name, const std::string& label,
         const std::string& license, py::object role,
         const std::string& collection_method, py::object counter) {
        std::optional<TrainingRole> training_role;
        if (!role.is_none()) {
          training_role = training_role_from_name(role.cast<std::string>());
          if (!training_role) {
            throw FormatError("unknown role: " + role.cast<std::string>());
          }
        }
        return attest_data_path(path, name, label, license, training_role,
                                collection_method, store,
                                keypair_from_py(keypair), counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("path"), py::arg("name"),
      py::arg("label") = "", py::arg("license") = "",
      py::arg("role") = py::none(), py::arg("collection_method") = "",
      py::arg("counter") = py::none());
  m.def(
      "attest_code",
      [](Store& store, const py::dict& keypair, const std::string& path,
         const std::string& name, const std::string& role, py::object sbom_ref,
         const std::string& license, py::object counter) {
        auto code_role = code_role_from_name(role);
        if (!code_role) throw FormatError("unknown code role: " + role);
        std::optional<AttestationId> sbom;
        if (!sbom_ref.is_none()) sbom = sbom_ref.cast<std::string>();
        return attest_code_path(path, name, *code_role, sbom, license, store,
                                keypair_from_py(keypair), counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("path"), py::arg("name"),
      py::arg("role") = "other", py::arg("sbom_ref") = py::none(),
      py::arg("license") = "", py::arg("counter") = py::none());
  m.def(
      "attest_pack",
      [](Store& store, const py::dict& keypair,
         const std::vector<std::string>& members, const std::string& name,
         py::object counter) {
        return attest_pack(members, name, store, keypair_from_py(keypair),
                           counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("members"),
      py::arg("name"), py::arg("counter") = py::none());
  m.def(
      "attest_trained_system",
      [](Store& store, const py::dict& keypair, const std::string& pack_id,
         const std::string& code_id, const std::string& label,
         const std::string& name, py::object counter) {
        return attest_trained_system(pack_id, code_id, label, name, store,
                                     keypair_from_py(keypair),
                                     counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("pack_id"),
      py::arg("code_id"), py::arg("label"), py::arg("name"),
      py::arg("counter") = py::none());
  m.def(
      "attest_weights",
      [](Store& store, const py::dict& keypair, const std::string& path,
         const std::string& trained_system_id, const std::string& name,
         py::object counter) {
        return attest_weights(path, trained_system_id, name, store,
                              keypair_from_py(keypair), counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("path"),
      py::arg("trained_system_id"), py::arg("name"),
      py::arg("counter") = py::none());
  m.def(
      "attest_config",
      [](Store& store, const py::dict& keypair, const std::string& weights_id,
         const std::map<std::string, std::string>& hyperparameters,
         const std::map<std::string, std::string>& system_metadata,
         const std::string& name, py::object counter) {
        return attest_config(weights_id, hyperparameters, system_metadata,
                             name, store, keypair_from_py(keypair),
                             counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("weights_id"),
      py::arg("hyperparameters"), py::arg("system_metadata"), py::arg("name"),
      py::arg("counter") = py::none());
  m.def(
      "attest_inference_system",
      [](Store& store, const py::dict& keypair, const std::string& config_id,
         const std::string& code_id, const std::string& label,
         const std::string& name, py::object counter) {
        return attest_inference_system(config_id, code_id, label, name, store,
                                       keypair_from_py(keypair),
                                       counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("config_id"),
      py::arg("code_id"), py::arg("label"), py::arg("name"),
      py::arg("counter") = py::none());
  m.def(
      "attest_validation",
      [](Store& store, const py::dict& keypair, const std::string& system_id,
         const std::string& report_path, const std::string& verdict,
         const std::string& name, py::object counter) {
        auto parsed = verdict_from_name(verdict);
        if (!parsed) throw FormatError("unknown verdict: " + verdict);
        return attest_validation(system_id, report_path, *parsed, store,
                                 keypair_from_py(keypair), name,
                                 counter_arg(counter));
      },
      py::arg("store"), py::arg("keypair"), py::arg("system_id"),
      py::arg("report_path"), py::arg("verdict"),
      py::arg("name") = "validation", py::arg("counter") = py::none());
  m.def("run_pipeline",
        [](Store& store, const std::string& manifest_path) {
          PipelineManifest manifest = load_manifest(manifest_path);
          return json_to_py(pipeline_result_to_json(run_pipeline(manifest,
                                                                 store)));
        });

  m.attr("SCHEMA_VERSION") = kSchemaVersion;
  m.attr("STORE_ENV_VAR") = kStoreEnvVar;
  m.attr("DEFAULT_CHUNK_SIZE") = kDefaultChunkSize;
}

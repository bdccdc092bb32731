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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taibom/sbom.hpp"
#include "taibom/store.hpp"

namespace taibom {

inline constexpr const char* kManifestVersion = "manifest/1";

/// Declarative description of one pipeline run: which artifact bytes to
/// attest and how to wire them together. Paths are resolved against the
/// manifest file's directory.
struct ManifestDataset {
  std::filesystem::path path;
  std::string name;
  std::string label;
  std::string license;
  std::string collection_method;
  TrainingRole role{TrainingRole::Train};
};

struct ManifestCode {
  std::filesystem::path path;
  std::filesystem::path sbom;
  SbomFormat sbom_format{SbomFormat::SpdxJson};
  std::string name;
};

struct PipelineManifest {
  std::string name{"pipeline"};
  std::vector<ManifestDataset> datasets;
  ManifestCode training_code;
  ManifestCode inferencing_code;
  std::map<std::string, std::string> hyperparameters;
  std::map<std::string, std::string> system_metadata;
  std::optional<std::filesystem::path> weights_path;
  std::filesystem::path signing_key;
  // explicit counter for every created series; absent = auto-increment
  std::optional<std::uint64_t> counter;
};

/// Loads and validates a manifest/1 JSON file. Non-string hyperparameter
/// values raise CanonicalizationError; structural problems raise
/// FormatError.
PipelineManifest load_manifest(const std::filesystem::path& path);

/// Key file helpers (JSON keypair written by `taibom keygen`).
KeyPair load_keypair(const std::filesystem::path& path);
void save_keypair(const KeyPair& keypair, const std::filesystem::path& path);

struct TrainingPhaseResult {
  AttestationId trained_system;
  std::vector<AttestationId> datasets;
  AttestationId data_pack;
  AttestationId sbom;
  AttestationId code;
};

/// Creates and signs, in order: one training-data attestation per dataset,
/// a data-pack, the training code's sbom and code attestations, then the
/// trained-system. Intermediate attestations persist even when a later
/// step fails; they are valid standalone.
TrainingPhaseResult attest_training_phase(const PipelineManifest& manifest,
                                          Store& store);

/// Weights attestation over one artifact path, produced_by the trained
/// system. Raises KindError unless trained_system_id resolves to a
/// trained-system.
AttestationId attest_weights(const std::filesystem::path& weights_path,
                             const AttestationId& trained_system_id,
                             const std::string& name, Store& store,
                             const KeyPair& keypair,
                             std::optional<std::uint64_t> counter = std::nullopt);

/// Config attestation referencing existing weights.
AttestationId attest_config(const AttestationId& weights_id,
                            const std::map<std::string, std::string>& hyperparameters,
                            const std::map<std::string, std::string>& system_metadata,
                            const std::string& name, Store& store,
                            const KeyPair& keypair,
                            std::optional<std::uint64_t> counter = std::nullopt);

struct WeightsConfigResult {
  AttestationId weights;
  AttestationId config;
};

/// Weights attestation over the weights file, then a config referencing it.
WeightsConfigResult attest_weights_and_config(
    const std::filesystem::path& weights_path,
    const AttestationId& trained_system_id,
    const std::map<std::string, std::string>& hyperparameters,
    const std::map<std::string, std::string>& system_metadata, Store& store,
    const KeyPair& keypair, const std::string& name = "weights",
    std::optional<std::uint64_t> counter = std::nullopt);

/// Inferencing sbom + code attestations, then the inference-system.
AttestationId attest_deployment(const AttestationId& config_id,
                                const ManifestCode& inferencing_code,
                                Store& store, const KeyPair& keypair,
                                const std::string& name = "deployment",
                                std::optional<std::uint64_t> counter = std::nullopt);

/// Validation-report attestation over an external QA report file.
AttestationId attest_validation(const AttestationId& system_id,
                                const std::filesystem::path& report_path,
                                Verdict verdict, Store& store,
                                const KeyPair& keypair,
                                const std::string& name = "validation",
                                std::optional<std::uint64_t> counter = std::nullopt);

struct PipelineResult {
  TrainingPhaseResult training;
  WeightsConfigResult weights_config;
  AttestationId inference_system;
};

nlohmann::json pipeline_result_to_json(const PipelineResult& result);

/// The full lifecycle against existing artifact bytes: training phase,
/// weights + config, deployment. Requires manifest.weights_path.
PipelineResult run_pipeline(const PipelineManifest& manifest, Store& store);

/// Building blocks shared with the CLI.
AttestationId attest_data_path(const std::filesystem::path& path,
                               const std::string& name,
                               const std::string& label,
                               const std::string& license,
                               std::optional<TrainingRole> role,
                               const std::string& collection_method,
                               Store& store, const KeyPair& keypair,
                               std::optional<std::uint64_t> counter = std::nullopt,
                               const std::string& semver = "1.0.0");

AttestationId attest_code_path(const std::filesystem::path& path,
                               const std::string& name, CodeRole role,
                               std::optional<AttestationId> sbom_ref,
                               const std::string& license, Store& store,
                               const KeyPair& keypair,
                               std::optional<std::uint64_t> counter = std::nullopt);

AttestationId attest_pack(const std::vector<AttestationId>& member_ids,
                          const std::string& name, Store& store,
                          const KeyPair& keypair,
                          std::optional<std::uint64_t> counter = std::nullopt);

AttestationId attest_trained_system(const AttestationId& pack_id,
                                    const AttestationId& code_id,
                                    const std::string& label,
                                    const std::string& name, Store& store,
                                    const KeyPair& keypair,
                                    std::optional<std::uint64_t> counter = std::nullopt);

AttestationId attest_inference_system(const AttestationId& config_id,
                                      const AttestationId& code_id,
                                      const std::string& label,
                                      const std::string& name, Store& store,
                                      const KeyPair& keypair,
                                      std::optional<std::uint64_t> counter = std::nullopt);

}  // namespace taibom

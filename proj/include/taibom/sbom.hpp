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

#include <optional>
#include <string>
#include <vector>

#include "taibom/graph.hpp"
#include "taibom/store.hpp"

namespace taibom {

/// Optional fixed metadata for deterministic ingestion. When absent, the
/// version name comes from the document, the counter auto-increments
/// within the (issuer, name) series, and issued_at is the current time.
struct IngestOptions {
  std::optional<VersionInfo> version;
  std::optional<std::string> issued_at;
};

/// Parses a minimal SPDX JSON subset (top-level `packages` with name,
/// versionInfo, licenseConcluded, cpe/purl external refs), signs the
/// resulting sbom attestation, and stores it.
AttestationId ingest_spdx(const std::string& document, Store& store,
                          const KeyPair& keypair,
                          const IngestOptions& options = {});

/// Parses a minimal CycloneDX JSON subset (top-level `components` with
/// name, version, purl, licenses, embedded vulnerability ids).
AttestationId ingest_cyclonedx(const std::string& document, Store& store,
                               const KeyPair& keypair,
                               const IngestOptions& options = {});

/// Parses SBOM bytes per the named format.
AttestationId ingest_sbom(const std::string& document, SbomFormat format,
                          Store& store, const KeyPair& keypair,
                          const IngestOptions& options = {});

/// Per-record outcome of a feed ingest: valid records are upserted even
/// when other records in the same file are malformed.
struct FeedResult {
  std::size_t upserted{0};
  std::vector<std::pair<std::size_t, std::string>> errors;  // (index, what)
};

/// JSON array of vuln records; replaces by cve_id (idempotent upsert).
/// A non-array document raises FormatError outright.
FeedResult ingest_cve_feed(const std::string& feed, Store& store);

// Version-range grammar: exact "=X.Y.Z", half-open ">=A <B", wildcard "*".
struct VersionRange {
  enum class Form { Exact, HalfOpen, Any };
  Form form{Form::Any};
  std::string exact_text;                 // Exact
  std::array<std::uint64_t, 3> low{};     // HalfOpen
  std::array<std::uint64_t, 3> high{};    // HalfOpen
};

/// Raises FormatError when the expression is outside the grammar.
VersionRange parse_version_range(const std::string& expression);

/// True iff `version` satisfies the range. Empty versions never match;
/// non-semver versions match only Exact (string equality) and Any.
bool version_in_range(const VersionRange& range, const std::string& version);

struct ComponentMatch {
  AttestationId sbom_id;
  std::string component_name;
  std::string component_version;

  auto operator<=>(const ComponentMatch&) const = default;
};

/// A component matches iff its declared_cves contain the record's id, or
/// the package name equals the component name (case-sensitive) and the
/// component version satisfies the version range.
bool component_matches(const SbomComponent& component,
                       const VulnRecord& record);

/// All matching components across every stored sbom attestation.
std::vector<ComponentMatch> match_components(const VulnRecord& record,
                                             const Store& store);

struct ImpactReport {
  std::string cve_id;
  std::vector<ComponentMatch> matched_components;
  std::vector<AttestationId> affected_code;
  std::vector<std::pair<AttestationId, Kind>> affected_systems;
  // walks from a matched code attestation up to each affected system
  struct Path {
    AttestationId from;
    AttestationId to;
    std::vector<AttestationId> nodes;
  };
  std::vector<Path> propagation_paths;
};

nlohmann::json impact_report_to_json(const ImpactReport& report);

/// Forward closure from vulnerable code through builds-with / produces /
/// packaged-in / deployed-with / runs edges. Raises NotFound for a CVE id
/// that was never ingested.
ImpactReport impact(const std::string& cve_id, const Store& store);

}  // namespace taibom

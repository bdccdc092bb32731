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

#include "taibom/store.hpp"

namespace taibom {

/// Member-name-keyed comparison of two data-pack versions. The four
/// categories partition the union of both packs' member names.
struct PackDiff {
  struct Added {
    std::string name;
    std::string digest;
  };
  struct Removed {
    std::string name;
    std::string digest;
  };
  struct Modified {
    std::string name;
    std::string old_digest;
    std::string new_digest;
  };
  std::vector<Added> added;        // sorted by name
  std::vector<Removed> removed;    // sorted by name
  std::vector<Modified> modified;  // sorted by name
  std::uint64_t unchanged_count{0};
};

nlohmann::json pack_diff_to_json(const PackDiff& diff);

/// Cross-kind reuse of one content digest.
struct ReuseReport {
  std::string digest;
  struct Hit {
    AttestationId id;
    Kind kind;
    std::string name;
    VersionInfo version;
  };
  std::vector<Hit> hits;  // sorted by id
};

nlohmann::json reuse_report_to_json(const ReuseReport& report);

/// One version-series entry from audit_series.
enum class SeriesState { Pass, FailDigest, Unverifiable };

std::string series_state_name(SeriesState state);

struct SeriesEntry {
  AttestationId id;
  std::uint64_t counter{0};
  SeriesState state{SeriesState::Unverifiable};
  std::string content_root;
  std::string detail;
};

nlohmann::json series_to_json(const std::vector<SeriesEntry>& entries);

/// Compares pack_a to pack_b (a = old, b = new). Raises KindError when
/// either id is not a data-pack. Modified means: same member name,
/// different TrainingData content root.
PackDiff diff_packs(const AttestationId& pack_a_id,
                    const AttestationId& pack_b_id, const Store& store);

/// Every content-bearing attestation whose MerkleRoot.root equals the
/// digest (data, training-data, weights, code).
ReuseReport audit_reuse(const std::string& content_digest, const Store& store);

/// Verifies each version of the (issuer, name) series against on-disk
/// artifact bytes where locatable; missing artifacts are reported as
/// UNVERIFIABLE entries. Raises NotFound for an empty series.
std::vector<SeriesEntry> audit_series(
    const std::string& issuer_hex, const std::string& name, const Store& store,
    const std::optional<std::filesystem::path>& rehash_root = std::nullopt);

}  // namespace taibom

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
#include <optional>
#include <string>
#include <vector>

#include "taibom/model.hpp"

namespace taibom {

inline constexpr const char* kStoreLayoutVersion = "store/1";
inline constexpr const char* kStoreEnvVar = "TAIBOM_STORE";

/// A loadable trusted public key from keys/.
struct TrustedKey {
  Digest fingerprint;
  std::string scheme;
  std::vector<std::uint8_t> public_bytes;
};

/// One CVE entry from an ingested feed.
enum class Severity { Low, Medium, High, Critical, Unknown };

std::string severity_name(Severity severity);
std::optional<Severity> severity_from_name(const std::string& name);

struct AffectedPackage {
  std::string package_name;
  std::string version_range;

  auto operator<=>(const AffectedPackage&) const = default;
};

struct VulnRecord {
  std::string cve_id;
  Severity severity{Severity::Unknown};
  std::vector<std::string> cwe_ids;
  std::vector<AffectedPackage> affected;
  std::string published;  // RFC 3339, optional (empty when absent)

  auto operator<=>(const VulnRecord&) const = default;
};

nlohmann::json vuln_to_json(const VulnRecord& record);
VulnRecord vuln_from_json(const nlohmann::json& doc);

struct StoreAuditFinding {
  std::filesystem::path path;
  std::string message;
};

/// Content-addressed, append-only persistence rooted at one directory:
///
///   objects/xx/<64-hex>.taibom.json   attestation envelopes (2-hex fan-out)
///   revocations/<64-hex>.taibom.json  revocation envelopes
///   keys/<64-hex>.pub                 trusted public keys
///   vulns/<CVE-id>.json               ingested vulnerability records
///   index/                            derived, rebuildable lookup data
///
/// Readers never lock; writers take an advisory lock on .lock. A Store
/// instance is not thread-safe; open one instance per thread or process.
class Store {
 public:
  enum class LockMode { Wait, FailFast };

  /// Opens (creating the layout when missing).
  explicit Store(std::filesystem::path root, LockMode mode = LockMode::Wait);

  const std::filesystem::path& root() const { return root_; }

  /// Persists an envelope under its content-addressed id. Idempotent for
  /// identical envelopes. Raises VersionError when a different envelope
  /// already occupies the same (issuer, name, counter) slot, IntegrityError
  /// for id collisions with differing bytes or a failed signature
  /// self-check against a stored issuer key.
  AttestationId put(const Envelope& envelope);

  /// Loads and self-verifies: the file's recomputed attestation id must
  /// equal the requested id, else DigestMismatch. Unknown id -> nullopt.
  std::optional<Envelope> get(const AttestationId& id) const;

  /// Ids matching all given filters, ordered by (version.name,
  /// version.counter), ties by id.
  std::vector<AttestationId> find(std::optional<Kind> kind = std::nullopt,
                                  std::optional<std::string> issuer = std::nullopt,
                                  std::optional<std::string> name = std::nullopt) const;

  /// Largest version counter in the (issuer, name) series, 0 when empty.
  std::uint64_t max_counter(const std::string& issuer_hex,
                            const std::string& name) const;

  Digest add_trusted_key(std::span<const std::uint8_t> public_bytes,
                         const std::string& scheme);
  bool is_trusted(const Digest& fingerprint) const;
  bool is_trusted(const std::string& fingerprint_hex) const;
  std::optional<TrustedKey> trusted_key(const std::string& fingerprint_hex) const;
  std::vector<TrustedKey> trusted_keys() const;

  void put_vuln(const VulnRecord& record);
  std::optional<VulnRecord> get_vuln(const std::string& cve_id) const;
  std::vector<VulnRecord> vulns() const;

  /// Every stored attestation id (objects + revocations), sorted.
  std::vector<AttestationId> all_ids() const;

  /// All revocation envelopes currently stored.
  std::vector<Envelope> revocations() const;

  /// Recomputes every object file's id and every key's fingerprint.
  /// An empty result means the store is intact.
  std::vector<StoreAuditFinding> audit() const;

  /// Drops and rebuilds the derived index from objects/ and revocations/.
  void rebuild_index();

  /// Exclusive advisory write lock, re-entrant within this instance.
  class WriteLock {
   public:
    explicit WriteLock(Store& store);
    ~WriteLock();
    WriteLock(const WriteLock&) = delete;
    WriteLock& operator=(const WriteLock&) = delete;

   private:
    Store& store_;
  };

 private:
  friend class WriteLock;

  struct IndexEntry {
    Kind kind;
    std::string issuer;
    std::string name;
    std::uint64_t counter;
  };

  std::filesystem::path object_path(const AttestationId& id, Kind kind) const;
  std::optional<std::filesystem::path> locate(const AttestationId& id) const;
  std::map<AttestationId, IndexEntry> load_index() const;
  void save_index(const std::map<AttestationId, IndexEntry>& index) const;
  std::map<AttestationId, IndexEntry> scan_objects() const;

  void lock_acquire();
  void lock_release();

  std::filesystem::path root_;
  LockMode lock_mode_;
  int lock_fd_{-1};
  int lock_depth_{0};
};

}  // namespace taibom

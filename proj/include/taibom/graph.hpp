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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taibom/store.hpp"

namespace taibom {

/// Typed provenance edges. References always point from the derived
/// artifact to its source.
enum class EdgeRole {
  MemberOfPack,   // data-pack -> training-data
  TrainsOn,       // trained-system -> data-pack
  BuildsWith,     // trained-system -> training code
  Produces,       // weights -> trained-system
  PackagedIn,     // config -> weights
  DeployedWith,   // inference-system -> config
  Runs,           // inference-system -> inferencing code
  DescribesSbom,  // code -> sbom
  Validates,      // validation-report -> system
};

std::string edge_role_name(EdgeRole role);

struct TrustEdge {
  AttestationId from;
  AttestationId to;
  EdgeRole role;

  auto operator<=>(const TrustEdge&) const = default;
};

/// Outgoing typed references of one envelope, in payload field order.
std::vector<TrustEdge> outgoing_edges(const AttestationId& id,
                                      const Envelope& envelope);

enum class NodeState {
  Pass,
  FailSignature,
  FailDigest,
  Revoked,
  RevokedDependency,
  MissingRef,
  UntrustedKey,
  Structural,
};

std::string node_state_name(NodeState state);

struct NodeStatus {
  AttestationId id;
  NodeState state{NodeState::Pass};
  std::string detail;
};

struct VerificationReport {
  AttestationId target;
  std::vector<NodeStatus> nodes;  // sorted by id
  std::vector<TrustEdge> edges;   // sorted
  bool pass{false};
  // ref path from target to each non-PASS node, target first
  std::map<AttestationId, std::vector<AttestationId>> failure_paths;
};

nlohmann::json verification_report_to_json(const VerificationReport& report);

/// Transitive reference closure from one attestation.
struct GraphView {
  AttestationId target;
  std::map<AttestationId, Envelope> nodes;
  std::vector<TrustEdge> edges;       // sorted
  std::set<AttestationId> missing;    // dangling references
  std::set<AttestationId> corrupt;    // stored bytes fail the id self-check
};

/// Builds the closure; dangling references become placeholder entries in
/// `missing`. A reference cycle raises CycleError.
GraphView build_graph(const AttestationId& target_id, const Store& store);

/// End-to-end chain verification. For every node in the closure, checks
/// signature, issuer trust, revocations (direct and transitive),
/// structural validity, and (when rehash_root is given) recomputes content
/// digests for artifacts locatable through the local_path_hint annotation
/// or a file: location URI. Relative hints resolve against rehash_root.
VerificationReport verify_chain(
    const AttestationId& target_id, const Store& store,
    const std::optional<std::filesystem::path>& rehash_root = std::nullopt);

/// Deterministic machine- and human-readable flattening of the closure,
/// including validation reports that point at nodes inside it.
nlohmann::json trace_lineage(const AttestationId& target_id,
                             const Store& store);

/// DOT rendering of the same lineage for graph viewers.
std::string lineage_to_dot(const nlohmann::json& lineage);

/// Issues and stores a signed revocation for target_id. The signer must be
/// the target's issuer or a trusted key, else AuthorizationError.
AttestationId revoke(const AttestationId& target_id, const std::string& reason,
                     const KeyPair& keypair, Store& store,
                     const std::optional<std::string>& revoked_at = std::nullopt);

}  // namespace taibom

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

#include "taibom/graph.hpp"

#include <algorithm>
#include <deque>

#include "taibom/errors.hpp"

namespace taibom {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// BFS shortest reference path target -> node, both endpoints included.
std::vector<AttestationId> shortest_path(
    const AttestationId& from, const AttestationId& to,
    const std::map<AttestationId, std::vector<AttestationId>>& adjacency) {
  if (from == to) return {from};
  std::map<AttestationId, AttestationId> parent;
  std::deque<AttestationId> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    AttestationId cur = queue.front();
    queue.pop_front();
    auto it = adjacency.find(cur);
    if (it == adjacency.end()) continue;
    for (const auto& next : it->second) {
      if (parent.count(next)) continue;
      parent[next] = cur;
      if (next == to) {
        std::vector<AttestationId> path{to};
        AttestationId walk = to;
        while (walk != from) {
          walk = parent[walk];
          path.push_back(walk);
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(next);
    }
  }
  return {};
}

}  // namespace

std::string edge_role_name(EdgeRole role) {
  switch (role) {
    case EdgeRole::MemberOfPack: return "member-of-pack";
    case EdgeRole::TrainsOn: return "trains-on";
    case EdgeRole::BuildsWith: return "builds-with";
    case EdgeRole::Produces: return "produces";
    case EdgeRole::PackagedIn: return "packaged-in";
    case EdgeRole::DeployedWith: return "deployed-with";
    case EdgeRole::Runs: return "runs";
    case EdgeRole::DescribesSbom: return "describes-sbom";
    case EdgeRole::Validates: return "validates";
  }
  return "unknown";
}

std::string node_state_name(NodeState state) {
  switch (state) {
    case NodeState::Pass: return "PASS";
    case NodeState::FailSignature: return "FAIL_SIGNATURE";
    case NodeState::FailDigest: return "FAIL_DIGEST";
    case NodeState::Revoked: return "REVOKED";
    case NodeState::RevokedDependency: return "REVOKED_DEPENDENCY";
    case NodeState::MissingRef: return "MISSING_REF";
    case NodeState::UntrustedKey: return "UNTRUSTED_KEY";
    case NodeState::Structural: return "STRUCTURAL";
  }
  return "UNKNOWN";
}

std::vector<TrustEdge> outgoing_edges(const AttestationId& id,
                                      const Envelope& envelope) {
  std::vector<TrustEdge> edges;
  std::visit(
      Overloaded{
          [&](const DataPackPayload& p) {
            for (const auto& m : p.members) {
              edges.push_back({id, m.ref, EdgeRole::MemberOfPack});
            }
          },
          [&](const WeightsPayload& p) {
            edges.push_back({id, p.produced_by, EdgeRole::Produces});
          },
          [&](const CodePayload& p) {
            if (p.sbom_ref) {
              edges.push_back({id, *p.sbom_ref, EdgeRole::DescribesSbom});
            }
          },
          [&](const ConfigPayload& p) {
            edges.push_back({id, p.weights_ref, EdgeRole::PackagedIn});
          },
          [&](const TrainedSystemPayload& p) {
            edges.push_back({id, p.datapack_ref, EdgeRole::TrainsOn});
            edges.push_back({id, p.training_code_ref, EdgeRole::BuildsWith});
          },
          [&](const InferenceSystemPayload& p) {
            edges.push_back({id, p.config_ref, EdgeRole::DeployedWith});
            edges.push_back({id, p.inferencing_code_ref, EdgeRole::Runs});
          },
          [&](const ValidationReportPayload& p) {
            edges.push_back({id, p.system_ref, EdgeRole::Validates});
          },
          [&](const auto&) {},  // data, training-data, sbom, revocation
      },
      envelope.payload);
  return edges;
}

GraphView build_graph(const AttestationId& target_id, const Store& store) {
  GraphView view;
  view.target = target_id;

  // iterative DFS with an explicit on-path set for cycle detection
  std::set<AttestationId> on_path;
  std::set<AttestationId> done;

  struct Frame {
    AttestationId id;
    std::vector<TrustEdge> edges;
    std::size_t next{0};
  };
  std::vector<Frame> stack;

  auto enter = [&](const AttestationId& id) -> bool {
    if (done.count(id)) return false;
    if (on_path.count(id)) {
      throw CycleError("reference cycle detected at " + id);
    }
    std::optional<Envelope> env;
    try {
      env = store.get(id);
    } catch (const DigestMismatch&) {
      view.corrupt.insert(id);
      done.insert(id);
      return false;
    }
    if (!env) {
      view.missing.insert(id);
      done.insert(id);
      return false;
    }
    auto edges = outgoing_edges(id, *env);
    view.nodes.emplace(id, std::move(*env));
    for (const auto& e : edges) view.edges.push_back(e);
    on_path.insert(id);
    stack.push_back(Frame{id, std::move(edges)});
    return true;
  };

  enter(target_id);
  if (view.missing.count(target_id)) {
    throw NotFound("no such attestation: " + target_id);
  }
  while (!stack.empty()) {
    Frame& frame = stack.back();
    if (frame.next < frame.edges.size()) {
      AttestationId next = frame.edges[frame.next++].to;
      enter(next);
    } else {
      on_path.erase(frame.id);
      done.insert(frame.id);
      stack.pop_back();
    }
  }
  std::sort(view.edges.begin(), view.edges.end());
  view.edges.erase(std::unique(view.edges.begin(), view.edges.end()),
                   view.edges.end());
  return view;
}

VerificationReport verify_chain(const AttestationId& target_id,
                                const Store& store,
                                const std::optional<fs::path>& rehash_root) {
  GraphView view = build_graph(target_id, store);
  VerificationReport report;
  report.target = target_id;
  report.edges = view.edges;

  // revocations currently in force, by target
  std::map<AttestationId, AttestationId> revoked_by;
  for (const auto& rev : store.revocations()) {
    const auto& payload = std::get<RevocationPayload>(rev.payload);
    revoked_by.emplace(payload.target, attestation_id(rev));
  }

  std::map<AttestationId, std::vector<AttestationId>> adjacency;
  for (const auto& e : view.edges) adjacency[e.from].push_back(e.to);

  Resolver resolver = [&store](const AttestationId& id) {
    try {
      return store.get(id);
    } catch (const DigestMismatch&) {
      return std::optional<Envelope>{};
    }
  };

  // a corrupt key file must not abort verification; the report stays
  // complete and the issuer simply counts as untrusted
  auto lookup_key =
      [&store](const std::string& issuer) -> std::optional<TrustedKey> {
    try {
      return store.trusted_key(issuer);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  // pass 1: per-node checks
  std::map<AttestationId, NodeStatus> statuses;
  for (const auto& [id, env] : view.nodes) {
    NodeStatus status{id, NodeState::Pass, ""};
    auto key = lookup_key(env.issuer.value);
    if (key && !envelope_signature_valid(env, key->public_bytes, key->scheme)) {
      status = {id, NodeState::FailSignature,
                "signature does not verify against issuer key"};
    } else if (!key) {
      status = {id, NodeState::UntrustedKey,
                "issuer " + env.issuer.value + " is not in the trust store"};
    } else if (auto rev = revoked_by.find(id); rev != revoked_by.end()) {
      status = {id, NodeState::Revoked, "revoked by " + rev->second};
    }
    statuses.emplace(id, std::move(status));
  }
  for (const auto& id : view.missing) {
    statuses.emplace(
        id, NodeStatus{id, NodeState::MissingRef,
                       "referenced attestation is not in the store"});
  }
  for (const auto& id : view.corrupt) {
    statuses.emplace(id,
                     NodeStatus{id, NodeState::FailDigest,
                                "stored bytes do not hash to the filename id"});
  }

  // pass 2: transitive revocation. A node whose reference closure contains
  // any revoked node is tainted.
  std::set<AttestationId> revoked_nodes;
  for (const auto& [id, status] : statuses) {
    if (status.state == NodeState::Revoked) revoked_nodes.insert(id);
  }
  if (!revoked_nodes.empty()) {
    // reverse reachability from the revoked set
    std::map<AttestationId, std::vector<AttestationId>> reverse;
    for (const auto& e : view.edges) reverse[e.to].push_back(e.from);
    std::deque<AttestationId> queue(revoked_nodes.begin(),
                                    revoked_nodes.end());
    std::set<AttestationId> tainted;
    while (!queue.empty()) {
      AttestationId cur = queue.front();
      queue.pop_front();
      for (const auto& up : reverse[cur]) {
        if (tainted.insert(up).second) queue.push_back(up);
      }
    }
    for (const auto& id : tainted) {
      auto& status = statuses.at(id);
      if (status.state == NodeState::Pass) {
        status.state = NodeState::RevokedDependency;
        status.detail = "a transitive dependency is revoked";
      }
    }
  }

  // pass 3: structural validation, then content rehash
  for (const auto& [id, env] : view.nodes) {
    auto& status = statuses.at(id);
    if (status.state != NodeState::Pass) continue;
    auto violations = validate_payload(env, resolver);
    if (!violations.empty()) {
      status.state = NodeState::Structural;
      status.detail = violations.front().field + ": " +
                      violations.front().message;
      if (violations.size() > 1) {
        status.detail +=
            " (+" + std::to_string(violations.size() - 1) + " more)";
      }
      continue;
    }
    if (rehash_root) {
      const MerkleRoot* expected = envelope_content(env);
      if (!expected) continue;
      auto path = envelope_artifact_path(env, rehash_root);
      if (!path) continue;  // no locatable artifact, digest check skipped
      if (!fs::exists(*path)) {
        status.state = NodeState::FailDigest;
        status.detail = "artifact missing at " + path->string();
        continue;
      }
      try {
        MerkleRoot actual = merkle_path(*path, expected->chunk_size);
        if (actual.root != expected->root) {
          status.state = NodeState::FailDigest;
          status.detail = "recomputed root " + actual.root.value +
                          " differs from signed root " + expected->root.value;
        } else if (const DataPayload* data = envelope_data_fields(env);
                   data && artifact_byte_count(*path) != data->byte_count) {
          status.state = NodeState::FailDigest;
          status.detail = "artifact holds " +
                          std::to_string(artifact_byte_count(*path)) +
                          " bytes, signed byte_count is " +
                          std::to_string(data->byte_count);
        }
      } catch (const Error& err) {
        status.state = NodeState::FailDigest;
        status.detail = err.what();
      }
    }
  }

  report.pass = true;
  for (const auto& [id, status] : statuses) {
    if (status.state != NodeState::Pass) {
      report.pass = false;
      auto path = shortest_path(target_id, id, adjacency);
      report.failure_paths.emplace(id, std::move(path));
    }
    report.nodes.push_back(status);
  }
  std::sort(report.nodes.begin(), report.nodes.end(),
            [](const NodeStatus& a, const NodeStatus& b) { return a.id < b.id; });
  return report;
}

json verification_report_to_json(const VerificationReport& report) {
  json nodes = json::array();
  for (const auto& n : report.nodes) {
    json nj{{"id", n.id}, {"status", node_state_name(n.state)}};
    if (!n.detail.empty()) nj["detail"] = n.detail;
    nodes.push_back(nj);
  }
  json edges = json::array();
  for (const auto& e : report.edges) {
    edges.push_back(json{
        {"from", e.from}, {"role", edge_role_name(e.role)}, {"to", e.to}});
  }
  json paths = json::object();
  for (const auto& [id, path] : report.failure_paths) {
    paths[id] = path;
  }
  return json{{"target", report.target},
              {"verdict", report.pass ? "PASS" : "FAIL"},
              {"nodes", nodes},
              {"edges", edges},
              {"failure_paths", paths}};
}

namespace {

// Kahn's algorithm, target first, ties broken by id.
std::vector<AttestationId> topological_order(const GraphView& view) {
  std::set<AttestationId> all;
  for (const auto& [id, env] : view.nodes) {
    (void)env;
    all.insert(id);
  }
  for (const auto& id : view.missing) all.insert(id);
  std::map<AttestationId, int> indegree;
  std::map<AttestationId, std::vector<AttestationId>> adjacency;
  for (const auto& id : all) indegree[id] = 0;
  for (const auto& e : view.edges) {
    adjacency[e.from].push_back(e.to);
    ++indegree[e.to];
  }
  std::set<AttestationId> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.insert(id);
  }
  std::vector<AttestationId> order;
  while (!ready.empty()) {
    AttestationId id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& next : adjacency[id]) {
      if (--indegree[next] == 0) ready.insert(next);
    }
  }
  return order;
}

}  // namespace

json trace_lineage(const AttestationId& target_id, const Store& store) {
  GraphView view = build_graph(target_id, store);
  auto order = topological_order(view);

  json nodes = json::array();
  json datasets = json::array();
  json code = json::array();

  for (const auto& id : order) {
    auto it = view.nodes.find(id);
    if (it == view.nodes.end()) {
      nodes.push_back(json{{"id", id}, {"missing", true}});
      continue;
    }
    const Envelope& env = it->second;
    json nj{{"id", id},
            {"kind", kind_name(env.kind)},
            {"name", env.version.name},
            {"semver", env.version.semver},
            {"counter", env.version.counter},
            {"issuer", env.issuer.value},
            {"issued_at", env.issued_at}};
    if (const DataPayload* p = envelope_data_fields(env)) {
      nj["content_root"] = p->content.root.value;
      nj["byte_count"] = p->byte_count;
      nj["location"] = p->location;
      if (p->license) nj["license"] = p->license->identifier;
    } else if (env.kind == Kind::Code) {
      const auto& p = std::get<CodePayload>(env.payload);
      nj["content_root"] = p.content.root.value;
      nj["location"] = p.location;
      nj["code_role"] = code_role_name(p.code_role);
      if (p.license) nj["license"] = p.license->identifier;
    } else if (env.kind == Kind::Sbom) {
      const auto& p = std::get<SbomPayload>(env.payload);
      nj["source_format"] = sbom_format_name(p.source_format);
      nj["component_count"] = p.components.size();
    } else if (env.kind == Kind::ValidationReport) {
      nj["verdict"] =
          verdict_name(std::get<ValidationReportPayload>(env.payload).verdict);
    }
    nodes.push_back(nj);

    if (env.kind == Kind::Data || env.kind == Kind::TrainingData) {
      const DataPayload& p = *envelope_data_fields(env);
      json dj{{"id", id},
              {"name", p.name},
              {"digest", p.content.root.value},
              {"byte_count", p.byte_count},
              {"location", p.location},
              {"issued_at", env.issued_at},
              {"version", env.version.semver},
              {"counter", env.version.counter}};
      dj["license"] = p.license ? json(p.license->identifier) : json(nullptr);
      if (env.kind == Kind::TrainingData) {
        const auto& tp = std::get<TrainingDataPayload>(env.payload);
        dj["intended_role"] = training_role_name(tp.intended_role);
      }
      datasets.push_back(dj);
    } else if (env.kind == Kind::Code) {
      const auto& p = std::get<CodePayload>(env.payload);
      json cj{{"id", id},
              {"name", p.name},
              {"digest", p.content.root.value},
              {"code_role", code_role_name(p.code_role)}};
      if (p.sbom_ref) {
        cj["sbom_ref"] = *p.sbom_ref;
        if (auto sbom = view.nodes.find(*p.sbom_ref);
            sbom != view.nodes.end() && sbom->second.kind == Kind::Sbom) {
          json comps = json::array();
          for (const auto& c :
               std::get<SbomPayload>(sbom->second.payload).components) {
            comps.push_back(json{{"name", c.name}, {"version", c.version}});
          }
          cj["sbom_components"] = comps;
        }
      }
      code.push_back(cj);
    }
  }

  json edges = json::array();
  for (const auto& e : view.edges) {
    edges.push_back(json{
        {"from", e.from}, {"role", edge_role_name(e.role)}, {"to", e.to}});
  }

  // validation reports point at systems, so walk the store for reports
  // whose subject sits inside this closure
  json validations = json::array();
  for (const auto& vid : store.find(Kind::ValidationReport)) {
    auto env = store.get(vid);
    if (!env) continue;
    const auto& p = std::get<ValidationReportPayload>(env->payload);
    if (view.nodes.count(p.system_ref)) {
      validations.push_back(json{{"id", vid},
                                 {"system_ref", p.system_ref},
                                 {"verdict", verdict_name(p.verdict)},
                                 {"issued_at", env->issued_at}});
    }
  }

  return json{{"schema", "taibom-lineage/1"},
              {"target", target_id},
              {"nodes", nodes},
              {"edges", edges},
              {"datasets", datasets},
              {"code", code},
              {"validations", validations}};
}

std::string lineage_to_dot(const json& lineage) {
  std::string out = "digraph taibom {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& n : lineage.at("nodes")) {
    std::string id = n.at("id").get<std::string>();
    std::string label;
    if (n.contains("missing")) {
      label = "missing\\n" + id.substr(0, 12);
    } else {
      label = n.at("kind").get<std::string>() + "\\n" +
              n.at("name").get<std::string>() + "@" +
              std::to_string(n.at("counter").get<std::uint64_t>());
    }
    out += "  \"" + id + "\" [label=\"" + label + "\"];\n";
  }
  for (const auto& e : lineage.at("edges")) {
    out += "  \"" + e.at("from").get<std::string>() + "\" -> \"" +
           e.at("to").get<std::string>() + "\" [label=\"" +
           e.at("role").get<std::string>() + "\"];\n";
  }
  out += "}\n";
  return out;
}

AttestationId revoke(const AttestationId& target_id, const std::string& reason,
                     const KeyPair& keypair, Store& store,
                     const std::optional<std::string>& revoked_at) {
  auto target = store.get(target_id);
  if (!target) throw NotFound("no such attestation: " + target_id);
  bool is_issuer = target->issuer == keypair.fingerprint;
  if (!is_issuer && !store.is_trusted(keypair.fingerprint)) {
    throw AuthorizationError(
        "revocation requires the target's issuer or a trusted key");
  }
  std::string when = revoked_at.value_or(now_utc());
  Envelope rev;
  rev.kind = Kind::Revocation;
  rev.payload = RevocationPayload{target_id, reason, when};
  rev.version.name = "revoke:" + target_id.substr(0, 12);
  rev.version.semver = "1.0.0";
  rev.version.counter =
      store.max_counter(keypair.fingerprint.value, rev.version.name) + 1;
  rev.issued_at = when;
  sign_envelope(rev, keypair);
  return store.put(rev);
}

}  // namespace taibom

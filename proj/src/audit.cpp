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

#include "taibom/audit.hpp"

#include <algorithm>
#include <map>

#include "taibom/errors.hpp"

namespace taibom {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

DataPackPayload load_pack(const AttestationId& id, const Store& store) {
  auto env = store.get(id);
  if (!env) throw NotFound("no such attestation: " + id);
  if (env->kind != Kind::DataPack) {
    throw KindError("expected a data-pack attestation, found " +
                    kind_name(env->kind) + ": " + id);
  }
  return std::get<DataPackPayload>(std::move(env->payload));
}

// content root of a pack member's training-data attestation
std::string member_digest(const PackMember& member, const Store& store) {
  auto env = store.get(member.ref);
  if (!env) throw NotFound("pack member '" + member.name +
                           "' references missing attestation " + member.ref);
  if (env->kind != Kind::TrainingData) {
    throw KindError("pack member '" + member.name + "' references a " +
                    kind_name(env->kind) + " attestation");
  }
  return std::get<TrainingDataPayload>(env->payload).content.root.value;
}

}  // namespace

std::string series_state_name(SeriesState state) {
  switch (state) {
    case SeriesState::Pass: return "PASS";
    case SeriesState::FailDigest: return "FAIL_DIGEST";
    case SeriesState::Unverifiable: return "UNVERIFIABLE";
  }
  return "UNVERIFIABLE";
}

PackDiff diff_packs(const AttestationId& pack_a_id,
                    const AttestationId& pack_b_id, const Store& store) {
  const DataPackPayload a = load_pack(pack_a_id, store);
  const DataPackPayload b = load_pack(pack_b_id, store);

  std::map<std::string, std::string> a_digests;
  std::map<std::string, std::string> b_digests;
  for (const auto& m : a.members) a_digests[m.name] = member_digest(m, store);
  for (const auto& m : b.members) b_digests[m.name] = member_digest(m, store);

  PackDiff diff;
  for (const auto& [name, digest] : a_digests) {
    auto in_b = b_digests.find(name);
    if (in_b == b_digests.end()) {
      diff.removed.push_back({name, digest});
    } else if (in_b->second != digest) {
      diff.modified.push_back({name, digest, in_b->second});
    } else {
      ++diff.unchanged_count;
    }
  }
  for (const auto& [name, digest] : b_digests) {
    if (!a_digests.count(name)) diff.added.push_back({name, digest});
  }
  // std::map iteration already yields name order
  return diff;
}

json pack_diff_to_json(const PackDiff& diff) {
  json added = json::array();
  for (const auto& a : diff.added) {
    added.push_back(json{{"name", a.name}, {"digest", a.digest}});
  }
  json removed = json::array();
  for (const auto& r : diff.removed) {
    removed.push_back(json{{"name", r.name}, {"digest", r.digest}});
  }
  json modified = json::array();
  for (const auto& m : diff.modified) {
    modified.push_back(json{{"name", m.name},
                            {"old_digest", m.old_digest},
                            {"new_digest", m.new_digest}});
  }
  return json{{"added", added},
              {"removed", removed},
              {"modified", modified},
              {"unchanged_count", diff.unchanged_count}};
}

ReuseReport audit_reuse(const std::string& content_digest,
                        const Store& store) {
  ReuseReport report;
  report.digest = content_digest;
  for (const auto& id : store.all_ids()) {
    std::optional<Envelope> env;
    try {
      env = store.get(id);
    } catch (const DigestMismatch&) {
      continue;  // corrupt objects are audit-store's concern
    }
    if (!env) continue;
    const MerkleRoot* content = envelope_content(*env);
    if (content && content->root.value == content_digest) {
      report.hits.push_back(
          {id, env->kind, env->version.name, env->version});
    }
  }
  std::sort(report.hits.begin(), report.hits.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return report;
}

json reuse_report_to_json(const ReuseReport& report) {
  json hits = json::array();
  for (const auto& h : report.hits) {
    hits.push_back(json{{"id", h.id},
                        {"kind", kind_name(h.kind)},
                        {"name", h.name},
                        {"semver", h.version.semver},
                        {"counter", h.version.counter}});
  }
  return json{{"digest", report.digest},
              {"referencing_attestations", hits}};
}

std::vector<SeriesEntry> audit_series(
    const std::string& issuer_hex, const std::string& name, const Store& store,
    const std::optional<fs::path>& rehash_root) {
  auto ids = store.find(std::nullopt, issuer_hex, name);
  if (ids.empty()) {
    throw NotFound("no attestations in series (" + issuer_hex + ", " + name +
                   ")");
  }
  std::vector<SeriesEntry> entries;
  for (const auto& id : ids) {
    SeriesEntry entry;
    entry.id = id;
    std::optional<Envelope> env;
    try {
      env = store.get(id);
    } catch (const DigestMismatch& e) {
      entry.state = SeriesState::FailDigest;
      entry.detail = e.what();
      entries.push_back(std::move(entry));
      continue;
    }
    if (!env) continue;
    entry.counter = env->version.counter;
    const MerkleRoot* content = envelope_content(*env);
    if (!content) {
      entry.state = SeriesState::Unverifiable;
      entry.detail = "attestation carries no content root";
      entries.push_back(std::move(entry));
      continue;
    }
    entry.content_root = content->root.value;
    auto path = envelope_artifact_path(*env, rehash_root);
    if (!path || !fs::exists(*path)) {
      entry.state = SeriesState::Unverifiable;
      entry.detail = path ? "artifact missing at " + path->string()
                          : "no locatable artifact";
      entries.push_back(std::move(entry));
      continue;
    }
    try {
      MerkleRoot actual = merkle_path(*path, content->chunk_size);
      if (actual.root == content->root) {
        entry.state = SeriesState::Pass;
      } else {
        entry.state = SeriesState::FailDigest;
        entry.detail = "recomputed root " + actual.root.value +
                       " differs from signed root " + content->root.value;
      }
    } catch (const Error& err) {
      entry.state = SeriesState::Unverifiable;
      entry.detail = err.what();
    }
    entries.push_back(std::move(entry));
  }
  // find() already orders by (name, counter)
  return entries;
}

json series_to_json(const std::vector<SeriesEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) {
    json ej{{"id", e.id},
            {"counter", e.counter},
            {"status", series_state_name(e.state)}};
    if (!e.content_root.empty()) ej["content_root"] = e.content_root;
    if (!e.detail.empty()) ej["detail"] = e.detail;
    out.push_back(ej);
  }
  return out;
}

}  // namespace taibom

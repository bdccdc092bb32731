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

#include "taibom/sbom.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "taibom/errors.hpp"

namespace taibom {

using nlohmann::json;

namespace {

json parse_document(const std::string& document, const char* what) {
  try {
    return json::parse(document);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

std::string json_string_or(const json& j, const char* key,
                           const std::string& fallback) {
  if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
  return fallback;
}

AttestationId store_sbom(SbomPayload payload, const std::string& doc_name,
                         Store& store, const KeyPair& keypair,
                         const IngestOptions& options) {
  Envelope env;
  env.kind = Kind::Sbom;
  env.payload = std::move(payload);
  if (options.version) {
    env.version = *options.version;
  } else {
    env.version.name = doc_name;
    env.version.semver = "1.0.0";
    env.version.counter =
        store.max_counter(keypair.fingerprint.value, doc_name) + 1;
  }
  env.issued_at = options.issued_at.value_or(now_utc());
  sign_envelope(env, keypair);
  return store.put(env);
}

// SPDX externalRefs carry cpe/purl coordinates:
//   {"referenceType": "cpe23Type", "referenceLocator": "cpe:2.3:..."}
//   {"referenceType": "purl", "referenceLocator": "pkg:..."}
void read_spdx_external_refs(const json& package, SbomComponent& component) {
  if (!package.contains("externalRefs") || !package["externalRefs"].is_array()) {
    return;
  }
  for (const auto& ref : package["externalRefs"]) {
    if (!ref.is_object()) continue;
    std::string type = json_string_or(ref, "referenceType", "");
    std::string locator = json_string_or(ref, "referenceLocator", "");
    if (locator.empty()) continue;
    if (type.find("cpe") != std::string::npos && !component.cpe) {
      component.cpe = locator;
    } else if (type == "purl" && !component.purl) {
      component.purl = locator;
    }
  }
}

std::optional<LicenseInfo> license_from_name(const std::string& name) {
  if (name.empty() || name == "NOASSERTION" || name == "NONE") {
    return std::nullopt;
  }
  return LicenseInfo{name, std::nullopt};
}

}  // namespace

AttestationId ingest_spdx(const std::string& document, Store& store,
                          const KeyPair& keypair,
                          const IngestOptions& options) {
  json doc = parse_document(document, "spdx");
  if (!doc.is_object() || !doc.contains("packages") ||
      !doc["packages"].is_array()) {
    throw FormatError("spdx: missing top-level packages array");
  }
  SbomPayload payload;
  payload.source_format = SbomFormat::SpdxJson;
  payload.document_digest = hash_bytes(document);
  std::size_t index = 0;
  for (const auto& package : doc["packages"]) {
    if (!package.is_object() || !package.contains("name") ||
        !package["name"].is_string()) {
      throw FormatError("spdx: packages[" + std::to_string(index) +
                        "] missing name");
    }
    SbomComponent component;
    component.name = package["name"].get<std::string>();
    component.version = json_string_or(package, "versionInfo", "");
    component.license =
        license_from_name(json_string_or(package, "licenseConcluded", ""));
    read_spdx_external_refs(package, component);
    payload.components.push_back(std::move(component));
    ++index;
  }
  std::string doc_name = json_string_or(
      doc, "name", "sbom-" + payload.document_digest.value.substr(0, 12));
  return store_sbom(std::move(payload), doc_name, store, keypair, options);
}

AttestationId ingest_cyclonedx(const std::string& document, Store& store,
                               const KeyPair& keypair,
                               const IngestOptions& options) {
  json doc = parse_document(document, "cyclonedx");
  if (!doc.is_object() || !doc.contains("components") ||
      !doc["components"].is_array()) {
    throw FormatError("cyclonedx: missing top-level components array");
  }
  SbomPayload payload;
  payload.source_format = SbomFormat::CycloneDxJson;
  payload.document_digest = hash_bytes(document);

  std::map<std::string, std::size_t> by_bom_ref;
  std::size_t index = 0;
  for (const auto& comp : doc["components"]) {
    if (!comp.is_object() || !comp.contains("name") ||
        !comp["name"].is_string()) {
      throw FormatError("cyclonedx: components[" + std::to_string(index) +
                        "] missing name");
    }
    SbomComponent component;
    component.name = comp["name"].get<std::string>();
    component.version = json_string_or(comp, "version", "");
    if (comp.contains("purl") && comp["purl"].is_string()) {
      component.purl = comp["purl"].get<std::string>();
    }
    if (comp.contains("cpe") && comp["cpe"].is_string()) {
      component.cpe = comp["cpe"].get<std::string>();
    }
    // licenses: [{"license": {"id": ...}}] or [{"expression": ...}]
    if (comp.contains("licenses") && comp["licenses"].is_array()) {
      for (const auto& lic : comp["licenses"]) {
        if (!lic.is_object()) continue;
        std::string id;
        if (lic.contains("license") && lic["license"].is_object()) {
          id = json_string_or(lic["license"], "id",
                              json_string_or(lic["license"], "name", ""));
        } else {
          id = json_string_or(lic, "expression", "");
        }
        if (auto license = license_from_name(id)) {
          component.license = std::move(license);
          break;
        }
      }
    }
    // component-embedded vulnerability ids
    if (comp.contains("vulnerabilities") && comp["vulnerabilities"].is_array()) {
      for (const auto& vuln : comp["vulnerabilities"]) {
        std::string id = json_string_or(vuln, "id", "");
        if (!id.empty()) component.declared_cves.push_back(id);
      }
    }
    if (comp.contains("bom-ref") && comp["bom-ref"].is_string()) {
      by_bom_ref[comp["bom-ref"].get<std::string>()] = index;
    }
    payload.components.push_back(std::move(component));
    ++index;
  }

  // top-level vulnerabilities with affects[].ref pointing at bom-refs
  if (doc.contains("vulnerabilities") && doc["vulnerabilities"].is_array()) {
    for (const auto& vuln : doc["vulnerabilities"]) {
      std::string id = json_string_or(vuln, "id", "");
      if (id.empty() || !vuln.contains("affects") ||
          !vuln["affects"].is_array()) {
        continue;
      }
      for (const auto& affect : vuln["affects"]) {
        std::string ref = json_string_or(affect, "ref", "");
        auto hit = by_bom_ref.find(ref);
        if (hit == by_bom_ref.end()) continue;
        auto& cves = payload.components[hit->second].declared_cves;
        if (std::find(cves.begin(), cves.end(), id) == cves.end()) {
          cves.push_back(id);
        }
      }
    }
  }

  std::string doc_name = "sbom-" + payload.document_digest.value.substr(0, 12);
  if (doc.contains("metadata") && doc["metadata"].is_object() &&
      doc["metadata"].contains("component") &&
      doc["metadata"]["component"].is_object()) {
    doc_name = json_string_or(doc["metadata"]["component"], "name", doc_name);
  }
  return store_sbom(std::move(payload), doc_name, store, keypair, options);
}

AttestationId ingest_sbom(const std::string& document, SbomFormat format,
                          Store& store, const KeyPair& keypair,
                          const IngestOptions& options) {
  switch (format) {
    case SbomFormat::SpdxJson:
      return ingest_spdx(document, store, keypair, options);
    case SbomFormat::CycloneDxJson:
      return ingest_cyclonedx(document, store, keypair, options);
    case SbomFormat::Native:
      throw FormatError("native sboms are produced, not ingested");
  }
  throw FormatError("unknown sbom format");
}

FeedResult ingest_cve_feed(const std::string& feed, Store& store) {
  json doc = parse_document(feed, "cve feed");
  if (!doc.is_array()) {
    throw FormatError("cve feed: expected a JSON array of records");
  }
  FeedResult result;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      VulnRecord record = vuln_from_json(doc[i]);
      if (!is_valid_cve_id(record.cve_id)) {
        throw FormatError("invalid cve_id '" + record.cve_id + "'");
      }
      for (const auto& cwe : record.cwe_ids) {
        if (!is_valid_cwe_id(cwe)) {
          throw FormatError("invalid cwe id '" + cwe + "'");
        }
      }
      for (const auto& a : record.affected) {
        parse_version_range(a.version_range);
      }
      if (!record.published.empty() && !is_valid_timestamp(record.published)) {
        throw FormatError("published is not an RFC 3339 UTC time");
      }
      store.put_vuln(record);
      ++result.upserted;
    } catch (const FormatError& e) {
      result.errors.emplace_back(i, e.what());
    }
  }
  return result;
}

VersionRange parse_version_range(const std::string& expression) {
  VersionRange range;
  if (expression == "*") {
    range.form = VersionRange::Form::Any;
    return range;
  }
  if (!expression.empty() && expression[0] == '=') {
    std::string text = expression.substr(1);
    if (!parse_semver(text)) {
      throw FormatError("version range '=' needs X.Y.Z, got: " + expression);
    }
    range.form = VersionRange::Form::Exact;
    range.exact_text = text;
    return range;
  }
  if (expression.rfind(">=", 0) == 0) {
    auto space = expression.find(' ');
    if (space == std::string::npos) {
      throw FormatError("half-open range needs '>=A <B', got: " + expression);
    }
    std::string low_text = expression.substr(2, space - 2);
    std::string rest = expression.substr(space + 1);
    if (rest.rfind("<", 0) != 0) {
      throw FormatError("half-open range needs '>=A <B', got: " + expression);
    }
    std::string high_text = rest.substr(1);
    auto low = parse_semver(low_text);
    auto high = parse_semver(high_text);
    if (!low || !high) {
      throw FormatError("half-open range bounds must be X.Y.Z, got: " +
                        expression);
    }
    range.form = VersionRange::Form::HalfOpen;
    range.low = *low;
    range.high = *high;
    return range;
  }
  throw FormatError("unsupported version range: " + expression);
}

bool version_in_range(const VersionRange& range, const std::string& version) {
  if (version.empty()) return false;  // versionless components never match
  switch (range.form) {
    case VersionRange::Form::Any:
      return true;
    case VersionRange::Form::Exact:
      return version == range.exact_text;
    case VersionRange::Form::HalfOpen: {
      auto v = parse_semver(version);
      if (!v) return false;
      return *v >= range.low && *v < range.high;
    }
  }
  return false;
}

bool component_matches(const SbomComponent& component,
                       const VulnRecord& record) {
  if (std::find(component.declared_cves.begin(), component.declared_cves.end(),
                record.cve_id) != component.declared_cves.end()) {
    return true;
  }
  for (const auto& affected : record.affected) {
    if (affected.package_name != component.name) continue;
    VersionRange range;
    try {
      range = parse_version_range(affected.version_range);
    } catch (const FormatError&) {
      continue;  // unparseable range entries never match
    }
    if (version_in_range(range, component.version)) return true;
  }
  return false;
}

std::vector<ComponentMatch> match_components(const VulnRecord& record,
                                             const Store& store) {
  std::vector<ComponentMatch> matches;
  for (const auto& sbom_id : store.find(Kind::Sbom)) {
    auto env = store.get(sbom_id);
    if (!env) continue;
    const auto& payload = std::get<SbomPayload>(env->payload);
    for (const auto& component : payload.components) {
      if (component_matches(component, record)) {
        matches.push_back({sbom_id, component.name, component.version});
      }
    }
  }
  std::sort(matches.begin(), matches.end());
  matches.erase(std::unique(matches.begin(), matches.end()), matches.end());
  return matches;
}

ImpactReport impact(const std::string& cve_id, const Store& store) {
  auto record = store.get_vuln(cve_id);
  if (!record) throw NotFound("cve feed record not ingested: " + cve_id);

  ImpactReport report;
  report.cve_id = cve_id;
  report.matched_components = match_components(*record, store);

  std::set<AttestationId> matched_sboms;
  for (const auto& m : report.matched_components) {
    matched_sboms.insert(m.sbom_id);
  }

  // full store graph, reverse adjacency restricted to lifecycle roles
  std::map<AttestationId, Kind> kinds;
  std::map<AttestationId, std::vector<AttestationId>> reverse;
  std::set<AttestationId> affected_code;
  for (const auto& id : store.all_ids()) {
    std::optional<Envelope> env;
    try {
      env = store.get(id);
    } catch (const DigestMismatch&) {
      continue;
    }
    if (!env) continue;
    kinds[id] = env->kind;
    for (const auto& edge : outgoing_edges(id, *env)) {
      switch (edge.role) {
        case EdgeRole::BuildsWith:
        case EdgeRole::Produces:
        case EdgeRole::PackagedIn:
        case EdgeRole::DeployedWith:
        case EdgeRole::Runs:
          reverse[edge.to].push_back(edge.from);
          break;
        case EdgeRole::DescribesSbom:
          if (matched_sboms.count(edge.to)) affected_code.insert(id);
          break;
        default:
          break;
      }
    }
  }
  report.affected_code.assign(affected_code.begin(), affected_code.end());

  auto is_system_kind = [](Kind k) {
    return k == Kind::TrainedSystem || k == Kind::InferenceSystem ||
           k == Kind::Weights || k == Kind::Config;
  };

  std::set<std::pair<AttestationId, Kind>> systems;
  for (const auto& code_id : report.affected_code) {
    // BFS upward from the vulnerable code, tracking parents for paths
    std::map<AttestationId, AttestationId> parent;
    std::deque<AttestationId> queue{code_id};
    parent[code_id] = code_id;
    while (!queue.empty()) {
      AttestationId cur = queue.front();
      queue.pop_front();
      auto up = reverse.find(cur);
      if (up == reverse.end()) continue;
      for (const auto& next : up->second) {
        if (parent.count(next)) continue;
        parent[next] = cur;
        queue.push_back(next);
      }
    }
    for (const auto& [reached, via] : parent) {
      (void)via;
      if (reached == code_id || !is_system_kind(kinds[reached])) continue;
      systems.insert({reached, kinds[reached]});
      ImpactReport::Path path;
      path.from = code_id;
      path.to = reached;
      AttestationId walk = reached;
      while (walk != code_id) {
        path.nodes.push_back(walk);
        walk = parent[walk];
      }
      path.nodes.push_back(code_id);
      std::reverse(path.nodes.begin(), path.nodes.end());
      report.propagation_paths.push_back(std::move(path));
    }
  }
  report.affected_systems.assign(systems.begin(), systems.end());
  std::sort(report.propagation_paths.begin(), report.propagation_paths.end(),
            [](const auto& a, const auto& b) {
              return std::tie(a.from, a.to) < std::tie(b.from, b.to);
            });
  return report;
}

json impact_report_to_json(const ImpactReport& report) {
  json matched = json::array();
  for (const auto& m : report.matched_components) {
    matched.push_back(json{{"sbom_id", m.sbom_id},
                           {"name", m.component_name},
                           {"version", m.component_version}});
  }
  json systems = json::array();
  for (const auto& [id, kind] : report.affected_systems) {
    systems.push_back(json{{"id", id}, {"kind", kind_name(kind)}});
  }
  json paths = json::array();
  for (const auto& p : report.propagation_paths) {
    paths.push_back(json{{"from", p.from}, {"to", p.to}, {"path", p.nodes}});
  }
  return json{{"cve_id", report.cve_id},
              {"matched_components", matched},
              {"affected_code", report.affected_code},
              {"affected_systems", systems},
              {"propagation_paths", paths}};
}

}  // namespace taibom

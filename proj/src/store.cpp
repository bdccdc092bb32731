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

#include "taibom/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "taibom/errors.hpp"

namespace taibom {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out.str();
}

// temp + rename so readers never observe a partial file
void write_file_atomic(const fs::path& path, const std::string& data) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write: " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

}  // namespace

std::string severity_name(Severity severity) {
  switch (severity) {
    case Severity::Low: return "low";
    case Severity::Medium: return "medium";
    case Severity::High: return "high";
    case Severity::Critical: return "critical";
    case Severity::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Severity> severity_from_name(const std::string& name) {
  if (name == "low") return Severity::Low;
  if (name == "medium") return Severity::Medium;
  if (name == "high") return Severity::High;
  if (name == "critical") return Severity::Critical;
  if (name == "unknown") return Severity::Unknown;
  return std::nullopt;
}

json vuln_to_json(const VulnRecord& record) {
  json affected = json::array();
  for (const auto& a : record.affected) {
    affected.push_back(json{{"package_name", a.package_name},
                            {"version_range", a.version_range}});
  }
  json j{{"cve_id", record.cve_id},
         {"severity", severity_name(record.severity)},
         {"cwe_ids", record.cwe_ids},
         {"affected", affected}};
  if (!record.published.empty()) j["published"] = record.published;
  return j;
}

VulnRecord vuln_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("vuln record must be an object");
  VulnRecord r;
  if (!doc.contains("cve_id") || !doc["cve_id"].is_string()) {
    throw FormatError("vuln record: missing cve_id");
  }
  r.cve_id = doc["cve_id"].get<std::string>();
  if (doc.contains("severity")) {
    if (!doc["severity"].is_string()) {
      throw FormatError("vuln record: severity must be a string");
    }
    auto sev = severity_from_name(doc["severity"].get<std::string>());
    if (!sev) throw FormatError("vuln record: unknown severity");
    r.severity = *sev;
  }
  if (doc.contains("cwe_ids")) {
    if (!doc["cwe_ids"].is_array()) {
      throw FormatError("vuln record: cwe_ids must be an array");
    }
    for (const auto& c : doc["cwe_ids"]) {
      if (!c.is_string()) throw FormatError("vuln record: cwe_ids entries must be strings");
      r.cwe_ids.push_back(c.get<std::string>());
    }
  }
  if (!doc.contains("affected") || !doc["affected"].is_array()) {
    throw FormatError("vuln record: missing affected array");
  }
  for (const auto& a : doc["affected"]) {
    if (!a.is_object() || !a.contains("package_name") ||
        !a["package_name"].is_string() || !a.contains("version_range") ||
        !a["version_range"].is_string()) {
      throw FormatError(
          "vuln record: affected entries need package_name and version_range");
    }
    r.affected.push_back(AffectedPackage{
        a["package_name"].get<std::string>(),
        a["version_range"].get<std::string>()});
  }
  if (doc.contains("published")) {
    if (!doc["published"].is_string()) {
      throw FormatError("vuln record: published must be a string");
    }
    r.published = doc["published"].get<std::string>();
  }
  return r;
}

Store::Store(fs::path root, LockMode mode)
    : root_(std::move(root)), lock_mode_(mode) {
  std::error_code ec;
  for (const char* sub : {"objects", "revocations", "keys", "vulns", "index"}) {
    fs::create_directories(root_ / sub, ec);
    if (ec) throw IoError("cannot create store directory: " +
                          (root_ / sub).string() + ": " + ec.message());
  }
}

Store::WriteLock::WriteLock(Store& store) : store_(store) {
  store_.lock_acquire();
}

Store::WriteLock::~WriteLock() { store_.lock_release(); }

void Store::lock_acquire() {
  if (lock_depth_ > 0) {
    ++lock_depth_;
    return;
  }
  fs::path lock_path = root_ / ".lock";
  int fd = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
  if (fd < 0) throw IoError("cannot open lock file: " + lock_path.string());
  int op = LOCK_EX | (lock_mode_ == LockMode::FailFast ? LOCK_NB : 0);
  if (::flock(fd, op) != 0) {
    ::close(fd);
    if (lock_mode_ == LockMode::FailFast) {
      throw BusyError("store is locked by another writer: " + root_.string());
    }
    throw IoError("flock failed: " + lock_path.string());
  }
  lock_fd_ = fd;
  lock_depth_ = 1;
}

void Store::lock_release() {
  if (lock_depth_ == 0) return;
  if (--lock_depth_ == 0 && lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
    lock_fd_ = -1;
  }
}

fs::path Store::object_path(const AttestationId& id, Kind kind) const {
  if (kind == Kind::Revocation) {
    return root_ / "revocations" / (id + kAttestationExtension);
  }
  return root_ / "objects" / id.substr(0, 2) / (id + kAttestationExtension);
}

std::optional<fs::path> Store::locate(const AttestationId& id) const {
  if (!is_hex64(id)) return std::nullopt;
  fs::path obj = root_ / "objects" / id.substr(0, 2) / (id + kAttestationExtension);
  if (fs::exists(obj)) return obj;
  fs::path rev = root_ / "revocations" / (id + kAttestationExtension);
  if (fs::exists(rev)) return rev;
  return std::nullopt;
}

AttestationId Store::put(const Envelope& envelope) {
  WriteLock lock(*this);
  AttestationId id = attestation_id(envelope);

  if (envelope.signature.empty()) {
    throw IntegrityError("refusing to store an unsigned envelope");
  }
  // self-check when the issuer's key is on file
  if (auto key = trusted_key(envelope.issuer.value)) {
    if (!envelope_signature_valid(envelope, key->public_bytes, key->scheme)) {
      throw IntegrityError("signature self-check failed for envelope " + id);
    }
  }

  // one counter value per (issuer, name) series
  auto index = load_index();
  for (const auto& [existing_id, entry] : index) {
    if (existing_id != id && entry.issuer == envelope.issuer.value &&
        entry.name == envelope.version.name &&
        entry.counter == envelope.version.counter) {
      throw VersionError("counter " + std::to_string(entry.counter) +
                         " already used in series (" + entry.issuer + ", " +
                         entry.name + ") by " + existing_id);
    }
  }

  fs::path path = object_path(id, envelope.kind);
  if (fs::exists(path)) {
    Envelope existing = parse_envelope(read_file(path));
    if (attestation_id(existing) != id) {
      throw IntegrityError("id collision with differing content at " +
                           path.string());
    }
    return id;  // idempotent re-put
  }

  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string());
  write_file_atomic(path, serialize_envelope(envelope));

  index[id] = IndexEntry{envelope.kind, envelope.issuer.value,
                         envelope.version.name, envelope.version.counter};
  save_index(index);
  return id;
}

std::optional<Envelope> Store::get(const AttestationId& id) const {
  auto path = locate(id);
  if (!path) return std::nullopt;
  Envelope e = parse_envelope(read_file(*path));
  if (attestation_id(e) != id) {
    throw DigestMismatch("stored object " + id +
                         " does not hash to its filename id");
  }
  return e;
}

std::map<AttestationId, Store::IndexEntry> Store::scan_objects() const {
  std::map<AttestationId, IndexEntry> out;
  auto scan_dir = [&](const fs::path& dir, bool fanout) {
    if (!fs::exists(dir)) return;
    auto consider = [&](const fs::path& file) {
      if (file.extension() != ".json") return;
      std::string name = file.filename().string();
      if (name.size() < 64) return;
      AttestationId id = name.substr(0, 64);
      if (!is_hex64(id)) return;
      try {
        Envelope e = parse_envelope(read_file(file));
        out[id] = IndexEntry{e.kind, e.issuer.value, e.version.name,
                             e.version.counter};
      } catch (const Error&) {
        // unreadable objects surface via audit(), not lookups
      }
    };
    if (fanout) {
      for (const auto& sub : fs::directory_iterator(dir)) {
        if (!sub.is_directory()) continue;
        for (const auto& f : fs::directory_iterator(sub.path())) {
          if (f.is_regular_file()) consider(f.path());
        }
      }
    } else {
      for (const auto& f : fs::directory_iterator(dir)) {
        if (f.is_regular_file()) consider(f.path());
      }
    }
  };
  scan_dir(root_ / "objects", true);
  scan_dir(root_ / "revocations", false);
  return out;
}

std::map<AttestationId, Store::IndexEntry> Store::load_index() const {
  fs::path path = root_ / "index" / "catalog.json";
  if (fs::exists(path)) {
    try {
      json doc = json::parse(read_file(path));
      std::map<AttestationId, IndexEntry> out;
      for (const auto& [id, entry] : doc.at("entries").items()) {
        auto kind = kind_from_name(entry.at("kind").get<std::string>());
        if (!kind) throw FormatError("bad kind in index");
        out[id] = IndexEntry{*kind, entry.at("issuer").get<std::string>(),
                             entry.at("name").get<std::string>(),
                             entry.at("counter").get<std::uint64_t>()};
      }
      return out;
    } catch (const std::exception&) {
      // fall through: the index is derived data, rebuild from objects
    }
  }
  return scan_objects();
}

void Store::save_index(const std::map<AttestationId, IndexEntry>& index) const {
  json entries = json::object();
  for (const auto& [id, entry] : index) {
    entries[id] = json{{"kind", kind_name(entry.kind)},
                       {"issuer", entry.issuer},
                       {"name", entry.name},
                       {"counter", entry.counter}};
  }
  json doc{{"layout", kStoreLayoutVersion}, {"entries", entries}};
  write_file_atomic(root_ / "index" / "catalog.json", doc.dump(2) + "\n");
}

void Store::rebuild_index() {
  WriteLock lock(*this);
  save_index(scan_objects());
}

std::vector<AttestationId> Store::find(std::optional<Kind> kind,
                                       std::optional<std::string> issuer,
                                       std::optional<std::string> name) const {
  auto index = load_index();
  std::vector<std::pair<std::pair<std::string, std::uint64_t>, AttestationId>>
      hits;
  for (const auto& [id, entry] : index) {
    if (kind && entry.kind != *kind) continue;
    if (issuer && entry.issuer != *issuer) continue;
    if (name && entry.name != *name) continue;
    hits.push_back({{entry.name, entry.counter}, id});
  }
  std::sort(hits.begin(), hits.end());
  std::vector<AttestationId> out;
  out.reserve(hits.size());
  for (auto& h : hits) out.push_back(std::move(h.second));
  return out;
}

std::uint64_t Store::max_counter(const std::string& issuer_hex,
                                 const std::string& name) const {
  std::uint64_t max = 0;
  auto index = load_index();
  for (const auto& [id, entry] : index) {
    (void)id;
    if (entry.issuer == issuer_hex && entry.name == name) {
      max = std::max(max, entry.counter);
    }
  }
  return max;
}

Digest Store::add_trusted_key(std::span<const std::uint8_t> public_bytes,
                              const std::string& scheme) {
  if (scheme != kEd25519) {
    throw UnsupportedScheme("unsupported key scheme: " + scheme);
  }
  WriteLock lock(*this);
  Digest fp = hash_bytes(public_bytes);
  fs::path path = root_ / "keys" / (fp.value + ".pub");
  if (!fs::exists(path)) {
    write_file_atomic(path, scheme + " " + base64_encode(public_bytes) + "\n");
  }
  return fp;
}

bool Store::is_trusted(const Digest& fingerprint) const {
  return is_trusted(fingerprint.value);
}

bool Store::is_trusted(const std::string& fingerprint_hex) const {
  return fs::exists(root_ / "keys" / (fingerprint_hex + ".pub"));
}

std::optional<TrustedKey> Store::trusted_key(
    const std::string& fingerprint_hex) const {
  fs::path path = root_ / "keys" / (fingerprint_hex + ".pub");
  if (!fs::exists(path)) return std::nullopt;
  std::string text = read_file(path);
  auto space = text.find(' ');
  if (space == std::string::npos) {
    throw FormatError("malformed key file: " + path.string());
  }
  std::string scheme = text.substr(0, space);
  std::string b64 = text.substr(space + 1);
  while (!b64.empty() && (b64.back() == '\n' || b64.back() == '\r')) {
    b64.pop_back();
  }
  auto bytes = base64_decode(b64);
  if (!bytes) throw FormatError("malformed key file: " + path.string());
  return TrustedKey{Digest{kSha256, fingerprint_hex}, scheme, *bytes};
}

std::vector<TrustedKey> Store::trusted_keys() const {
  std::vector<TrustedKey> out;
  fs::path dir = root_ / "keys";
  if (!fs::exists(dir)) return out;
  std::vector<std::string> names;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.is_regular_file() && f.path().extension() == ".pub") {
      names.push_back(f.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  for (const auto& n : names) {
    if (auto key = trusted_key(n)) out.push_back(std::move(*key));
  }
  return out;
}

void Store::put_vuln(const VulnRecord& record) {
  if (!is_valid_cve_id(record.cve_id)) {
    throw FormatError("invalid CVE id: " + record.cve_id);
  }
  WriteLock lock(*this);
  write_file_atomic(root_ / "vulns" / (record.cve_id + ".json"),
                    vuln_to_json(record).dump(2) + "\n");
}

std::optional<VulnRecord> Store::get_vuln(const std::string& cve_id) const {
  fs::path path = root_ / "vulns" / (cve_id + ".json");
  if (!fs::exists(path)) return std::nullopt;
  try {
    return vuln_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw FormatError("corrupt vuln record " + path.string() + ": " + e.what());
  }
}

std::vector<VulnRecord> Store::vulns() const {
  std::vector<std::string> ids;
  fs::path dir = root_ / "vulns";
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.is_regular_file() && f.path().extension() == ".json") {
      ids.push_back(f.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<VulnRecord> out;
  for (const auto& id : ids) {
    if (auto r = get_vuln(id)) out.push_back(std::move(*r));
  }
  return out;
}

std::vector<AttestationId> Store::all_ids() const {
  std::vector<AttestationId> out;
  for (const auto& [id, entry] : scan_objects()) {
    (void)entry;
    out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Envelope> Store::revocations() const {
  std::vector<Envelope> out;
  fs::path dir = root_ / "revocations";
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.is_regular_file()) files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      out.push_back(parse_envelope(read_file(f)));
    } catch (const Error&) {
      // corrupt revocations surface via audit()
    }
  }
  return out;
}

std::vector<StoreAuditFinding> Store::audit() const {
  std::vector<StoreAuditFinding> findings;
  auto check_envelope_file = [&](const fs::path& file) {
    std::string name = file.filename().string();
    if (name.size() < 64 + std::strlen(kAttestationExtension) ||
        !is_hex64(name.substr(0, 64))) {
      findings.push_back({file, "not named by a 64-hex attestation id"});
      return;
    }
    try {
      Envelope e = parse_envelope(read_file(file));
      AttestationId actual = attestation_id(e);
      if (actual != name.substr(0, 64)) {
        findings.push_back(
            {file, "content hashes to " + actual + ", not the filename id"});
      }
    } catch (const Error& err) {
      findings.push_back({file, err.what()});
    }
  };
  if (fs::exists(root_ / "objects")) {
    for (const auto& sub : fs::directory_iterator(root_ / "objects")) {
      if (!sub.is_directory()) continue;
      for (const auto& f : fs::directory_iterator(sub.path())) {
        if (f.is_regular_file()) check_envelope_file(f.path());
      }
    }
  }
  if (fs::exists(root_ / "revocations")) {
    for (const auto& f : fs::directory_iterator(root_ / "revocations")) {
      if (f.is_regular_file()) check_envelope_file(f.path());
    }
  }
  for (const auto& f : fs::directory_iterator(root_ / "keys")) {
    if (!f.is_regular_file() || f.path().extension() != ".pub") continue;
    try {
      auto key = trusted_key(f.path().stem().string());
      if (key && hash_bytes(key->public_bytes).value != key->fingerprint.value) {
        findings.push_back({f.path(), "key bytes do not match fingerprint"});
      }
    } catch (const Error& err) {
      findings.push_back({f.path(), err.what()});
    }
  }
  for (const auto& f : fs::directory_iterator(root_ / "vulns")) {
    if (!f.is_regular_file()) continue;
    try {
      auto record = vuln_from_json(json::parse(read_file(f.path())));
      if (record.cve_id != f.path().stem().string()) {
        findings.push_back({f.path(), "cve_id does not match filename"});
      }
    } catch (const std::exception& err) {
      findings.push_back({f.path(), err.what()});
    }
  }
  std::sort(findings.begin(), findings.end(),
            [](const auto& a, const auto& b) { return a.path < b.path; });
  return findings;
}

}  // namespace taibom

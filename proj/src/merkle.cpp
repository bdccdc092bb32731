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

#include "taibom/merkle.hpp"

#include <algorithm>
#include <fstream>

#include "taibom/errors.hpp"

namespace taibom {

namespace fs = std::filesystem;

namespace {

constexpr std::uint8_t kLeafTag = 0x00;
constexpr std::uint8_t kInternalTag = 0x01;
constexpr std::uint8_t kPathTag = 0x02;

bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_chunk_size(std::uint64_t chunk_size) {
  if (chunk_size < kMinChunkSize || !is_power_of_two(chunk_size)) {
    throw FormatError("chunk_size must be a power of two >= 4096, got " +
                      std::to_string(chunk_size));
  }
}

Sha256Bytes leaf_hash(std::span<const std::uint8_t> chunk) {
  Sha256 h;
  h.update(&kLeafTag, 1);
  h.update(chunk);
  return h.finish();
}

Sha256Bytes empty_root() {
  Sha256 h;
  h.update(&kLeafTag, 1);
  return h.finish();
}

// Pairwise combine with the internal-node tag; an odd node at any level is
// promoted unchanged.
Sha256Bytes fold_levels(std::vector<Sha256Bytes> level) {
  if (level.empty()) return empty_root();
  while (level.size() > 1) {
    std::vector<Sha256Bytes> next;
    next.reserve(level.size() / 2 + 1);
    std::size_t i = 0;
    for (; i + 1 < level.size(); i += 2) {
      Sha256 h;
      h.update(&kInternalTag, 1);
      h.update(level[i]);
      h.update(level[i + 1]);
      next.push_back(h.finish());
    }
    if (i < level.size()) next.push_back(level[i]);
    level = std::move(next);
  }
  return level[0];
}

std::vector<Sha256Bytes> blob_leaves(std::span<const std::uint8_t> content,
                                     std::uint64_t chunk_size) {
  std::vector<Sha256Bytes> leaves;
  for (std::size_t off = 0; off < content.size(); off += chunk_size) {
    std::size_t len = std::min<std::size_t>(chunk_size, content.size() - off);
    leaves.push_back(leaf_hash(content.subspan(off, len)));
  }
  return leaves;
}

std::ifstream open_binary(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + file.string());
  return in;
}

std::vector<Sha256Bytes> file_leaves(const fs::path& file,
                                     std::uint64_t chunk_size) {
  auto in = open_binary(file);
  std::vector<Sha256Bytes> leaves;
  std::vector<char> buf(chunk_size);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(chunk_size));
    std::streamsize got = in.gcount();
    if (got <= 0) break;
    leaves.push_back(leaf_hash(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(buf.data()),
        static_cast<std::size_t>(got))));
  }
  if (in.bad()) throw IoError("read failed: " + file.string());
  return leaves;
}

// Sorted (relative path, file) list for a directory tree. Regular files
// only; symlinks are skipped without following.
std::vector<std::pair<std::string, fs::path>> dir_entries(
    const fs::path& root) {
  if (!fs::exists(root)) throw IoError("no such path: " + root.string());
  std::vector<std::pair<std::string, fs::path>> entries;
  fs::recursive_directory_iterator it(
      root, fs::directory_options::none);
  for (const auto& de : it) {
    if (de.is_symlink() || !de.is_regular_file()) continue;
    std::string rel = de.path().lexically_relative(root).generic_string();
    entries.emplace_back(std::move(rel), de.path());
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return entries;
}

Sha256Bytes dir_entry_hash(const std::string& rel_path,
                           const Sha256Bytes& file_root) {
  Sha256 h;
  h.update(&kPathTag, 1);
  h.update(rel_path.data(), rel_path.size());
  h.update(&kLeafTag, 1);
  h.update(file_root);
  return h.finish();
}

Sha256Bytes file_root_bytes(const fs::path& file, std::uint64_t chunk_size) {
  return fold_levels(file_leaves(file, chunk_size));
}

// SplitMix64: deterministic counter-based generator, identical output on
// every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

std::uint64_t sample_count(std::uint64_t leaf_count, Fraction fraction) {
  if (fraction.numerator == 0 || fraction.denominator == 0 ||
      fraction.numerator > fraction.denominator) {
    throw FormatError("sampling fraction must be a rational in (0, 1]");
  }
  std::uint64_t s = fraction.numerator * leaf_count / fraction.denominator;
  return std::max<std::uint64_t>(1, s);
}

// Recomputes the digest of leaf `index` from current artifact bytes.
Sha256Bytes recompute_leaf(const fs::path& path, const MerkleRoot& parent,
                           std::uint64_t index) {
  if (fs::is_directory(path)) {
    auto entries = dir_entries(path);
    if (index >= entries.size()) {
      throw IoError("leaf index out of range for current directory contents");
    }
    const auto& [rel, file] = entries[index];
    return dir_entry_hash(rel, file_root_bytes(file, parent.chunk_size));
  }
  auto in = open_binary(path);
  in.seekg(static_cast<std::streamoff>(index * parent.chunk_size));
  std::vector<char> buf(parent.chunk_size);
  in.read(buf.data(), static_cast<std::streamsize>(parent.chunk_size));
  std::streamsize got = in.gcount();
  if (got <= 0) throw IoError("leaf index beyond end of file: " + path.string());
  return leaf_hash(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(buf.data()),
      static_cast<std::size_t>(got)));
}

std::uint64_t current_leaf_count(const fs::path& path,
                                 std::uint64_t chunk_size) {
  if (fs::is_directory(path)) return dir_entries(path).size();
  if (!fs::exists(path)) throw IoError("no such path: " + path.string());
  std::uint64_t size = fs::file_size(path);
  return (size + chunk_size - 1) / chunk_size;
}

}  // namespace

MerkleRoot merkle_blob(std::span<const std::uint8_t> content,
                       std::uint64_t chunk_size) {
  check_chunk_size(chunk_size);
  auto leaves = blob_leaves(content, chunk_size);
  MerkleRoot out;
  out.chunk_size = chunk_size;
  out.leaf_count = leaves.size();
  out.root = Digest{kSha256, to_hex(fold_levels(std::move(leaves)))};
  return out;
}

MerkleRoot merkle_blob_file(const fs::path& file, std::uint64_t chunk_size) {
  check_chunk_size(chunk_size);
  auto leaves = file_leaves(file, chunk_size);
  MerkleRoot out;
  out.chunk_size = chunk_size;
  out.leaf_count = leaves.size();
  out.root = Digest{kSha256, to_hex(fold_levels(std::move(leaves)))};
  return out;
}

MerkleRoot merkle_tree(const fs::path& root_path, std::uint64_t chunk_size) {
  check_chunk_size(chunk_size);
  if (!fs::is_directory(root_path)) {
    throw IoError("not a directory: " + root_path.string());
  }
  auto entries = dir_entries(root_path);
  std::vector<Sha256Bytes> leaves;
  leaves.reserve(entries.size());
  for (const auto& [rel, file] : entries) {
    leaves.push_back(dir_entry_hash(rel, file_root_bytes(file, chunk_size)));
  }
  MerkleRoot out;
  out.chunk_size = chunk_size;
  out.leaf_count = leaves.size();
  out.root = Digest{kSha256, to_hex(fold_levels(std::move(leaves)))};
  return out;
}

MerkleRoot merkle_path(const fs::path& path, std::uint64_t chunk_size) {
  if (fs::is_directory(path)) return merkle_tree(path, chunk_size);
  if (fs::is_regular_file(path)) return merkle_blob_file(path, chunk_size);
  throw IoError("no such file or directory: " + path.string());
}

std::uint64_t artifact_byte_count(const fs::path& path) {
  if (fs::is_regular_file(path)) return fs::file_size(path);
  if (!fs::is_directory(path)) {
    throw IoError("no such file or directory: " + path.string());
  }
  std::uint64_t sum = 0;
  for (const auto& [rel, file] : dir_entries(path)) {
    (void)rel;
    sum += fs::file_size(file);
  }
  return sum;
}

std::vector<std::uint64_t> sample_indices(std::uint64_t seed,
                                          std::uint64_t leaf_count,
                                          Fraction fraction) {
  if (leaf_count == 0) {
    throw FormatError("cannot sample from zero leaves");
  }
  std::uint64_t s = sample_count(leaf_count, fraction);
  SplitMix64 rng(seed ^ (leaf_count * 0x9e3779b97f4a7c15ULL));
  std::vector<std::uint64_t> idx(leaf_count);
  for (std::uint64_t i = 0; i < leaf_count; ++i) idx[i] = i;
  // partial Fisher-Yates: the first s slots end up holding the sample
  for (std::uint64_t i = 0; i < s; ++i) {
    std::uint64_t j = i + rng.next() % (leaf_count - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(s);
  std::sort(idx.begin(), idx.end());
  return idx;
}

SampledProof make_sampled_proof(const fs::path& path,
                                std::uint64_t chunk_size, std::uint64_t seed,
                                Fraction fraction) {
  SampledProof proof;
  proof.parent = merkle_path(path, chunk_size);
  proof.seed = seed;
  proof.fraction = fraction;
  if (proof.parent.leaf_count == 0) {
    throw FormatError("cannot sample an empty artifact: " + path.string());
  }
  proof.indices = sample_indices(seed, proof.parent.leaf_count, fraction);
  proof.digests.reserve(proof.indices.size());
  for (std::uint64_t i : proof.indices) {
    proof.digests.push_back(
        Digest{kSha256, to_hex(recompute_leaf(path, proof.parent, i))});
  }
  return proof;
}

bool sampled_verify(const fs::path& path, const SampledProof& proof) {
  auto expected =
      sample_indices(proof.seed, proof.parent.leaf_count, proof.fraction);
  if (proof.indices != expected ||
      proof.digests.size() != proof.indices.size()) {
    throw FormatError(
        "proof indices are not the deterministic sample for "
        "(seed, leaf_count, fraction)");
  }
  if (current_leaf_count(path, proof.parent.chunk_size) !=
      proof.parent.leaf_count) {
    return false;
  }
  for (std::size_t k = 0; k < proof.indices.size(); ++k) {
    Sha256Bytes leaf;
    try {
      leaf = recompute_leaf(path, proof.parent, proof.indices[k]);
    } catch (const IoError&) {
      return false;
    }
    if (to_hex(leaf) != proof.digests[k].value) return false;
  }
  return true;
}

}  // namespace taibom

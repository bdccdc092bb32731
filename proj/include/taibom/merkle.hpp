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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "taibom/crypto.hpp"
#include "taibom/digest.hpp"

namespace taibom {

inline constexpr const char* kMerkleScheme = "taibom-merkle/1";
inline constexpr std::uint64_t kMinChunkSize = 4096;
inline constexpr std::uint64_t kDefaultChunkSize = 1 << 20;

// Tree construction (normative, bit-exact):
//   leaf         = sha256(0x00 || chunk bytes)
//   dir entry    = sha256(0x02 || utf8(relative path) || 0x00 || file root)
//   internal     = sha256(0x01 || left || right)
//   odd node at a level is promoted unchanged
//   zero leaves  = sha256(0x00)

/// Root of a hash tree over content chunks (blobs) or sorted
/// (path, file-root) entries (directories).
struct MerkleRoot {
  Digest root;
  std::uint64_t chunk_size{kDefaultChunkSize};
  std::uint64_t leaf_count{0};
  std::string scheme{kMerkleScheme};

  auto operator<=>(const MerkleRoot&) const = default;
};

/// Hash tree over in-memory bytes split into chunk_size chunks.
/// chunk_size must be a power of two >= 4 KiB.
MerkleRoot merkle_blob(std::span<const std::uint8_t> content,
                       std::uint64_t chunk_size = kDefaultChunkSize);

/// Same construction streamed from a file.
MerkleRoot merkle_blob_file(const std::filesystem::path& file,
                            std::uint64_t chunk_size = kDefaultChunkSize);

/// Hash tree over a directory: regular files only, sorted by relative path
/// (byte order, '/' separators); symlinks and empty directories are
/// ignored. An empty directory has root sha256(0x00).
MerkleRoot merkle_tree(const std::filesystem::path& root_path,
                       std::uint64_t chunk_size = kDefaultChunkSize);

/// Dispatch on path type: regular file -> merkle_blob_file,
/// directory -> merkle_tree.
MerkleRoot merkle_path(const std::filesystem::path& path,
                       std::uint64_t chunk_size = kDefaultChunkSize);

/// Total bytes covered by merkle_path over the same path: the file size,
/// or the sum of regular-file sizes under a directory (symlinks skipped).
std::uint64_t artifact_byte_count(const std::filesystem::path& path);

/// Sampling fraction as an exact rational in (0, 1].
struct Fraction {
  std::uint64_t numerator{1};
  std::uint64_t denominator{20};

  auto operator<=>(const Fraction&) const = default;
};

/// Deterministic sample of max(1, floor(fraction * leaf_count)) distinct
/// leaf indices, sorted ascending. Same (seed, leaf_count, fraction) always
/// yields the same list on every platform.
std::vector<std::uint64_t> sample_indices(std::uint64_t seed,
                                          std::uint64_t leaf_count,
                                          Fraction fraction);

/// Signed-subset integrity evidence for large artifacts: the digests of a
/// seed-deterministic sample of leaves.
struct SampledProof {
  MerkleRoot parent;
  std::vector<std::uint64_t> indices;
  std::vector<Digest> digests;
  std::uint64_t seed{0};
  Fraction fraction;
};

/// Builds a proof from the artifact's current bytes (file or directory).
SampledProof make_sampled_proof(const std::filesystem::path& path,
                                std::uint64_t chunk_size,
                                std::uint64_t seed, Fraction fraction);

/// Recomputes only the sampled leaves and compares against the proof.
/// False when any sampled leaf (or the leaf count) changed. Raises
/// FormatError when the proof indices are not the sampler's output for
/// (seed, leaf_count, fraction).
bool sampled_verify(const std::filesystem::path& path,
                    const SampledProof& proof);

}  // namespace taibom

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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace taibom {

inline constexpr const char* kSha256 = "sha-256";

/// Content identity of a byte sequence: algorithm identifier plus the
/// lowercase hex digest value. Equality is byte equality of both fields.
struct Digest {
  std::string algorithm{kSha256};
  std::string value;

  auto operator<=>(const Digest&) const = default;

  bool empty() const { return value.empty(); }

  /// True when the value is syntactically valid for the algorithm
  /// (64 lowercase hex chars for sha-256).
  bool well_formed() const;
};

/// Attestation ids are the sha-256 hex of an envelope's canonical bytes and
/// double as object-store filenames.
using AttestationId = std::string;

bool is_hex64(const std::string& s);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::optional<std::vector<std::uint8_t>> from_hex(const std::string& hex);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::optional<std::vector<std::uint8_t>> base64_decode(const std::string& text);

}  // namespace taibom

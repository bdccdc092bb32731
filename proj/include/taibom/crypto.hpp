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

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "taibom/digest.hpp"

namespace taibom {

inline constexpr const char* kEd25519 = "ed25519";

using Sha256Bytes = std::array<std::uint8_t, 32>;

/// Streaming SHA-256 over OpenSSL's EVP interface.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::uint8_t> data);
  void update(const void* data, std::size_t len);
  Sha256Bytes finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Sha256Bytes sha256(std::span<const std::uint8_t> data);

/// SHA-256 of arbitrary bytes as a lowercase hex Digest.
Digest hash_bytes(std::span<const std::uint8_t> data);
Digest hash_bytes(const std::string& data);

/// Signing keypair. The fingerprint is hash_bytes(public_bytes) and acts as
/// the issuer identity throughout the toolkit.
struct KeyPair {
  std::string scheme{kEd25519};
  std::vector<std::uint8_t> public_bytes;
  std::vector<std::uint8_t> secret_bytes;
  Digest fingerprint;
};

/// Freshly generated keypair. Only "ed25519" is supported; anything else
/// raises UnsupportedScheme.
KeyPair keygen(const std::string& scheme = kEd25519);

/// Detached signature over the exact byte sequence. Raises
/// UnsupportedScheme for unknown schemes.
std::vector<std::uint8_t> sign(std::span<const std::uint8_t> data,
                               const KeyPair& keypair);

/// True iff the detached signature verifies. A malformed signature or key
/// returns false rather than raising.
bool verify_sig(std::span<const std::uint8_t> data,
                std::span<const std::uint8_t> signature,
                std::span<const std::uint8_t> public_bytes,
                const std::string& scheme);

}  // namespace taibom

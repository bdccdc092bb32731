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

#include "taibom/crypto.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

#include "taibom/errors.hpp"

namespace taibom {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

constexpr char kB64Digits[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

struct EvpPkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct EvpMdCtxDeleter {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
struct EvpPkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, EvpPkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, EvpMdCtxDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, EvpPkeyCtxDeleter>;

}  // namespace

bool Digest::well_formed() const {
  if (algorithm == kSha256) return is_hex64(value);
  return !value.empty();
}

bool is_hex64(const std::string& s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kB64Digits[(n >> 18) & 63]);
    out.push_back(kB64Digits[(n >> 12) & 63]);
    out.push_back(kB64Digits[(n >> 6) & 63]);
    out.push_back(kB64Digits[n & 63]);
    i += 3;
  }
  std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    std::uint32_t n = bytes[i] << 16;
    out.push_back(kB64Digits[(n >> 18) & 63]);
    out.push_back(kB64Digits[(n >> 12) & 63]);
    out.append("==");
  } else if (rest == 2) {
    std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kB64Digits[(n >> 18) & 63]);
    out.push_back(kB64Digits[(n >> 12) & 63]);
    out.push_back(kB64Digits[(n >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> base64_decode(
    const std::string& text) {
  if (text.size() % 4 != 0) return std::nullopt;
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t n = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        // padding only allowed in the last two positions of the final group
        if (i + 4 != text.size() || j < 2) return std::nullopt;
        ++pad;
        n <<= 6;
        continue;
      }
      if (pad > 0) return std::nullopt;
      int v = b64_value(c);
      if (v < 0) return std::nullopt;
      n = (n << 6) | static_cast<std::uint32_t>(v);
    }
    out.push_back(static_cast<std::uint8_t>((n >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(n & 0xff));
  }
  return out;
}

struct Sha256::Impl {
  MdCtxPtr ctx;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx.reset(EVP_MD_CTX_new());
  if (!impl_->ctx ||
      EVP_DigestInit_ex(impl_->ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha-256 context initialization failed");
  }
}

Sha256::~Sha256() = default;

void Sha256::update(std::span<const std::uint8_t> data) {
  update(data.data(), data.size());
}

void Sha256::update(const void* data, std::size_t len) {
  if (len == 0) return;
  if (EVP_DigestUpdate(impl_->ctx.get(), data, len) != 1) {
    throw Error("sha-256 update failed");
  }
}

Sha256Bytes Sha256::finish() {
  Sha256Bytes out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx.get(), out.data(), &len) != 1 ||
      len != out.size()) {
    throw Error("sha-256 finalization failed");
  }
  return out;
}

Sha256Bytes sha256(std::span<const std::uint8_t> data) {
  Sha256 h;
  h.update(data);
  return h.finish();
}

Digest hash_bytes(std::span<const std::uint8_t> data) {
  return Digest{kSha256, to_hex(sha256(data))};
}

Digest hash_bytes(const std::string& data) {
  return hash_bytes(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

KeyPair keygen(const std::string& scheme) {
  if (scheme != kEd25519) {
    throw UnsupportedScheme("unsupported key scheme: " + scheme);
  }
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_ED25519, nullptr));
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) != 1) {
    throw Error("ed25519 keygen initialization failed");
  }
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_keygen(ctx.get(), &raw) != 1) {
    throw Error("ed25519 keygen failed");
  }
  PkeyPtr pkey(raw);

  KeyPair kp;
  kp.scheme = scheme;
  std::size_t len = 32;
  kp.public_bytes.resize(len);
  if (EVP_PKEY_get_raw_public_key(pkey.get(), kp.public_bytes.data(), &len) !=
      1) {
    throw Error("ed25519 public key extraction failed");
  }
  len = 32;
  kp.secret_bytes.resize(len);
  if (EVP_PKEY_get_raw_private_key(pkey.get(), kp.secret_bytes.data(), &len) !=
      1) {
    throw Error("ed25519 secret key extraction failed");
  }
  kp.fingerprint = hash_bytes(kp.public_bytes);
  return kp;
}

std::vector<std::uint8_t> sign(std::span<const std::uint8_t> data,
                               const KeyPair& keypair) {
  if (keypair.scheme != kEd25519) {
    throw UnsupportedScheme("unsupported key scheme: " + keypair.scheme);
  }
  PkeyPtr pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                            keypair.secret_bytes.data(),
                                            keypair.secret_bytes.size()));
  if (!pkey) throw Error("invalid ed25519 secret key");
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) !=
          1) {
    throw Error("ed25519 signing initialization failed");
  }
  std::size_t siglen = 64;
  std::vector<std::uint8_t> sig(siglen);
  if (EVP_DigestSign(ctx.get(), sig.data(), &siglen, data.data(),
                     data.size()) != 1) {
    throw Error("ed25519 signing failed");
  }
  sig.resize(siglen);
  return sig;
}

bool verify_sig(std::span<const std::uint8_t> data,
                std::span<const std::uint8_t> signature,
                std::span<const std::uint8_t> public_bytes,
                const std::string& scheme) {
  if (scheme != kEd25519) return false;
  if (signature.size() != 64 || public_bytes.size() != 32) return false;
  PkeyPtr pkey(EVP_PKEY_new_raw_public_key(
      EVP_PKEY_ED25519, nullptr, public_bytes.data(), public_bytes.size()));
  if (!pkey) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx ||
      EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) !=
          1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          data.data(), data.size()) == 1;
}

}  // namespace taibom

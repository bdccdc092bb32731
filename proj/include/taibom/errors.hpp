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

#include <stdexcept>
#include <string>

namespace taibom {

/// Base class for every error raised by the toolkit. Anticipated failures
/// are always one of the derived types below; anything else escaping the
/// library is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TAIBOM_DEFINE_ERROR(NAME)       \
  class NAME : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

// A field value cannot be represented in canonical form (non-UTF-8 text,
// floating point numbers).
TAIBOM_DEFINE_ERROR(CanonicalizationError);
// Filesystem reads/writes failed; the message names the path.
TAIBOM_DEFINE_ERROR(IoError);
// Malformed input document (envelope, SBOM, feed, manifest).
TAIBOM_DEFINE_ERROR(FormatError);
// Key or digest scheme not supported by this build.
TAIBOM_DEFINE_ERROR(UnsupportedScheme);
// The store detected corruption: an id collision with differing bytes, or a
// signature self-check failure on insert.
TAIBOM_DEFINE_ERROR(IntegrityError);
// A stored object's recomputed attestation id differs from its filename.
TAIBOM_DEFINE_ERROR(DigestMismatch);
// The reference graph contains a cycle; content addressing makes this
// impossible for honestly produced stores.
TAIBOM_DEFINE_ERROR(CycleError);
// Signer is neither the target's issuer nor a trusted key.
TAIBOM_DEFINE_ERROR(AuthorizationError);
// A referenced attestation has the wrong kind for the operation.
TAIBOM_DEFINE_ERROR(KindError);
// Requested record does not exist.
TAIBOM_DEFINE_ERROR(NotFound);
// A version counter collision within an (issuer, name) series.
TAIBOM_DEFINE_ERROR(VersionError);
// The store write lock is held and fail-fast mode was requested.
TAIBOM_DEFINE_ERROR(BusyError);

#undef TAIBOM_DEFINE_ERROR

}  // namespace taibom

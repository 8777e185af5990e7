// Copyright 2026 The papir authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace papir {

// Base of the library's error taxonomy. Every throwing operation documents
// which subclass it raises; callers that need coarse handling can catch this.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments violating an operation's preconditions.
class usage_error : public error {
 public:
  using error::error;
};

// Parameters are structurally valid but unsupported by the requested
// operation (e.g. q < K for an MDS query, (M+1) not dividing K for RCS).
class config_error : public error {
 public:
  using error::error;
};

// An exact computation would exceed the configured enumeration budget.
class resource_error : public error {
 public:
  using error::error;
};

// A linear system turned out rank-deficient.
class rank_error : public error {
 public:
  using error::error;
};

// File could not be read, written, or parsed.
class io_error : public error {
 public:
  using error::error;
};

// Peer violated the wire protocol (bad tag, bad length, short frame).
class protocol_error : public error {
 public:
  using error::error;
};

// Socket-level failure (connect, bind, read, write).
class net_error : public error {
 public:
  using error::error;
};

// Answer was well-framed but inconsistent with the query (wrong combo
// count, wrong vector length); no partial result is produced.
class decode_error : public error {
 public:
  using error::error;
};

// An internal invariant broke; indicates a bug or corrupted state.
class internal_error : public error {
 public:
  using error::error;
};

}  // namespace papir

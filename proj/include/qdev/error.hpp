// Copyright 2026 The qdev Authors
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

namespace qdev {

// Base of every error thrown by the library. The CLI maps the two families
// below to distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: wrong shapes, parameters outside their domain, size caps,
// requests outside what the implemented theorems cover.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class SizeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class OutOfScopeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A mathematical invariant does not hold (non-CP Choi, non-PSD correlation
// matrix, non-TP Kraus set handed to an op that needs TP, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class NotCpError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

// A constructive procedure failed its own correctness gate.
class DecompositionError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

}  // namespace qdev

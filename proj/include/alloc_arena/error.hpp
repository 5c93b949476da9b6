// Copyright 2026 The Alloc Arena Authors.
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

namespace alloc_arena {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Stepping an environment beyond its horizon.
class SequenceError : public Error {
 public:
  using Error::Error;
};

// Allocation violates the budget or the n_i >= 1 floor.
class AllocationError : public Error {
 public:
  using Error::Error;
};

// Malformed arguments: dimension mismatches, empty inputs.
class InputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedThresholdError : public Error {
 public:
  using Error::Error;
};

// q in {0, 1} where a logarithm of q is required.
class SingularInputError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ActionError : public Error {
 public:
  using Error::Error;
};

// A non-oracle policy was handed ground-truth probabilities.
class ContractError : public Error {
 public:
  using Error::Error;
};

class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace alloc_arena

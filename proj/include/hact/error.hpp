// Copyright 2026 The hapticbench Authors
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

namespace hact {

// Base for every failure raised by the workbench. Callers that only need a
// diagnostic can catch this; the subclasses carry extra context.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file or array failed a structural check (bad magic, short read,
// shape mismatch, negative force, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Operation needs at least one episode / sample.
class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

// Model or checkpoint configuration does not match the request.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace hact

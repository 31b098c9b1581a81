// Copyright 2026 The noveval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace noveval {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration (unparseable file or violated invariant).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. The message carries the file name and line number.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A data-level invariant did not hold (e.g. split overlap, id mismatch).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace noveval

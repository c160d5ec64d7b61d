//
// Copyright 2026 The R2DP Authors
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
//

#ifndef R2DP_ERRORS_H_
#define R2DP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace r2dp {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid construction parameters or arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An MGF (or its derivative) was probed outside its existence domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamily : public Error {
 public:
  using Error::Error;
};

// An improper integral does not converge, or its tail cannot be truncated to
// the requested tolerance.
class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

// The density grid does not cover enough probability mass.
class GridError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class BinMismatch : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class InputDomain : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

// Malformed text input (distribution specs, records, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace r2dp

#endif  // R2DP_ERRORS_H_

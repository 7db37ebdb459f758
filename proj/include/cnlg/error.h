// Copyright 2026 The cnlg Authors
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

#ifndef CNLG_ERROR_H_
#define CNLG_ERROR_H_

#include <stdexcept>
#include <string>

namespace cnlg {

// Base of every error the library throws. The subclasses map onto the CLI
// exit codes: UsageError 1, DataError 2, BackendError 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or malformed conditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed or insufficient input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// A model backend failed or lacks a required capability.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace cnlg

#endif  // CNLG_ERROR_H_

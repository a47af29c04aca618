// core/error.h

// Copyright 2026  Front-End Adapter Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FEA_CORE_ERROR_H_
#define FEA_CORE_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace fea {

// Base error for everything this library throws on contract violations.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration or inconsistent cross-field values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed or unreadable input data (manifests, audio, label files).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// CTC target not alignable within the available frames.
class CtcInfeasibleError : public Error {
 public:
  explicit CtcInfeasibleError(const std::string& msg) : Error(msg) {}
};

// Checkpoint file problems: bad magic, version, truncation, shape mismatch.
class CheckpointError : public Error {
 public:
  explicit CheckpointError(const std::string& msg) : Error(msg) {}
};

namespace detail {
class MsgStream {
 public:
  template <typename T>
  MsgStream& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};
}  // namespace detail

}  // namespace fea

#define FEA_CHECK(cond, ...)                                     \
  do {                                                           \
    if (!(cond)) {                                               \
      ::fea::detail::MsgStream ms_;                              \
      ms_ << __VA_ARGS__;                                        \
      throw ::fea::Error(ms_.str());                             \
    }                                                            \
  } while (0)

#define FEA_CHECK_T(cond, extype, ...)                           \
  do {                                                           \
    if (!(cond)) {                                               \
      ::fea::detail::MsgStream ms_;                              \
      ms_ << __VA_ARGS__;                                        \
      throw extype(ms_.str());                                   \
    }                                                            \
  } while (0)

#endif  // FEA_CORE_ERROR_H_

// Copyright 2026 The Orchard Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef ORCHARD_ERRORS_HPP_
#define ORCHARD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace orchard {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ORCHARD_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// Invalid argument or violated type invariant (negative width, bad config).
ORCHARD_DEFINE_ERROR(InvalidArgument);
// A detection was used in the wrong coordinate frame.
ORCHARD_DEFINE_ERROR(FrameError);
// Fewer than three distinct points, or all points collinear.
ORCHARD_DEFINE_ERROR(DegenerateInput);
// Alpha so small that no Delaunay triangle survives.
ORCHARD_DEFINE_ERROR(EmptyShape);
// Resampling request that would shrink a mask.
ORCHARD_DEFINE_ERROR(SizeError);
// Upstream produced data that breaks a pipeline invariant.
ORCHARD_DEFINE_ERROR(InvariantViolation);
// Parameter vectors of different lengths.
ORCHARD_DEFINE_ERROR(ShapeError);
// A sampling pool cannot fill its share of a batch.
ORCHARD_DEFINE_ERROR(PoolExhausted);
// Schedule queried outside [0, total_steps).
ORCHARD_DEFINE_ERROR(RangeError);
// Annotation lacks the requested property.
ORCHARD_DEFINE_ERROR(PropertyError);
// Image has no annotations to build a ground-truth shape from.
ORCHARD_DEFINE_ERROR(EmptyGroundTruth);
// Scene generator could not place all objects.
ORCHARD_DEFINE_ERROR(PackingError);
// File could not be read or written.
ORCHARD_DEFINE_ERROR(IoError);

#undef ORCHARD_DEFINE_ERROR

// Manifest content does not match the schema. `path()` points at the
// offending field, e.g. "$.annotations[3].bbox".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Manifest references an image file that does not exist.
class MissingImage : public Error {
 public:
  explicit MissingImage(std::string file)
      : Error("missing image: " + file), file_(std::move(file)) {}
  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

// Errors from the external detector client. All carry the request id of the
// task that failed.
class DetectorError : public Error {
 public:
  DetectorError(std::string request_id, const std::string& what)
      : Error("request " + request_id + ": " + what),
        request_id_(std::move(request_id)) {}
  const std::string& request_id() const { return request_id_; }

 private:
  std::string request_id_;
};

class ExternalTimeout : public DetectorError {
 public:
  using DetectorError::DetectorError;
};

class ProtocolError : public DetectorError {
 public:
  using DetectorError::DetectorError;
};

class ProcessExit : public DetectorError {
 public:
  using DetectorError::DetectorError;
};

}  // namespace orchard

#endif  // ORCHARD_ERRORS_HPP_

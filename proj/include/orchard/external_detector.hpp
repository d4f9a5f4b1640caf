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
#ifndef ORCHARD_EXTERNAL_DETECTOR_HPP_
#define ORCHARD_EXTERNAL_DETECTOR_HPP_

// Client for detector child processes speaking newline-delimited JSON over
// stdin/stdout:
//
//   request:  {"id": "...", "image": "<path>", "tile": {"x":0,"y":0,"w":800,"h":800}}
//   response: {"id": "...", "detections": [{"x":..,"y":..,"w":..,"h":..,"score":..}]}
//
// Responses may arrive in any order; they are matched to requests by id.

#include <memory>
#include <string>
#include <vector>

#include "orchard/detector.hpp"

namespace orchard {

// Encodes one request line (without the trailing newline).
std::string encode_request(const TileTask& task);

// Decodes one response line. Throws ProtocolError (with whatever id could be
// recovered, else "?") on malformed JSON, a missing field, a non-numeric
// coordinate, a score outside [0, 1] or an "error" response. The boxes are
// returned as sent, tile-local and unclipped.
struct WireResponse {
  std::string id;
  std::vector<Detection> detections;
};
WireResponse decode_response(const std::string& line, TileId tile);

class ExternalDetector : public Detector {
 public:
  // Spawns the child. Throws ProcessExit("spawn") when it cannot be started.
  explicit ExternalDetector(ExternalSpec spec);
  // Closes the child's stdin and reaps it.
  ~ExternalDetector() override;

  ExternalDetector(const ExternalDetector&) = delete;
  ExternalDetector& operator=(const ExternalDetector&) = delete;

  // Blocks until the matching response arrives. Throws ExternalTimeout,
  // ProtocolError or ProcessExit, each carrying task.request_id; errors of one
  // request never fail another request that got a well-formed response.
  std::vector<Detection> detect(const TileTask& task) override;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace orchard

#endif  // ORCHARD_EXTERNAL_DETECTOR_HPP_

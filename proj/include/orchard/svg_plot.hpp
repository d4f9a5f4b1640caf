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
#ifndef ORCHARD_SVG_PLOT_HPP_
#define ORCHARD_SVG_PLOT_HPP_

#include <string>

#include "orchard/evaluation.hpp"

namespace orchard {

// Standalone SVG line chart of AR per bin: x is the bin's property midpoint,
// y is AR on a fixed [0, 1] axis.
std::string svg_line_chart(const BinCurve& curve, const std::string& title = {});

}  // namespace orchard

#endif  // ORCHARD_SVG_PLOT_HPP_

// Copyright 2026 The gramlimit Authors.
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

#ifndef GRAMLIMIT_REPORT_HPP_
#define GRAMLIMIT_REPORT_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gramlimit/limit.hpp"

namespace gramlimit {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Limit density drawn over a normalized histogram of `eigenvalues`.
std::string overlay_svg(const LimitDistribution& limit,
                        std::span<const double> eigenvalues, std::string_view title,
                        int bins = 60);

/// Line chart of one or more series on shared axes.
std::string line_chart_svg(std::span<const Series> series, std::string_view title,
                           std::string_view x_label, std::string_view y_label);

/// Fixed-width text table for console summaries.
std::string text_table(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

}  // namespace gramlimit

#endif  // GRAMLIMIT_REPORT_HPP_

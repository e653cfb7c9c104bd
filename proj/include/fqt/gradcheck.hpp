// Copyright 2026 The fqt Authors. All Rights Reserved.
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

#ifndef FQT_GRADCHECK_HPP_
#define FQT_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fqt/error.hpp"

namespace fqt {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<double> errors;  // per coordinate
  double step = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// |a - n| / max(|a|, |n|, 1e-12)
inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

// Compares `analytic` against central differences of `value` around `point`.
template <typename T>
GradCheckReport gradcheck(const std::function<T(std::span<const T>)>& value,
                          std::span<const T> analytic, std::vector<T> point,
                          double tolerance, double step = 1e-5) {
  if (analytic.size() != point.size()) {
    throw DimensionError("gradient has " + std::to_string(analytic.size()) +
                         " entries for a point of dimension " + std::to_string(point.size()));
  }
  GradCheckReport report;
  report.step = step;
  report.tolerance = tolerance;
  const T h = static_cast<T>(step);
  for (std::size_t k = 0; k < point.size(); ++k) {
    const T saved = point[k];
    point[k] = saved + h;
    const T up = value(point);
    point[k] = saved - h;
    const T down = value(point);
    point[k] = saved;
    const double numeric = (static_cast<double>(up) - static_cast<double>(down)) /
                           (static_cast<double>(h) * 2.0);
    if (!std::isfinite(numeric) || !std::isfinite(static_cast<double>(analytic[k]))) {
      throw NumericError("gradcheck produced a non-finite derivative at coordinate " +
                         std::to_string(k));
    }
    const double err = relative_error(analytic[k], numeric);
    report.errors.push_back(err);
    report.max_rel_error = std::max(report.max_rel_error, err);
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace fqt

#endif  // FQT_GRADCHECK_HPP_

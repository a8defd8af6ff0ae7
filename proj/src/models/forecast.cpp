// Copyright 2026 The deskml Authors
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

#include <algorithm>
#include <string>

#include "deskml/common/error.hpp"
#include "learners.hpp"

namespace deskml::models::detail {

ForecasterParams fit_forecaster(Family family, const Json& hp, std::span<const double> series) {
  if (series.empty()) fail(ErrorKind::kInvalidArgument, "HISTORY_TOO_SHORT", "forecasting needs at least one value");
  const std::size_t season = family == Family::kSeasonalNaive ? static_cast<std::size_t>(hp_int(hp, "season_length")) : 1;
  if (series.size() < season) {
    fail(ErrorKind::kInvalidArgument, "HISTORY_TOO_SHORT",
         "history of " + std::to_string(series.size()) + " values is shorter than the season length " +
             std::to_string(season));
  }
  ForecasterParams p;
  p.first = series.front();
  p.last = series.back();
  p.count = series.size();
  p.history_tail.assign(series.end() - static_cast<std::ptrdiff_t>(season), series.end());
  if (family == Family::kSesForecaster) {
    const double alpha = hp_real(hp, "alpha");
    double level = series.front();
    for (std::size_t i = 1; i < series.size(); ++i) level = alpha * series[i] + (1.0 - alpha) * level;
    p.level = level;
  } else {
    p.level = p.last;
  }
  return p;
}

std::vector<double> forecast_from(Family family, const Json&, const ForecasterParams& state, int horizon) {
  if (horizon <= 0) fail(ErrorKind::kInvalidArgument, "INVALID_HORIZON", "horizon must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(horizon));
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (family) {
      case Family::kSeasonalNaive:
        out[i] = state.history_tail[i % state.history_tail.size()];
        break;
      case Family::kDriftForecaster: {
        const double slope = state.count > 1 ? (state.last - state.first) / static_cast<double>(state.count - 1) : 0.0;
        out[i] = state.last + static_cast<double>(i + 1) * slope;
        break;
      }
      case Family::kSesForecaster:
        out[i] = state.level;
        break;
      default:
        out[i] = state.last;
    }
  }
  return out;
}

}  // namespace deskml::models::detail

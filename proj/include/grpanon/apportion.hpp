// Copyright 2026 The grpanon Authors
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

#ifndef GRPANON_APPORTION_HPP
#define GRPANON_APPORTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "grpanon/error.hpp"

namespace grpanon {

// Largest-remainder (Hamilton) apportionment: splits `total` integer units in
// proportion to non-negative `weights`. Each share is the floor of its quota
// plus at most one extra unit; extra units go to the largest fractional
// remainders, ties to the lower index. The result always sums to `total`.
inline std::vector<std::int64_t> largest_remainder(std::span<const double> weights, std::int64_t total) {
  if (total < 0) throw DomainError("apportionment total must be non-negative");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("apportionment weights must be finite and non-negative");
  std::vector<std::int64_t> shares(weights.size(), 0);
  if (total == 0) return shares;
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0)) throw DomainError("cannot apportion a positive total over zero weight");

  std::vector<double> remainder(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = weights[i] * static_cast<double>(total) / sum;
    const double fl = std::floor(quota);
    shares[i] = static_cast<std::int64_t>(fl);
    remainder[i] = quota - fl;
    assigned += shares[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  // Floating-point quotas can leave the floors a unit off in either direction.
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size(), ++assigned) ++shares[order[k]];
  for (std::size_t k = order.size(); assigned > total;) {
    k = (k == 0 ? order.size() : k) - 1;
    if (shares[order[k]] > 0) {
      --shares[order[k]];
      --assigned;
    }
  }
  return shares;
}

}  // namespace grpanon

#endif  // GRPANON_APPORTION_HPP

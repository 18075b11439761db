// Copyright 2026 The gw3d Authors
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

#ifndef GW3D_HISTOGRAM_HPP_
#define GW3D_HISTOGRAM_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace gw3d {

// Half-open bins [edges[i], edges[i+1]). Merging is associative and
// commutative, so partial histograms from parallel scans combine freely.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  static constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();

  static Histogram fixed_width(double lo, double hi, std::size_t bins);
  static Histogram log_width(double lo, double hi, std::size_t bins);

  // Same edges, zero counts.
  Histogram empty_like() const;

  std::size_t bin_of(double value) const;
  void add(double value);
  Histogram& merge(const Histogram& other);

  // Index of the fullest bin (first on ties).
  std::size_t mode_bin() const;

  // "lo,hi,count" rows after a header line.
  std::string to_csv() const;

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

}  // namespace gw3d

#endif  // GW3D_HISTOGRAM_HPP_

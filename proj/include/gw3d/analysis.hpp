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

#ifndef GW3D_ANALYSIS_HPP_
#define GW3D_ANALYSIS_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gw3d/histogram.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/words.hpp"

namespace gw3d {

// Seeded generator with fully specified output: mt19937_64 words, uniform
// doubles from the top 53 bits, Box-Muller normals and Marsaglia-Tsang
// gamma variates. Identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // [0, 1)
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [0, n)
  std::uint64_t below(std::uint64_t n);
  double normal();
  double gamma(double shape, double scale);
  double exponential(double scale) { return -scale * std::log1p(-uniform()); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

struct GammaFit {
  double shape = 0.0;  // k
  double scale = 0.0;  // theta
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Maximum-likelihood fit by Newton's method on ln k - psi(k) = s with
// s = ln(mean) - mean(ln x). Throws kInvalidArgument for n < 2,
// kNonPositiveSample and kZeroVariance.
GammaFit fit_gamma(std::span<const double> samples);

double gamma_log_pdf(double x, double shape, double scale);

enum class BinPolicy { kFixedWidth, kLogWidth };

struct BinSpec {
  BinPolicy policy = BinPolicy::kLogWidth;
  double lo = 1e-3;
  double hi = 1e3;
  std::size_t bins = 60;

  Histogram make() const;
};

// Perimeters of the facets that produce words (welded, non-degenerate).
std::vector<double> facet_perimeters(const TriangleMesh& mesh, const WordConfig& config = {});

// Throws kInvalidArgument for an empty corpus.
Histogram perimeter_histogram(std::span<const TriangleMesh> corpus, const BinSpec& bins,
                              const WordConfig& config = {}, Exec exec = Exec::kParallel);
Histogram histogram_of(std::span<const double> values, const BinSpec& bins, Exec exec = Exec::kParallel);

// Static plot: bars for the histogram, optional fitted density curve.
std::string histogram_svg(const Histogram& histogram, const std::optional<GammaFit>& fit,
                          const std::string& title);

std::string gamma_fit_text(const GammaFit& fit);

}  // namespace gw3d

#endif  // GW3D_ANALYSIS_HPP_

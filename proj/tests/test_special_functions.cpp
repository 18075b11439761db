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

#include <doctest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <numbers>

#include "gw3d/analysis.hpp"
#include "gw3d/special_functions.hpp"

using namespace gw3d;

TEST_SUITE("special_functions") {

TEST_CASE("digamma and trigamma against Boost.Math") {
  Rng rng(77);
  double worst_psi = 0.0, worst_tri = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = std::exp(rng.uniform(std::log(1e-3), std::log(1e4)));
    const double psi = boost::math::digamma(x);
    const double tri = boost::math::trigamma(x);
    worst_psi = std::max(worst_psi, std::abs(digamma(x) - psi) / std::max(1.0, std::abs(psi)));
    worst_tri = std::max(worst_tri, std::abs(trigamma(x) - tri) / tri);
  }
  CHECK(worst_psi < 1e-13);
  CHECK(worst_tri < 1e-13);
}

TEST_CASE("known values") {
  constexpr double kEulerGamma = 0.57721566490153286061;
  CHECK(digamma(1.0) == doctest::Approx(-kEulerGamma).epsilon(1e-15));
  CHECK(trigamma(1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-15));
  CHECK(digamma(0.5) == doctest::Approx(-kEulerGamma - 2.0 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("recurrence psi(x+1) = psi(x) + 1/x") {
  for (double x : {0.01, 0.3, 1.7, 9.5, 42.0}) {
    CHECK(digamma(x + 1) == doctest::Approx(digamma(x) + 1 / x).epsilon(1e-13));
    // Error bound scales with the operands, not their difference.
    CHECK(std::abs(trigamma(x + 1) - (trigamma(x) - 1 / (x * x))) <= 1e-13 * (trigamma(x) + 1 / (x * x)));
  }
}

}  // TEST_SUITE

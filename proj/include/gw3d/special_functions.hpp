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

#ifndef GW3D_SPECIAL_FUNCTIONS_HPP_
#define GW3D_SPECIAL_FUNCTIONS_HPP_

namespace gw3d {

// psi(x) for x > 0: upward recurrence to x >= 10, then the asymptotic series
// ln x - 1/(2x) - sum B_2n / (2n x^2n).
double digamma(double x);

// psi'(x) for x > 0: recurrence to x >= 10, then
// 1/x + 1/(2x^2) + sum B_2n / x^(2n+1).
double trigamma(double x);

}  // namespace gw3d

#endif  // GW3D_SPECIAL_FUNCTIONS_HPP_

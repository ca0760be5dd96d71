/*
 Copyright 2026 The softtraj Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SOFTTRAJ_QUADRATURE_HPP
#define SOFTTRAJ_QUADRATURE_HPP

#include <vector>

namespace softtraj {

struct QuadratureRule {
  std::vector<double> nodes;    // ascending, in [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Legendre polynomial of degree k shifted to [0, 1]: P_k(2s - 1).
double shifted_legendre(int k, double s);

}  // namespace softtraj

#endif  // SOFTTRAJ_QUADRATURE_HPP

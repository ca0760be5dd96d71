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

// Forward-mode dual numbers.
//
// Dual<T> carries a value and a single tangent, both of type T. Nesting
// (Dual<Dual<double>>) gives mixed second derivatives: seed the outer
// tangent with one direction and the inner tangent with another, and the
// tangent-of-tangent component holds the second directional derivative.
//
// Only the operations the dynamics code needs are provided. Comparisons act
// on the underlying double value so that branch selection is identical
// across all derivative levels.

#ifndef SOFTTRAJ_DUAL_HPP
#define SOFTTRAJ_DUAL_HPP

#include <cmath>
#include <ostream>
#include <type_traits>

#include <Eigen/Core>

namespace softtraj {

template <typename T>
struct Dual;

namespace detail {
template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};
}  // namespace detail

template <typename T>
inline constexpr bool is_dual_v = detail::is_dual<T>::value;

template <typename T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(const T& value, const T& tangent) : v(value), d(tangent) {}

  template <typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
  constexpr Dual(U value) : v(static_cast<T>(value)), d(T(0.0)) {}  // NOLINT

  // Allows Dual<double> -> Dual<Dual<double>> promotion for constants.
  template <typename U,
            typename = std::enable_if_t<!std::is_arithmetic_v<U> &&
                                        std::is_constructible_v<T, U>>>
  constexpr explicit Dual(const U& value) : v(T(value)), d(T(0.0)) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1.0) / o.v;
    v *= inv;
    d = (d - v * o.d) * inv;
    return *this;
  }
};

template <typename T>
inline Dual<T> operator+(const Dual<T>& a) {
  return a;
}
template <typename T>
inline Dual<T> operator-(const Dual<T>& a) {
  return Dual<T>(-a.v, -a.d);
}
template <typename T>
inline Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <typename T>
inline Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <typename T>
inline Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <typename T>
inline Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}

// Mixed arithmetic with plain doubles avoids promoting constants.
template <typename T>
inline Dual<T> operator+(const Dual<T>& a, double b) {
  return Dual<T>(a.v + b, a.d);
}
template <typename T>
inline Dual<T> operator+(double a, const Dual<T>& b) {
  return Dual<T>(a + b.v, b.d);
}
template <typename T>
inline Dual<T> operator-(const Dual<T>& a, double b) {
  return Dual<T>(a.v - b, a.d);
}
template <typename T>
inline Dual<T> operator-(double a, const Dual<T>& b) {
  return Dual<T>(a - b.v, -b.d);
}
template <typename T>
inline Dual<T> operator*(const Dual<T>& a, double b) {
  return Dual<T>(a.v * b, a.d * b);
}
template <typename T>
inline Dual<T> operator*(double a, const Dual<T>& b) {
  return Dual<T>(a * b.v, a * b.d);
}
template <typename T>
inline Dual<T> operator/(const Dual<T>& a, double b) {
  return Dual<T>(a.v / b, a.d / b);
}
template <typename T>
inline Dual<T> operator/(double a, const Dual<T>& b) {
  const T inv = T(1.0) / b.v;
  return Dual<T>(a * inv, -(a * inv) * b.d * inv);
}

inline double value_of(double x) { return x; }
template <typename T>
inline double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

template <typename T>
inline bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) < value_of(b);
}
template <typename T>
inline bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) > value_of(b);
}
template <typename T>
inline bool operator<=(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) <= value_of(b);
}
template <typename T>
inline bool operator>=(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) >= value_of(b);
}
template <typename T>
inline bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return a.v == b.v && a.d == b.d;
}
template <typename T>
inline bool operator!=(const Dual<T>& a, const Dual<T>& b) {
  return !(a == b);
}

using std::cos;
using std::sin;
using std::sqrt;

template <typename T>
inline Dual<T> sin(const Dual<T>& a) {
  return Dual<T>(sin(a.v), cos(a.v) * a.d);
}
template <typename T>
inline Dual<T> cos(const Dual<T>& a) {
  return Dual<T>(cos(a.v), -(sin(a.v) * a.d));
}
template <typename T>
inline Dual<T> sqrt(const Dual<T>& a) {
  const T s = sqrt(a.v);
  return Dual<T>(s, a.d / (2.0 * s));
}
template <typename T>
inline Dual<T> abs(const Dual<T>& a) {
  return value_of(a) < 0.0 ? -a : a;
}
template <typename T>
inline bool isfinite(const Dual<T>& a) {
  using std::isfinite;
  return isfinite(a.v) && isfinite(a.d);
}

template <typename T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& a) {
  return os << "(" << a.v << " + " << a.d << "e)";
}

/// Two-level dual seeded along `outer` and `inner` directions.
using Dual2 = Dual<Dual<double>>;

/// Extracts the mixed second-derivative component of a two-level dual.
inline double second_component(const Dual2& a) { return a.d.d; }

template <typename S>
using VectorX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatrixX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace softtraj

namespace Eigen {

template <typename T>
struct NumTraits<softtraj::Dual<T>> : NumTraits<double> {
  using Real = softtraj::Dual<T>;
  using NonInteger = softtraj::Dual<T>;
  using Nested = softtraj::Dual<T>;
  using Literal = softtraj::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() {
    return Real(NumTraits<double>::dummy_precision());
  }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

}  // namespace Eigen

#endif  // SOFTTRAJ_DUAL_HPP

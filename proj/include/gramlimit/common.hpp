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

#ifndef GRAMLIMIT_COMMON_HPP_
#define GRAMLIMIT_COMMON_HPP_

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace gramlimit {

using Complex = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using RowMatrix = RowMatrixX<double>;
using Vector = VectorX<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Error hierarchy. Every failure the library reports derives from Error so
// callers (the CLI in particular) can map it to a stage and an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mismatched sizes or lengths.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature exhausted its evaluation budget.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A filter could not be truncated within the requested tail tolerance
/// before reaching the coefficient cap.
class TailToleranceError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failure (fixed point, eigenvalues, uniqueness probe).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A request would exceed a configured memory or size budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// 64-bit FNV-1a. Used for config hashes and data provenance tags.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gramlimit

#endif  // GRAMLIMIT_COMMON_HPP_

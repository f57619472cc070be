#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sorkin {

template <typename Scalar = double>
using Complex = std::complex<Scalar>;

template <typename Scalar = double>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using RMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Normalization / unitarity / hermiticity tolerance. One knob for the whole
/// library; every constructor that validates an invariant takes it as a
/// defaulted parameter, so callers (and the runner configuration) can widen
/// or tighten it without recompiling.
inline constexpr double kNormTol = 1e-12;

/// Threshold below which an interference order counts as vanished. Looser
/// than kNormTol to absorb cancellation error in eighth-order sums.
inline constexpr double kVanishTol = 1e-10;

/// Density operators may dip this far below zero and still validate.
inline constexpr double kEigenvalueFloor = -1e-10;

/// Fringe weights below this are treated as exact dark points.
inline constexpr double kDarkFringeTol = 1e-14;

/// Next-wider real type, used to accumulate cancellation-heavy sums.
template <typename T>
struct wider {
  using type = T;
};
template <>
struct wider<float> {
  using type = double;
};
template <>
struct wider<double> {
  using type = long double;
};
template <typename T>
using wider_t = typename wider<T>::type;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible (bad Kronecker factors, traced dims, ...).
struct DimensionError : Error {
  using Error::Error;
};

/// A state or distribution failed its normalization invariant.
struct NormalizationError : Error {
  using Error::Error;
};

/// A Kraus set does not satisfy sum E_j^dag E_j = I.
struct CompletenessError : Error {
  using Error::Error;
};

/// A deformed recipe pushed some detection probability below zero.
struct RecipeOutOfRange : Error {
  using Error::Error;
};

/// A fringe point with zero Born weight received nonzero deformed weight.
struct DegenerateFringeError : Error {
  using Error::Error;
};

/// Scenario configuration is malformed or incomplete.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace sorkin

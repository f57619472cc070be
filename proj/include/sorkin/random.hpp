#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sorkin/qlinalg.hpp"
#include "sorkin/types.hpp"

namespace sorkin {

/// Seeded source of Gaussian draws. Every randomized routine in the library
/// takes one of these so that runs are reproducible from a single integer.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double gaussian() { return normal_(eng_); }

  std::complex<double> complex_gaussian() {
    const double re = normal_(eng_);
    const double im = normal_(eng_);
    return {re, im};
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(eng_);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

template <typename Scalar = double>
CVector<Scalar> random_complex_gaussian(Rng& rng, Eigen::Index dim) {
  CVector<Scalar> v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto z = rng.complex_gaussian();
    v(i) = Complex<Scalar>(Scalar(z.real()), Scalar(z.imag()));
  }
  return v;
}

template <typename Scalar = double>
CMatrix<Scalar> random_complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix<Scalar> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto z = rng.complex_gaussian();
      m(i, j) = Complex<Scalar>(Scalar(z.real()), Scalar(z.imag()));
    }
  return m;
}

template <typename Scalar = double>
qlinalg::StateVector<Scalar> random_state(Rng& rng, Eigen::Index dim) {
  return qlinalg::StateVector<Scalar>::normalized(random_complex_gaussian<Scalar>(rng, dim));
}

namespace detail {

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns of the
/// input are replaced by an orthonormal set spanning the same space.
template <typename Scalar>
void orthonormalize_columns(CMatrix<Scalar>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i)
        m.col(j) -= (m.col(i).adjoint() * m.col(j))(0, 0) * m.col(i);
    const Scalar n = m.col(j).norm();
    if (!(n > Scalar(0))) throw Error("orthonormalize_columns: rank-deficient input");
    m.col(j) /= n;
  }
}

}  // namespace detail

/// Haar-like random unitary: Gram-Schmidt applied to a complex-Gaussian
/// square matrix.
template <typename Scalar = double>
qlinalg::Operator<Scalar> random_unitary(Rng& rng, Eigen::Index dim) {
  CMatrix<Scalar> m = random_complex_gaussian_matrix<Scalar>(rng, dim, dim);
  detail::orthonormalize_columns(m);
  return qlinalg::Operator<Scalar>::unitary(std::move(m), kNormTol * double(dim));
}

/// Wishart-style random mixed state, G G^dag normalized to unit trace.
template <typename Scalar = double>
qlinalg::DensityOperator<Scalar> random_density(Rng& rng, Eigen::Index dim) {
  const CMatrix<Scalar> g = random_complex_gaussian_matrix<Scalar>(rng, dim, dim);
  CMatrix<Scalar> rho = g * g.adjoint();
  rho /= rho.trace().real();
  return qlinalg::DensityOperator<Scalar>(std::move(rho));
}

/// Random complete Kraus set: the blocks of a random isometry
/// C^dim -> C^dim (x) C^n_ops, so completeness holds by construction.
template <typename Scalar = double>
qlinalg::KrausSet<Scalar> random_kraus_set(Rng& rng, Eigen::Index dim, Eigen::Index n_ops) {
  CMatrix<Scalar> iso = random_complex_gaussian_matrix<Scalar>(rng, dim * n_ops, dim);
  detail::orthonormalize_columns(iso);
  std::vector<CMatrix<Scalar>> blocks;
  blocks.reserve(std::size_t(n_ops));
  for (Eigen::Index j = 0; j < n_ops; ++j) blocks.push_back(iso.middleRows(j * dim, dim));
  return qlinalg::KrausSet<Scalar>(std::move(blocks), kNormTol * double(dim * n_ops));
}

}  // namespace sorkin

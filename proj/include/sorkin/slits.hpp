#pragma once

#include <bit>
#include <cstdint>
#include <utility>

#include "sorkin/qlinalg.hpp"
#include "sorkin/types.hpp"

namespace sorkin::slits {

/// Which slits are open, as a bitmask over slit indices 0..n_slits-1.
/// The empty mask is a valid configuration (everything blocked).
struct SlitMask {
  int n_slits = 0;
  std::uint32_t open = 0;

  static SlitMask all(int n) { return {n, n >= 32 ? ~0u : ((1u << n) - 1u)}; }
  static SlitMask none(int n) { return {n, 0u}; }
  static SlitMask single(int n, int j) { return {n, 1u << j}; }

  bool contains(int j) const { return (open >> j) & 1u; }
  int count() const { return std::popcount(open); }
  bool in_range() const {
    return n_slits >= 1 && n_slits < 32 && (open >> n_slits) == 0u;
  }
};

/// Per-slit amplitude contributions: contrib(j, k) is the amplitude that a
/// particle passes slit j and arrives at detector point k. Closed slits
/// absorb; nothing is renormalized when a slit is blocked, which is what
/// makes the subset measure P(S) an event measure rather than a conditional
/// probability.
template <typename Scalar = double>
struct SlitField {
  CMatrix<Scalar> contrib;  // n_slits x n_detectors

  int n_slits() const { return int(contrib.rows()); }
  int n_detectors() const { return int(contrib.cols()); }
};

template <typename Scalar = double>
struct DetectionDistribution {
  RVector<Scalar> probs;
  Scalar total = Scalar(0);

  /// Reporting view: entries within -1e-12 of zero clipped up to 0.
  RVector<Scalar> clipped() const { return probs.cwiseMax(Scalar(0)); }
};

/// Propagates a source amplitude vector through an m-point discrete Fourier
/// transform: contrib(j, k) = source_j * exp(2 pi i j k / m) / sqrt(m).
/// The source dimension (number of slits) may be smaller than m; the screen
/// is identified with the transform's output basis.
template <typename Scalar>
SlitField<Scalar> field_from_dft(const qlinalg::StateVector<Scalar>& source, Eigen::Index m) {
  const Eigen::Index n = source.dim();
  if (n > m) throw DimensionError("field_from_dft: more slits than detector points");
  const CMatrix<Scalar> u = qlinalg::discrete_fourier_unitary<Scalar>(m).matrix();
  CMatrix<Scalar> contrib(n, m);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < m; ++k) contrib(j, k) = source.amps()(j) * u(k, j);
  return SlitField<Scalar>{std::move(contrib)};
}

/// P(S) at one detector point: squared modulus of the coherent sum over the
/// open slits. Empty mask gives 0.
template <typename Scalar>
Scalar subset_probability(const SlitField<Scalar>& field, const SlitMask& mask, Eigen::Index k) {
  if (k < 0 || k >= field.contrib.cols()) throw DimensionError("subset_probability: detector index out of range");
  if (mask.n_slits != field.n_slits() || !mask.in_range())
    throw DimensionError("subset_probability: mask outside field's slit range");
  Complex<Scalar> sum(0);
  for (int j = 0; j < mask.n_slits; ++j)
    if (mask.contains(j)) sum += field.contrib(j, k);
  return std::norm(sum);
}

template <typename Scalar>
DetectionDistribution<Scalar> born_distribution(const SlitField<Scalar>& field, const SlitMask& mask) {
  const Eigen::Index m = field.contrib.cols();
  RVector<Scalar> probs(m);
  for (Eigen::Index k = 0; k < m; ++k) probs(k) = subset_probability(field, mask, k);
  const Scalar total = probs.sum();
  return {std::move(probs), total};
}

}  // namespace sorkin::slits

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sorkin/recipes.hpp"
#include "sorkin/slits.hpp"
#include "sorkin/types.hpp"

namespace sorkin::interference {

/// N-th order interference term by direct inclusion-exclusion:
///   I(T) = sum over nonempty S subset of T of (-1)^(|T|-|S|) P(S).
/// `prob` is any callable from bitmask to probability with P(empty) = 0.
/// For |T| = 2 and |T| = 3 this reproduces the two- and three-slit
/// interference expressions sign for sign. Kept deliberately independent of
/// the lattice transform below; the two are cross-checked in tests.
template <typename Scalar, typename ProbFn>
Scalar interference_naive(ProbFn&& prob, std::uint32_t subset, int n_slits) {
  if (n_slits < 1 || n_slits >= 32) throw DimensionError("interference_naive: bad slit count");
  const std::uint32_t full = (1u << n_slits) - 1u;
  if (subset == 0u || (subset & ~full) != 0u)
    throw DimensionError("interference_naive: subset out of range");
  using Wide = wider_t<Scalar>;
  const int order = std::popcount(subset);
  Wide acc = 0;
  // Enumerate nonempty submasks of `subset`.
  for (std::uint32_t s = subset;; s = (s - 1u) & subset) {
    if (s != 0u) {
      const Scalar p = prob(s);
      const bool negate = ((order - std::popcount(s)) & 1) != 0;
      acc += negate ? -Wide(p) : Wide(p);
    }
    if (s == 0u) break;
  }
  return Scalar(acc);
}

template <typename Scalar>
Scalar interference_naive(std::span<const Scalar> probs, std::uint32_t subset, int n_slits) {
  return interference_naive<Scalar>([&](std::uint32_t s) { return probs[s]; }, subset, n_slits);
}

/// All interference terms at once via the signed Moebius transform over the
/// subset lattice, in place on a widened working buffer: O(N 2^N) instead of
/// the O(3^N) term-by-term expansion. Input is P indexed by bitmask with
/// P[0] = 0; output entry T holds I(T) (entry 0 is 0).
template <typename Scalar>
std::vector<Scalar> interference_spectrum_fast(std::span<const Scalar> probs) {
  const std::size_t len = probs.size();
  if (len < 2 || (len & (len - 1)) != 0)
    throw DimensionError("interference_spectrum_fast: length must be a power of two");
  if (probs[0] != Scalar(0))
    throw Error("interference_spectrum_fast: P(empty set) must be 0");
  using Wide = wider_t<Scalar>;
  std::vector<Wide> f(probs.begin(), probs.end());
  for (std::size_t bit = 1; bit < len; bit <<= 1)
    for (std::size_t mask = 0; mask < len; ++mask)
      if (mask & bit) f[mask] -= f[mask ^ bit];
  return std::vector<Scalar>(f.begin(), f.end());
}

/// Interference spectra for one or more detector points plus the aggregate
/// max |I| per order. A sum rule of order w fails iff max_abs_per_order(w-1)
/// is nonzero somewhere on the screen, so the aggregation is a max.
template <typename Scalar = double>
struct InterferenceReport {
  int n_slits = 0;
  std::vector<int> detectors;
  std::vector<std::vector<Scalar>> spectra;  // one 2^N-entry table per detector
  RVector<Scalar> max_abs_per_order;         // index w-1 holds max over |T| = w

  Scalar interference(std::size_t detector_pos, std::uint32_t subset) const {
    return spectra[detector_pos][subset];
  }
};

namespace detail {

template <typename Scalar>
InterferenceReport<Scalar> aggregate_report(int n_slits, std::vector<int> detectors,
                                            std::vector<std::vector<Scalar>> spectra) {
  InterferenceReport<Scalar> report;
  report.n_slits = n_slits;
  report.detectors = std::move(detectors);
  report.spectra = std::move(spectra);
  report.max_abs_per_order = RVector<Scalar>::Zero(n_slits);
  for (const auto& spectrum : report.spectra)
    for (std::uint32_t t = 1; t < spectrum.size(); ++t) {
      const int order = std::popcount(t);
      report.max_abs_per_order(order - 1) =
          std::max(report.max_abs_per_order(order - 1), Scalar(std::abs(spectrum[t])));
    }
  return report;
}

/// Subset probability tables P[mask][k] for a field under a recipe. The
/// whole field forms one coherence sector (a single particle's open slits
/// are mutually coherent), so a deformed recipe redistributes each masked
/// configuration's third-order signal across the screen.
template <typename Scalar>
std::vector<RVector<Scalar>> recipe_subset_tables(const slits::SlitField<Scalar>& field,
                                                  const recipes::ProbabilityRecipe& recipe) {
  const int n = field.n_slits();
  const Eigen::Index m = field.contrib.cols();
  if (n < 1 || n > 16) throw DimensionError("sum_rule_report: slit count out of range");
  const std::size_t size = std::size_t(1) << n;

  // Coherent amplitude sums over the lattice, built incrementally from the
  // lowest set bit: O(2^N) per detector.
  std::vector<CVector<Scalar>> amp(size, CVector<Scalar>(m));
  amp[0].setZero();
  for (std::size_t mask = 1; mask < size; ++mask) {
    const int j = std::countr_zero(mask);
    amp[mask] = amp[mask & (mask - 1)] + field.contrib.row(j).transpose();
  }

  std::vector<RVector<Scalar>> table(size, RVector<Scalar>(m));
  table[0].setZero();
  for (std::size_t mask = 1; mask < size; ++mask)
    for (Eigen::Index k = 0; k < m; ++k) table[mask](k) = std::norm(amp[mask](k));

  if (recipe.deforms()) {
    const Scalar eps = Scalar(recipe.epsilon);
    CVector<Scalar> open(m);
    for (std::size_t mask = 1; mask < size; ++mask) {
      if (std::popcount(mask) < 3) continue;
      RVector<Scalar> third(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::Index n_open = 0;
        for (std::size_t bits = mask; bits; bits &= bits - 1)
          open(n_open++) = field.contrib(std::countr_zero(bits), k);
        third(k) = recipes::third_order_invariant<Scalar>(open.head(n_open));
      }
      table[mask] += eps * recipes::deformation_zero_sum<Scalar>(table[mask], third);
    }
  }
  return table;
}

}  // namespace detail

/// Spectrum of every interference order for `field` under `recipe`, at one
/// detector point.
template <typename Scalar>
InterferenceReport<Scalar> sum_rule_report(const slits::SlitField<Scalar>& field,
                                           const recipes::ProbabilityRecipe& recipe,
                                           int detector_k) {
  if (detector_k < 0 || detector_k >= field.n_detectors())
    throw DimensionError("sum_rule_report: detector index out of range");
  const auto table = detail::recipe_subset_tables(field, recipe);
  std::vector<Scalar> probs(table.size());
  for (std::size_t mask = 0; mask < table.size(); ++mask) probs[mask] = table[mask](detector_k);
  std::vector<std::vector<Scalar>> spectra{
      interference_spectrum_fast<Scalar>(std::span<const Scalar>(probs))};
  return detail::aggregate_report<Scalar>(field.n_slits(), {detector_k}, std::move(spectra));
}

/// Same, across the whole screen.
template <typename Scalar>
InterferenceReport<Scalar> sum_rule_report(const slits::SlitField<Scalar>& field,
                                           const recipes::ProbabilityRecipe& recipe) {
  const auto table = detail::recipe_subset_tables(field, recipe);
  const Eigen::Index m = field.contrib.cols();
  std::vector<int> detectors(static_cast<std::size_t>(m));
  std::vector<std::vector<Scalar>> spectra;
  spectra.reserve(std::size_t(m));
  std::vector<Scalar> probs(table.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    detectors[std::size_t(k)] = int(k);
    for (std::size_t mask = 0; mask < table.size(); ++mask) probs[mask] = table[mask](k);
    spectra.push_back(interference_spectrum_fast<Scalar>(std::span<const Scalar>(probs)));
  }
  return detail::aggregate_report<Scalar>(field.n_slits(), std::move(detectors), std::move(spectra));
}

}  // namespace sorkin::interference

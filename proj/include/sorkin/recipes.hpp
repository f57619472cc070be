#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sorkin/random.hpp"
#include "sorkin/slits.hpp"
#include "sorkin/types.hpp"

namespace sorkin::recipes {

enum class RecipeKind { Born, SorkinDeformed };

/// The rule mapping coherent amplitude sectors to detection probabilities.
/// Born squares the coherent sums; SorkinDeformed adds a genuinely
/// third-order term of strength epsilon on top (see apply_recipe). Both
/// preserve the Born total and reduce to Born whenever no sector offers
/// three or more interfering paths.
struct ProbabilityRecipe {
  RecipeKind kind = RecipeKind::Born;
  double epsilon = 0.0;

  static ProbabilityRecipe born() { return {RecipeKind::Born, 0.0}; }
  static ProbabilityRecipe sorkin_deformed(double eps) { return {RecipeKind::SorkinDeformed, eps}; }

  bool deforms() const { return kind == RecipeKind::SorkinDeformed && epsilon != 0.0; }
};

/// Amplitude contributions of the mutually coherent paths feeding one
/// detector point. The label ties the same physical sector together across
/// detector points; distinct labels add incoherently.
template <typename Scalar = double>
struct CoherenceSector {
  int label = 0;
  CVector<Scalar> contribs;
};

/// [detector][sector]; the sector label sequence must be identical at every
/// detector point.
template <typename Scalar = double>
using SectorLayout = std::vector<std::vector<CoherenceSector<Scalar>>>;

/// Cyclic third-order invariant of an amplitude tuple:
///   sum over p < q < r of Im(a_p conj(a_q)) Im(a_q conj(a_r)) Im(a_r conj(a_p)).
/// Real, invariant under a common phase on all amplitudes, and identically
/// zero unless at least three amplitudes are nonzero. Ascending index order
/// fixes the orientation sign.
template <typename Scalar>
Scalar third_order_invariant(const CVector<Scalar>& a) {
  using Wide = wider_t<Scalar>;
  const Eigen::Index n = a.size();
  Wide acc = 0;
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const Scalar im_pq = std::imag(a(p) * std::conj(a(q)));
      if (im_pq == Scalar(0)) continue;
      for (Eigen::Index r = q + 1; r < n; ++r) {
        const Scalar im_qr = std::imag(a(q) * std::conj(a(r)));
        const Scalar im_rp = std::imag(a(r) * std::conj(a(p)));
        acc += Wide(im_pq) * Wide(im_qr) * Wide(im_rp);
      }
    }
  return Scalar(acc);
}

/// Zero-sum redistribution of a third-order signal across detector points:
///   delta_k = t_k - (mass_k / sum mass) * sum t.
/// Vanishes identically when the mass total is zero. The subtraction makes
/// sum_k delta_k = 0, which is what keeps deformed distributions normalized.
template <typename Scalar>
RVector<Scalar> deformation_zero_sum(const RVector<Scalar>& mass, const RVector<Scalar>& t) {
  if (mass.size() != t.size()) throw DimensionError("deformation_zero_sum: length mismatch");
  const Scalar mass_total = mass.sum();
  if (mass_total == Scalar(0)) return RVector<Scalar>::Zero(t.size());
  const Scalar t_total = t.sum();
  return t - mass * (t_total / mass_total);
}

/// Everything apply_recipe knows, sector-resolved. `born_mass` and
/// `deformed_mass` are (sector label) x (detector) tables; scenario code
/// reads joint probabilities off them.
template <typename Scalar = double>
struct RecipeEvaluation {
  slits::DetectionDistribution<Scalar> dist;
  std::vector<int> labels;
  RMatrix<Scalar> born_mass;      // labels.size() x n_detectors
  RMatrix<Scalar> deformed_mass;  // equals born_mass under Born
};

template <typename Scalar>
RecipeEvaluation<Scalar> apply_recipe_detailed(const SectorLayout<Scalar>& sectors,
                                               const ProbabilityRecipe& recipe) {
  const Eigen::Index m = Eigen::Index(sectors.size());
  if (m == 0) throw DimensionError("apply_recipe: no detector points");
  const std::size_t n_sectors = sectors.front().size();
  for (const auto& at_k : sectors)
    if (at_k.size() != n_sectors)
      throw DimensionError("apply_recipe: sector structure differs across detector points");

  RecipeEvaluation<Scalar> out;
  out.labels.reserve(n_sectors);
  for (std::size_t s = 0; s < n_sectors; ++s) out.labels.push_back(sectors.front()[s].label);
  for (const auto& at_k : sectors)
    for (std::size_t s = 0; s < n_sectors; ++s)
      if (at_k[s].label != out.labels[s])
        throw DimensionError("apply_recipe: sector labels differ across detector points");

  out.born_mass.resize(Eigen::Index(n_sectors), m);
  RMatrix<Scalar> third(Eigen::Index(n_sectors), m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (std::size_t s = 0; s < n_sectors; ++s) {
      const CVector<Scalar>& a = sectors[std::size_t(k)][s].contribs;
      out.born_mass(Eigen::Index(s), k) = std::norm(Complex<Scalar>(a.sum()));
      third(Eigen::Index(s), k) = recipe.deforms() ? third_order_invariant(a) : Scalar(0);
    }

  out.deformed_mass = out.born_mass;
  if (recipe.deforms()) {
    const Scalar eps = Scalar(recipe.epsilon);
    for (std::size_t s = 0; s < n_sectors; ++s) {
      const RVector<Scalar> mass = out.born_mass.row(Eigen::Index(s)).transpose();
      const RVector<Scalar> t = third.row(Eigen::Index(s)).transpose();
      out.deformed_mass.row(Eigen::Index(s)) += eps * deformation_zero_sum(mass, t).transpose();
    }
  }

  RVector<Scalar> probs = out.deformed_mass.colwise().sum().transpose();
  for (Eigen::Index k = 0; k < m; ++k)
    if (double(probs(k)) < -1e-12)
      throw RecipeOutOfRange("apply_recipe: probability " + std::to_string(double(probs(k))) +
                             " at detector " + std::to_string(k) +
                             " (deformation too large for this field)");
  const Scalar total = probs.sum();
  out.dist = slits::DetectionDistribution<Scalar>{std::move(probs), total};
  return out;
}

template <typename Scalar>
slits::DetectionDistribution<Scalar> apply_recipe(const SectorLayout<Scalar>& sectors,
                                                  const ProbabilityRecipe& recipe) {
  return apply_recipe_detailed(sectors, recipe).dist;
}

/// Maximum violations observed over a batch of seeded random fields.
struct RecipeValidation {
  double max_normalization_violation = 0.0;  // |sum probs - Born total|
  double max_two_path_deviation = 0.0;       // vs Born when <= 2 paths per sector
  double max_eps0_deviation = 0.0;           // epsilon = 0 vs Born
  double min_probability = 0.0;              // most negative emitted probability
  int out_of_range_count = 0;                // RecipeOutOfRange occurrences
};

/// Stress-tests a recipe's contract on random single-sector n-slit fields.
template <typename Scalar = double>
RecipeValidation validate_recipe(const ProbabilityRecipe& recipe, Rng& rng, int trials,
                                 int n_slits = 3, int n_detectors = 4) {
  RecipeValidation report;
  report.min_probability = 1.0;
  for (int t = 0; t < trials; ++t) {
    SectorLayout<Scalar> layout(static_cast<std::size_t>(n_detectors));
    SectorLayout<Scalar> two_path = layout;
    for (int k = 0; k < n_detectors; ++k) {
      CVector<Scalar> a = random_complex_gaussian<Scalar>(rng, n_slits);
      CVector<Scalar> pair = a;
      pair.tail(n_slits - 2).setZero();
      layout[std::size_t(k)].push_back({0, std::move(a)});
      two_path[std::size_t(k)].push_back({0, std::move(pair)});
    }
    try {
      const auto born = apply_recipe(layout, ProbabilityRecipe::born());
      const auto got = apply_recipe(layout, recipe);
      report.max_normalization_violation =
          std::max(report.max_normalization_violation, std::abs(double(got.total - born.total)));
      report.min_probability = std::min(report.min_probability, double(got.probs.minCoeff()));

      ProbabilityRecipe frozen = recipe;
      frozen.epsilon = 0.0;
      const auto at_zero = apply_recipe(layout, frozen);
      report.max_eps0_deviation = std::max(
          report.max_eps0_deviation, double((at_zero.probs - born.probs).cwiseAbs().maxCoeff()));

      const auto born_pair = apply_recipe(two_path, ProbabilityRecipe::born());
      const auto got_pair = apply_recipe(two_path, recipe);
      report.max_two_path_deviation = std::max(
          report.max_two_path_deviation,
          double((got_pair.probs - born_pair.probs).cwiseAbs().maxCoeff()));
    } catch (const RecipeOutOfRange&) {
      ++report.out_of_range_count;
    }
  }
  return report;
}

}  // namespace sorkin::recipes

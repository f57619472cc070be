#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sorkin/qlinalg.hpp"
#include "sorkin/recipes.hpp"
#include "sorkin/slits.hpp"
#include "sorkin/types.hpp"

namespace sorkin::scenarios {

/// Pure state of a dimA x dimB composite, stored as the amplitude matrix
/// amps(a, b). Must be normalized.
template <typename Scalar = double>
class BipartiteState {
 public:
  explicit BipartiteState(CMatrix<Scalar> amps, double tol = kNormTol) : amps_(std::move(amps)) {
    if (amps_.rows() < 1 || amps_.cols() < 1) throw DimensionError("BipartiteState: empty");
    if (!amps_.allFinite()) throw Error("BipartiteState: non-finite amplitude");
    const double n2 = double(amps_.squaredNorm());
    if (std::abs(n2 - 1.0) > tol)
      throw NormalizationError("BipartiteState: squared norm is " + std::to_string(n2));
  }

  Eigen::Index dimA() const { return amps_.rows(); }
  Eigen::Index dimB() const { return amps_.cols(); }
  const CMatrix<Scalar>& amps() const { return amps_; }

  /// Alice's reduced density matrix, amps amps^dag.
  CMatrix<Scalar> reduced_A() const { return amps_ * amps_.adjoint(); }
  /// Bob's reduced density matrix.
  CMatrix<Scalar> reduced_B() const { return amps_.transpose() * amps_.conjugate(); }

 private:
  CMatrix<Scalar> amps_;
};

/// The 2 x (N+1) non-maximally entangled state used by the multi-slit
/// signaling schemes: the first N slit modes ride with Alice's |0>, the last
/// mode with her |1>, so N paths stay mutually coherent and the last is
/// incoherent from them.
template <typename Scalar>
BipartiteState<Scalar> build_sorkin_state(const CVector<Scalar>& alphas, double tol = kNormTol) {
  const Eigen::Index n_plus_1 = alphas.size();
  if (n_plus_1 < 2) throw DimensionError("build_sorkin_state: need at least two amplitudes");
  const double n2 = double(alphas.squaredNorm());
  if (std::abs(n2 - 1.0) > tol)
    throw NormalizationError("build_sorkin_state: squared norm is " + std::to_string(n2));
  CMatrix<Scalar> amps = CMatrix<Scalar>::Zero(2, n_plus_1);
  for (Eigen::Index j = 0; j + 1 < n_plus_1; ++j) amps(0, j) = alphas(j);
  amps(1, n_plus_1 - 1) = alphas(n_plus_1 - 1);
  return BipartiteState<Scalar>(std::move(amps), tol);
}

/// Screen-basis decomposition of a qubit x m state after Bob's DFT
/// propagation: per screen point k the unnormalized conditional state
/// psi_k = (Y_k, Z_k) on Alice's side and the fringe weight
/// B_k = |Y_k|^2 + |Z_k|^2.
template <typename Scalar = double>
struct ScreenDecomposition {
  CVector<Scalar> y;
  CVector<Scalar> z;
  RVector<Scalar> fringe;  // B_k
  CMatrix<Scalar> psi;     // 2 x m, column k = psi_k

  Eigen::Index n_points() const { return fringe.size(); }
};

template <typename Scalar>
ScreenDecomposition<Scalar> screen_decomposition(const BipartiteState<Scalar>& state) {
  if (state.dimA() != 2) throw DimensionError("screen_decomposition: requires dimA = 2");
  const Eigen::Index m = state.dimB();
  const CMatrix<Scalar>& u = qlinalg::discrete_fourier_unitary<Scalar>(m).matrix();
  const CMatrix<Scalar> propagated = state.amps() * u.transpose();  // (I (x) U) amps
  ScreenDecomposition<Scalar> dec;
  dec.y = propagated.row(0).transpose();
  dec.z = propagated.row(1).transpose();
  dec.psi = propagated;
  dec.fringe = (dec.y.cwiseAbs2() + dec.z.cwiseAbs2());
  return dec;
}

/// Weighted set of normalized pure states.
template <typename Scalar = double>
struct Ensemble {
  struct Member {
    Scalar weight;
    CVector<Scalar> state;
  };
  std::vector<Member> members;

  CMatrix<Scalar> density() const {
    if (members.empty()) throw DimensionError("Ensemble: empty");
    const Eigen::Index d = members.front().state.size();
    CMatrix<Scalar> rho = CMatrix<Scalar>::Zero(d, d);
    for (const auto& m : members) rho += m.weight * (m.state * m.state.adjoint());
    return rho;
  }

  Scalar total_weight() const {
    Scalar w = 0;
    for (const auto& m : members) w += m.weight;
    return w;
  }
};

enum class BobBasis { Slit, Screen };

/// The ensemble Bob's measurement remotely prepares on Alice's side:
/// slit basis conditions on the B columns directly, screen basis on the
/// DFT-propagated columns. Zero-weight members are dropped.
template <typename Scalar>
Ensemble<Scalar> conditional_ensemble(const BipartiteState<Scalar>& state, BobBasis basis) {
  CMatrix<Scalar> amps = state.amps();
  if (basis == BobBasis::Screen) {
    const CMatrix<Scalar>& u = qlinalg::discrete_fourier_unitary<Scalar>(state.dimB()).matrix();
    amps = amps * u.transpose();
  }
  Ensemble<Scalar> e;
  for (Eigen::Index b = 0; b < amps.cols(); ++b) {
    const Scalar w = amps.col(b).squaredNorm();
    if (double(w) < kDarkFringeTol) continue;
    e.members.push_back({w, amps.col(b) / std::sqrt(w)});
  }
  return e;
}

/// Two ensembles are operationally equivalent iff they average to the same
/// density operator (then one arises from the other by a rotation on the
/// purifying system).
template <typename Scalar>
bool hjw_equivalent(const Ensemble<Scalar>& e1, const Ensemble<Scalar>& e2, double tol = 1e-10) {
  if (e1.members.empty() || e2.members.empty()) return false;
  if (e1.members.front().state.size() != e2.members.front().state.size()) return false;
  const CMatrix<Scalar> d1 = e1.density();
  const CMatrix<Scalar> d2 = e2.density();
  return double((d1 - d2).cwiseAbs().maxCoeff()) <= tol;
}

/// Coarse-graining of Bob's basis into disjoint blocks covering
/// 0..dimB-1; block k spans the invariant subspace H_A (x) span{|b> : b in
/// block k}.
struct PartitionSpec {
  std::vector<std::vector<int>> blocks;

  void validate(Eigen::Index dimB) const {
    std::vector<int> seen(std::size_t(dimB), 0);
    for (const auto& block : blocks)
      for (int b : block) {
        if (b < 0 || b >= int(dimB)) throw DimensionError("PartitionSpec: index out of range");
        if (seen[std::size_t(b)]++) throw DimensionError("PartitionSpec: blocks overlap");
      }
    for (int c : seen)
      if (!c) throw DimensionError("PartitionSpec: blocks do not cover the B basis");
  }
};

/// Sector layout of a bipartite state on Bob's screen: paths correlated with
/// the same A-basis element are mutually coherent, different A elements add
/// incoherently. Sector a at screen point k carries contributions
/// amps(a, j) U(k, j) over slits j.
template <typename Scalar>
recipes::SectorLayout<Scalar> screen_sector_layout(const BipartiteState<Scalar>& state) {
  const Eigen::Index m = state.dimB();
  const CMatrix<Scalar>& u = qlinalg::discrete_fourier_unitary<Scalar>(m).matrix();
  recipes::SectorLayout<Scalar> layout(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) {
    layout[std::size_t(k)].reserve(std::size_t(state.dimA()));
    for (Eigen::Index a = 0; a < state.dimA(); ++a) {
      CVector<Scalar> contribs(m);
      for (Eigen::Index j = 0; j < m; ++j) contribs(j) = state.amps()(a, j) * u(k, j);
      layout[std::size_t(k)].push_back({int(a), std::move(contribs)});
    }
  }
  return layout;
}

/// Deformed screen marginals of a qubit x m state (Eq.-(14)-style): the
/// fringe B' from the recipe and the screen-steered operator
/// sum_k (B'_k / B_k) |psi_k><psi_k|. The operator has unit trace by recipe
/// normalization but may fail positivity; the minimum eigenvalue is reported
/// rather than rejected.
template <typename Scalar = double>
struct NonBornMarginals {
  CMatrix<Scalar> rho_screen;
  slits::DetectionDistribution<Scalar> fringe;
  recipes::RecipeEvaluation<Scalar> evaluation;
  Scalar min_eigenvalue = 0;
};

template <typename Scalar>
NonBornMarginals<Scalar> nonborn_screen_marginals(const BipartiteState<Scalar>& state,
                                                  const recipes::ProbabilityRecipe& recipe) {
  const auto dec = screen_decomposition(state);
  auto ev = recipes::apply_recipe_detailed(screen_sector_layout(state), recipe);
  NonBornMarginals<Scalar> out;
  out.rho_screen = CMatrix<Scalar>::Zero(2, 2);
  for (Eigen::Index k = 0; k < dec.n_points(); ++k) {
    const Scalar b = dec.fringe(k);
    const Scalar bp = ev.dist.probs(k);
    if (double(b) < kDarkFringeTol) {
      if (std::abs(double(bp)) < kDarkFringeTol) continue;  // dark point stays dark
      throw DegenerateFringeError("nonborn_screen_marginals: B'_k nonzero on a dark fringe point");
    }
    out.rho_screen += (bp / b) * (dec.psi.col(k) * dec.psi.col(k).adjoint());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(out.rho_screen, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.fringe = std::move(ev.dist);
  out.evaluation = std::move(ev);
  return out;
}

struct RedistributionResult {
  bool satisfied = false;
  double residual = 0.0;
};

/// Does the deformed fringe leave Alice's computational marginal untouched?
/// Under the sector-resolved recipe the deformation moves weight only among
/// screen points tied to the same A element, so the per-sector totals --
/// and with them Prob(A = a) -- are preserved by construction; the residual
/// reports how well that survives floating point.
template <typename Scalar>
RedistributionResult redistribution_check(const BipartiteState<Scalar>& state,
                                          const recipes::ProbabilityRecipe& recipe,
                                          double tol = kNormTol) {
  const auto ev = recipes::apply_recipe_detailed(screen_sector_layout(state), recipe);
  double residual = 0.0;
  for (Eigen::Index s = 0; s < ev.born_mass.rows(); ++s)
    residual = std::max(residual,
                        std::abs(double(ev.deformed_mass.row(s).sum() - ev.born_mass.row(s).sum())));
  return {residual < tol, residual};
}

/// Residual of the same marginal for an externally supplied fringe B',
/// splitting each B'_k across Alice's outcomes in the Born proportions
/// |Y_k|^2 : |Z_k|^2 (no sector resolution available for a bare B').
template <typename Scalar>
double redistribution_residual(const BipartiteState<Scalar>& state, const RVector<Scalar>& b_prime) {
  const auto dec = screen_decomposition(state);
  if (b_prime.size() != dec.n_points())
    throw DimensionError("redistribution_residual: fringe length mismatch");
  using Wide = wider_t<Scalar>;
  Wide prob0 = 0, born0 = 0;
  for (Eigen::Index k = 0; k < dec.n_points(); ++k) {
    const Scalar b = dec.fringe(k);
    const Scalar y2 = std::norm(dec.y(k));
    if (double(b) < kDarkFringeTol) {
      if (std::abs(double(b_prime(k))) >= kDarkFringeTol)
        throw DegenerateFringeError("redistribution_residual: B'_k nonzero on a dark fringe point");
      continue;
    }
    prob0 += Wide(b_prime(k)) * Wide(y2) / Wide(b);
    born0 += Wide(y2);
  }
  return std::abs(double(prob0 - born0));
}

/// Headline output of the signaling schemes: the two context-conditioned
/// Bob distributions, the two Alice operators they steer to, and distances
/// between them.
template <typename Scalar = double>
struct SignalingReport {
  std::string scenario;
  std::array<std::string, 2> context_labels;
  RVector<Scalar> bob_context1;
  RVector<Scalar> bob_context2;
  CMatrix<Scalar> alice_context1;
  CMatrix<Scalar> alice_context2;
  Scalar trace_distance_A = 0;
  Scalar total_variation_B = 0;
  bool redistribution_checked = false;
  bool redistribution_satisfied = false;
  Scalar redistribution_residual = 0;
  Scalar min_eigenvalue_screen = 0;  // of the screen-steered Alice operator
  RVector<Scalar> bob_slit;          // B->A only: Bob's slit-basis distribution
};

/// B -> A scheme: Bob either measures at the diaphragm (slit basis, where
/// the Born rule holds because each detection has a single path) or at the
/// screen under `recipe`. Contexts compared: Bob's Born screen fringe vs the
/// recipe fringe; Alice's slit-conditioned state vs the screen-steered one.
template <typename Scalar>
SignalingReport<Scalar> b2a_signaling(const CVector<Scalar>& alphas,
                                      const recipes::ProbabilityRecipe& recipe) {
  const auto state = build_sorkin_state(alphas);
  const auto dec = screen_decomposition(state);
  const auto marg = nonborn_screen_marginals(state, recipe);
  const auto redis = redistribution_check(state, recipe);

  SignalingReport<Scalar> report;
  report.scenario = "b2a";
  report.context_labels = {"screen_born", "screen_recipe"};
  report.bob_context1 = dec.fringe;
  report.bob_context2 = marg.fringe.probs;
  report.alice_context1 = state.reduced_A();
  report.alice_context2 = marg.rho_screen;
  report.trace_distance_A = qlinalg::trace_distance(report.alice_context1, report.alice_context2);
  report.total_variation_B = qlinalg::total_variation(report.bob_context1, report.bob_context2);
  report.redistribution_checked = true;
  report.redistribution_satisfied = redis.satisfied;
  report.redistribution_residual = Scalar(redis.residual);
  report.min_eigenvalue_screen = marg.min_eigenvalue;
  report.bob_slit = state.amps().colwise().squaredNorm().real().transpose();
  return report;
}

namespace detail {

/// Sector layout for the 2 x 3 state after an optional basis change on A.
template <typename Scalar>
recipes::SectorLayout<Scalar> a_side_sector_layout(const CMatrix<Scalar>& amps) {
  const Eigen::Index m = amps.cols();
  const CMatrix<Scalar>& u = qlinalg::discrete_fourier_unitary<Scalar>(m).matrix();
  recipes::SectorLayout<Scalar> layout(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index a = 0; a < amps.rows(); ++a) {
      CVector<Scalar> contribs(m);
      for (Eigen::Index j = 0; j < m; ++j) contribs(j) = amps(a, j) * u(k, j);
      layout[std::size_t(k)].push_back({int(a), std::move(contribs)});
    }
  return layout;
}

}  // namespace detail

/// A -> B scheme on the 2 x 3 state |0>(alpha|0> + beta|1>) + gamma|1>|2>:
/// Alice measures in the computational basis (two sectors with at most two
/// paths each, every recipe reduces to Born) or the Hadamard basis (two
/// three-path sectors, the deformation bites). Returned distance: total
/// variation between Bob's two screen distributions.
template <typename Scalar>
SignalingReport<Scalar> a2b_signaling(Complex<Scalar> alpha, Complex<Scalar> beta,
                                      Complex<Scalar> gamma,
                                      const recipes::ProbabilityRecipe& recipe,
                                      double tol = kNormTol) {
  const double n2 = std::norm(alpha) + std::norm(beta) + std::norm(gamma);
  if (std::abs(n2 - 1.0) > tol)
    throw NormalizationError("a2b_signaling: squared norm is " + std::to_string(n2));
  CMatrix<Scalar> amps = CMatrix<Scalar>::Zero(2, 3);
  amps(0, 0) = alpha;
  amps(0, 1) = beta;
  amps(1, 2) = gamma;

  const CMatrix<Scalar> amps_hadamard = qlinalg::hadamard_qubit<Scalar>().matrix() * amps;

  const auto ev1 = recipes::apply_recipe_detailed(detail::a_side_sector_layout(amps), recipe);
  const auto ev2 = recipes::apply_recipe_detailed(detail::a_side_sector_layout(amps_hadamard), recipe);

  SignalingReport<Scalar> report;
  report.scenario = "a2b";
  report.context_labels = {"computational", "hadamard"};
  report.bob_context1 = ev1.dist.probs;
  report.bob_context2 = ev2.dist.probs;
  const CMatrix<Scalar> rho_a = amps * amps.adjoint();
  report.alice_context1 = rho_a;
  report.alice_context2 = rho_a;  // Alice's marginal is untouched by her own choice
  report.trace_distance_A = 0;
  report.total_variation_B = qlinalg::total_variation(report.bob_context1, report.bob_context2);
  return report;
}

/// Block measures in the two measurement contexts.
template <typename Scalar = double>
struct ContextProbeResult {
  RVector<Scalar> mu_context1;
  RVector<Scalar> mu_context2;
  Scalar max_abs_diff = 0;
};

namespace detail {

template <typename Scalar>
RVector<Scalar> block_measures(const CMatrix<Scalar>& amps_ctx, const PartitionSpec& partition,
                               const recipes::ProbabilityRecipe& recipe) {
  const Eigen::Index n_blocks = Eigen::Index(partition.blocks.size());
  const Eigen::Index dim_a = amps_ctx.rows();
  RMatrix<Scalar> mass(dim_a, n_blocks);
  RMatrix<Scalar> third(dim_a, n_blocks);
  for (Eigen::Index a = 0; a < dim_a; ++a)
    for (Eigen::Index k = 0; k < n_blocks; ++k) {
      const auto& block = partition.blocks[std::size_t(k)];
      CVector<Scalar> cells(Eigen::Index(block.size()));
      for (std::size_t i = 0; i < block.size(); ++i) cells(Eigen::Index(i)) = amps_ctx(a, block[i]);
      mass(a, k) = cells.squaredNorm();
      third(a, k) = recipe.deforms() ? recipes::third_order_invariant(cells) : Scalar(0);
    }
  RVector<Scalar> mu = RVector<Scalar>::Zero(n_blocks);
  for (Eigen::Index a = 0; a < dim_a; ++a) {
    mu += mass.row(a).transpose();
    if (recipe.deforms())
      mu += Scalar(recipe.epsilon) *
            recipes::deformation_zero_sum<Scalar>(mass.row(a).transpose(), third.row(a).transpose());
  }
  return mu;
}

}  // namespace detail

/// Gleason-style probe: the measure of each invariant block J_k when the
/// measurement basis is completed on A by uA vs uA'. Under Born the two
/// columns agree identically; under a deformed recipe the blocks (>= 3 basis
/// states wide) act as coherence sectors -- one admissible reading of how a
/// non-Bornian rule extends to arbitrary product contexts, and the one this
/// probe adopts.
template <typename Scalar>
ContextProbeResult<Scalar> contextuality_probe(const BipartiteState<Scalar>& state,
                                               const PartitionSpec& partition,
                                               const qlinalg::Operator<Scalar>& uA,
                                               const qlinalg::Operator<Scalar>& uA_prime,
                                               const recipes::ProbabilityRecipe& recipe) {
  partition.validate(state.dimB());
  if (uA.dim() != state.dimA() || uA_prime.dim() != state.dimA())
    throw DimensionError("contextuality_probe: context unitary dim mismatch");
  // Outcome amplitudes in the product basis {u|a> (x) |b>}: <a| u^dag amps.
  const CMatrix<Scalar> ctx1 = uA.matrix().adjoint() * state.amps();
  const CMatrix<Scalar> ctx2 = uA_prime.matrix().adjoint() * state.amps();
  ContextProbeResult<Scalar> out;
  out.mu_context1 = detail::block_measures(ctx1, partition, recipe);
  out.mu_context2 = detail::block_measures(ctx2, partition, recipe);
  out.max_abs_diff = (out.mu_context1 - out.mu_context2).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace sorkin::scenarios

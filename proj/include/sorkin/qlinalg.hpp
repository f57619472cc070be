#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "sorkin/types.hpp"

namespace sorkin::qlinalg {

/// Pure-state amplitude vector. Amplitudes must be finite; normalization is
/// an opt-in invariant checked by assert_normalized or the normalized()
/// factory, since sub-normalized vectors appear as conditional states.
template <typename Scalar = double>
class StateVector {
 public:
  explicit StateVector(CVector<Scalar> amps) : amps_(std::move(amps)) {
    if (amps_.size() < 1) throw DimensionError("StateVector: dim must be >= 1");
    if (!amps_.allFinite()) throw Error("StateVector: non-finite amplitude");
  }

  static StateVector basis(Eigen::Index dim, Eigen::Index j) {
    CVector<Scalar> v = CVector<Scalar>::Zero(dim);
    v(j) = Complex<Scalar>(1);
    return StateVector(std::move(v));
  }

  /// Scales the input to unit norm.
  static StateVector normalized(CVector<Scalar> amps) {
    const Scalar n = amps.norm();
    if (!(n > Scalar(0))) throw NormalizationError("StateVector: zero vector cannot be normalized");
    return StateVector(amps / n);
  }

  Eigen::Index dim() const { return amps_.size(); }
  const CVector<Scalar>& amps() const { return amps_; }
  Scalar squared_norm() const { return amps_.squaredNorm(); }

  bool is_normalized(double tol = kNormTol) const {
    return std::abs(double(squared_norm()) - 1.0) <= tol;
  }
  void assert_normalized(double tol = kNormTol) const {
    if (!is_normalized(tol))
      throw NormalizationError("StateVector: squared norm is " + std::to_string(double(squared_norm())));
  }

 private:
  CVector<Scalar> amps_;
};

/// Square matrix with a constructor-specific invariant: unitary() enforces
/// U^dag U = I, hermitian() enforces M = M^dag, both to `tol`.
template <typename Scalar = double>
class Operator {
 public:
  static Operator unitary(CMatrix<Scalar> m, double tol = kNormTol) {
    check_square(m);
    const CMatrix<Scalar> gram = m.adjoint() * m;
    const CMatrix<Scalar> eye = CMatrix<Scalar>::Identity(m.rows(), m.cols());
    if (double((gram - eye).cwiseAbs().maxCoeff()) > tol)
      throw NormalizationError("Operator::unitary: U^dag U deviates from identity");
    return Operator(std::move(m));
  }

  static Operator hermitian(CMatrix<Scalar> m, double tol = kNormTol) {
    check_square(m);
    if (double((m - m.adjoint().eval()).cwiseAbs().maxCoeff()) > tol)
      throw NormalizationError("Operator::hermitian: M deviates from M^dag");
    return Operator(std::move(m));
  }

  static Operator identity(Eigen::Index dim) {
    return Operator(CMatrix<Scalar>::Identity(dim, dim));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix<Scalar>& matrix() const { return m_; }

 private:
  explicit Operator(CMatrix<Scalar> m) : m_(std::move(m)) {}
  static void check_square(const CMatrix<Scalar>& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw DimensionError("Operator: matrix must be square");
    if (!m.allFinite()) throw Error("Operator: non-finite entry");
  }
  CMatrix<Scalar> m_;
};

/// Mixed state. Validates hermiticity, unit trace and spectrum >= the
/// eigenvalue floor at construction.
template <typename Scalar = double>
class DensityOperator {
 public:
  explicit DensityOperator(CMatrix<Scalar> m, double tol = kNormTol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw DimensionError("DensityOperator: matrix must be square");
    if (!m_.allFinite()) throw Error("DensityOperator: non-finite entry");
    if (double((m_ - m_.adjoint().eval()).cwiseAbs().maxCoeff()) > tol)
      throw NormalizationError("DensityOperator: not Hermitian");
    if (std::abs(double(m_.trace().real()) - 1.0) > tol)
      throw NormalizationError("DensityOperator: trace is " + std::to_string(double(m_.trace().real())));
    Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(m_, Eigen::EigenvaluesOnly);
    if (double(es.eigenvalues().minCoeff()) < kEigenvalueFloor)
      throw NormalizationError("DensityOperator: negative eigenvalue " +
                               std::to_string(double(es.eigenvalues().minCoeff())));
  }

  static DensityOperator pure(const StateVector<Scalar>& psi) {
    const CVector<Scalar>& v = psi.amps();
    return DensityOperator((v * v.adjoint()) / v.squaredNorm());
  }

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix<Scalar>& matrix() const { return m_; }

  RVector<Scalar> eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

 private:
  CMatrix<Scalar> m_;
};

/// Kraus operators {E_j} on one subsystem; completeness sum E^dag E = I is
/// the defining invariant.
template <typename Scalar = double>
class KrausSet {
 public:
  explicit KrausSet(std::vector<CMatrix<Scalar>> ops, double tol = kNormTol) : ops_(std::move(ops)) {
    if (ops_.empty()) throw DimensionError("KrausSet: needs at least one operator");
    const Eigen::Index d = ops_.front().rows();
    CMatrix<Scalar> sum = CMatrix<Scalar>::Zero(d, d);
    for (const auto& e : ops_) {
      if (e.rows() != d || e.cols() != d) throw DimensionError("KrausSet: mismatched operator shapes");
      sum += e.adjoint() * e;
    }
    if (double((sum - CMatrix<Scalar>::Identity(d, d)).cwiseAbs().maxCoeff()) > tol)
      throw CompletenessError("KrausSet: sum E^dag E deviates from identity");
  }

  Eigen::Index dim() const { return ops_.front().rows(); }
  const std::vector<CMatrix<Scalar>>& ops() const { return ops_; }

 private:
  std::vector<CMatrix<Scalar>> ops_;
};

// ---------------------------------------------------------------------------
// Free operations
// ---------------------------------------------------------------------------

template <typename Scalar>
StateVector<Scalar> tensor_product(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
  CVector<Scalar> out = Eigen::kroneckerProduct(a.amps(), b.amps());
  return StateVector<Scalar>(std::move(out));
}

template <typename Scalar>
Operator<Scalar> tensor_product(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  CMatrix<Scalar> out = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  // Kronecker products of unitaries are unitary; validate at the loosened
  // tolerance scaled by dimension to absorb accumulation.
  return Operator<Scalar>::unitary(std::move(out), kNormTol * double(a.dim() * b.dim()));
}

enum class Side { A, B };

/// Partial trace over one factor of a dA x dB composite, raw-matrix form.
/// Composite index convention is row-major: (a, b) -> a * dB + b.
template <typename Scalar>
CMatrix<Scalar> partial_trace_matrix(const CMatrix<Scalar>& rho, Eigen::Index dA, Eigen::Index dB,
                                     Side traced) {
  if (rho.rows() != dA * dB || rho.cols() != dA * dB)
    throw DimensionError("partial_trace: rho dim does not equal dA*dB");
  if (traced == Side::B) {
    CMatrix<Scalar> out = CMatrix<Scalar>::Zero(dA, dA);
    for (Eigen::Index a = 0; a < dA; ++a)
      for (Eigen::Index ap = 0; ap < dA; ++ap)
        for (Eigen::Index b = 0; b < dB; ++b) out(a, ap) += rho(a * dB + b, ap * dB + b);
    return out;
  }
  CMatrix<Scalar> out = CMatrix<Scalar>::Zero(dB, dB);
  for (Eigen::Index b = 0; b < dB; ++b)
    for (Eigen::Index bp = 0; bp < dB; ++bp)
      for (Eigen::Index a = 0; a < dA; ++a) out(b, bp) += rho(a * dB + b, a * dB + bp);
  return out;
}

/// Traced side is removed; the result is validated as a density operator
/// (trace preserved, Hermitian, spectrum above the floor).
template <typename Scalar>
DensityOperator<Scalar> partial_trace(const DensityOperator<Scalar>& rho, Eigen::Index dA,
                                      Eigen::Index dB, Side traced) {
  return DensityOperator<Scalar>(partial_trace_matrix(rho.matrix(), dA, dB, traced));
}

/// m-point discrete Fourier unitary, U(k, j) = exp(2 pi i j k / m) / sqrt(m).
template <typename Scalar = double>
Operator<Scalar> discrete_fourier_unitary(Eigen::Index m) {
  if (m < 1) throw DimensionError("discrete_fourier_unitary: m must be >= 1");
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar root = std::sqrt(Scalar(m));
  CMatrix<Scalar> u(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar phase = two_pi * Scalar(j) * Scalar(k) / Scalar(m);
      u(k, j) = Complex<Scalar>(std::cos(phase), std::sin(phase)) / root;
    }
  return Operator<Scalar>::unitary(std::move(u), kNormTol * double(m));
}

template <typename Scalar = double>
Operator<Scalar> hadamard_qubit() {
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  CMatrix<Scalar> h(2, 2);
  h << Complex<Scalar>(r), Complex<Scalar>(r), Complex<Scalar>(r), Complex<Scalar>(-r);
  return Operator<Scalar>::unitary(std::move(h));
}

/// Trace distance between Hermitian matrices: half the absolute eigenvalue
/// sum of the difference.
template <typename Scalar>
Scalar trace_distance(const CMatrix<Scalar>& r1, const CMatrix<Scalar>& r2) {
  if (r1.rows() != r2.rows() || r1.cols() != r2.cols())
    throw DimensionError("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(r1 - r2, Eigen::EigenvaluesOnly);
  return Scalar(0.5) * es.eigenvalues().cwiseAbs().sum();
}

template <typename Scalar>
Scalar trace_distance(const DensityOperator<Scalar>& r1, const DensityOperator<Scalar>& r2) {
  return trace_distance(r1.matrix(), r2.matrix());
}

/// Half the L1 distance between two same-length real vectors.
template <typename Scalar>
Scalar total_variation(const RVector<Scalar>& p, const RVector<Scalar>& q) {
  if (p.size() != q.size()) throw DimensionError("total_variation: length mismatch");
  return Scalar(0.5) * (p - q).cwiseAbs().sum();
}

/// Distance between Alice's reduced state before and after a local Kraus map
/// on B. Completeness makes this vanish; the returned number is the residual.
template <typename Scalar>
Scalar povm_marginal_invariance(const DensityOperator<Scalar>& rho, Eigen::Index dA,
                                Eigen::Index dB, const KrausSet<Scalar>& kraus_on_B) {
  if (rho.dim() != dA * dB) throw DimensionError("povm_marginal_invariance: rho dim != dA*dB");
  if (kraus_on_B.dim() != dB) throw DimensionError("povm_marginal_invariance: Kraus dim != dB");
  const CMatrix<Scalar> eyeA = CMatrix<Scalar>::Identity(dA, dA);
  CMatrix<Scalar> after = CMatrix<Scalar>::Zero(rho.dim(), rho.dim());
  for (const auto& e : kraus_on_B.ops()) {
    CMatrix<Scalar> lifted = Eigen::kroneckerProduct(eyeA, e);
    after += lifted * rho.matrix() * lifted.adjoint();
  }
  const CMatrix<Scalar> lhs = partial_trace_matrix(rho.matrix(), dA, dB, Side::B);
  const CMatrix<Scalar> rhs = partial_trace_matrix(after, dA, dB, Side::B);
  return trace_distance(lhs, rhs);
}

}  // namespace sorkin::qlinalg

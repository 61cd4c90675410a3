#pragma once

#include <variant>

#include "mmce/types.hpp"

namespace mmce {

/// Matrix-free linear operator with forward, adjoint, and elementwise-squared
/// ("abs2") applications.
///
/// Two backings are supported:
///  - DenseReal: an explicit real M x N matrix.
///  - RealLiftedKron: the real lifting of (B^T kron I_Mr) for a complex pilot
///    matrix B (M_t x K). Rows = 2*M_r*K, cols = 2*M_r*M_t. The lifted matrix
///    is [[Re, -Im], [Im, Re]] with vectors stacked as [real part; imag part].
///    It is never materialized; applications go through reshapes of the
///    operand into an M_r x M_t (or M_r x K) complex matrix.
class LinearOperator {
 public:
  struct DenseReal {
    Mat A;
  };
  struct RealLiftedKron {
    CMat pilots;  // B, M_t x K
    Index m_r = 0;
  };

  static LinearOperator dense(Mat A);
  /// Builds the real-lifted Kronecker operator for pilot matrix B and
  /// receive dimension m_r.
  static LinearOperator real_lifted_kron(CMat B, Index m_r);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  /// y = A v.
  Vec apply(const Vec& v) const;
  /// x = A^T u.
  Vec apply_adjoint(const Vec& u) const;
  /// y = (A o A) v, elementwise square. Requires v >= 0 (variance vector).
  Vec apply_abs2(const Vec& v) const;
  /// x = (A o A)^T u. Requires u >= 0.
  Vec apply_abs2_adjoint(const Vec& u) const;

  /// Squared Frobenius norm of A. For the lifted Kronecker backing this is
  /// 2 * M_r * ||B||_F^2 without materialization.
  double frobenius_sq() const;

  /// Explicit dense materialization, intended for oracle tests. Refuses
  /// instances larger than 10^6 entries.
  Mat materialize() const;

  bool is_dense() const { return std::holds_alternative<DenseReal>(backing_); }

 private:
  LinearOperator() = default;

  Index rows_ = 0;
  Index cols_ = 0;
  std::variant<DenseReal, RealLiftedKron> backing_;
};

}  // namespace mmce

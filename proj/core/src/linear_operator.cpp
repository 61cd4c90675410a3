#include "mmce/linear_operator.hpp"

#include <stdexcept>

namespace mmce {

namespace {

using Eigen::Map;

void check_nonnegative(const Vec& v, const char* what) {
  if ((v.array() < 0.0).any()) {
    throw std::domain_error(std::string(what) +
                            ": variance vector has negative entries");
  }
}

void check_length(const Vec& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": vector length " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(expected));
  }
}

// Splits a real-lifted vector [Re; Im] of length 2*m_r*n into a complex
// m_r x n matrix.
CMat unlift(const Vec& v, Index m_r, Index n) {
  const Index half = m_r * n;
  CMat out(m_r, n);
  out.real() = Map<const Mat>(v.data(), m_r, n);
  out.imag() = Map<const Mat>(v.data() + half, m_r, n);
  return out;
}

Vec lift(const CMat& z) {
  const Index half = z.size();
  Vec out(2 * half);
  Map<Mat>(out.data(), z.rows(), z.cols()) = z.real();
  Map<Mat>(out.data() + half, z.rows(), z.cols()) = z.imag();
  return out;
}

// (C^T kron I) v = vec(V C) with V = unvec(v, m_r x rows(C)).
Mat kron_apply(const Mat& V, const Mat& C) { return V * C; }

}  // namespace

LinearOperator LinearOperator::dense(Mat A) {
  LinearOperator op;
  op.rows_ = A.rows();
  op.cols_ = A.cols();
  op.backing_ = DenseReal{std::move(A)};
  return op;
}

LinearOperator LinearOperator::real_lifted_kron(CMat B, Index m_r) {
  if (B.rows() < 1 || B.cols() < 1 || m_r < 1) {
    throw std::invalid_argument("real_lifted_kron: M_t, K, M_r must be >= 1");
  }
  LinearOperator op;
  op.rows_ = 2 * m_r * B.cols();
  op.cols_ = 2 * m_r * B.rows();
  op.backing_ = RealLiftedKron{std::move(B), m_r};
  return op;
}

Vec LinearOperator::apply(const Vec& v) const {
  check_length(v, cols_, "apply");
  if (const auto* d = std::get_if<DenseReal>(&backing_)) {
    return d->A * v;
  }
  const auto& k = std::get<RealLiftedKron>(backing_);
  // A x corresponds to the complex product H~ B with H~ = unvec(x~).
  CMat H = unlift(v, k.m_r, k.pilots.rows());
  return lift(H * k.pilots);
}

Vec LinearOperator::apply_adjoint(const Vec& u) const {
  check_length(u, rows_, "apply_adjoint");
  if (const auto* d = std::get_if<DenseReal>(&backing_)) {
    return d->A.transpose() * u;
  }
  const auto& k = std::get<RealLiftedKron>(backing_);
  // A^T u corresponds to the complex product U~ B^H.
  CMat U = unlift(u, k.m_r, k.pilots.cols());
  return lift(U * k.pilots.adjoint());
}

Vec LinearOperator::apply_abs2(const Vec& v) const {
  check_length(v, cols_, "apply_abs2");
  check_nonnegative(v, "apply_abs2");
  if (const auto* d = std::get_if<DenseReal>(&backing_)) {
    return d->A.cwiseProduct(d->A) * v;
  }
  const auto& k = std::get<RealLiftedKron>(backing_);
  // Squared lifted matrix is [[P.^2, Q.^2], [Q.^2, P.^2]] blockwise with
  // P = Re(B)^T kron I and Q = Im(B)^T kron I.
  const Index half = k.m_r * k.pilots.rows();
  Mat P2 = k.pilots.real().cwiseAbs2();
  Mat Q2 = k.pilots.imag().cwiseAbs2();
  Mat Vre = Map<const Mat>(v.data(), k.m_r, k.pilots.rows());
  Mat Vim = Map<const Mat>(v.data() + half, k.m_r, k.pilots.rows());
  Vec out(rows_);
  const Index ohalf = k.m_r * k.pilots.cols();
  Map<Mat>(out.data(), k.m_r, k.pilots.cols()) =
      kron_apply(Vre, P2) + kron_apply(Vim, Q2);
  Map<Mat>(out.data() + ohalf, k.m_r, k.pilots.cols()) =
      kron_apply(Vre, Q2) + kron_apply(Vim, P2);
  return out;
}

Vec LinearOperator::apply_abs2_adjoint(const Vec& u) const {
  check_length(u, rows_, "apply_abs2_adjoint");
  check_nonnegative(u, "apply_abs2_adjoint");
  if (const auto* d = std::get_if<DenseReal>(&backing_)) {
    return d->A.cwiseProduct(d->A).transpose() * u;
  }
  const auto& k = std::get<RealLiftedKron>(backing_);
  const Index half = k.m_r * k.pilots.cols();
  Mat P2t = k.pilots.real().cwiseAbs2().transpose();
  Mat Q2t = k.pilots.imag().cwiseAbs2().transpose();
  Mat Ure = Map<const Mat>(u.data(), k.m_r, k.pilots.cols());
  Mat Uim = Map<const Mat>(u.data() + half, k.m_r, k.pilots.cols());
  Vec out(cols_);
  const Index ohalf = k.m_r * k.pilots.rows();
  Map<Mat>(out.data(), k.m_r, k.pilots.rows()) =
      kron_apply(Ure, P2t) + kron_apply(Uim, Q2t);
  Map<Mat>(out.data() + ohalf, k.m_r, k.pilots.rows()) =
      kron_apply(Ure, Q2t) + kron_apply(Uim, P2t);
  return out;
}

double LinearOperator::frobenius_sq() const {
  if (const auto* d = std::get_if<DenseReal>(&backing_)) {
    return d->A.squaredNorm();
  }
  const auto& k = std::get<RealLiftedKron>(backing_);
  return 2.0 * static_cast<double>(k.m_r) * k.pilots.squaredNorm();
}

Mat LinearOperator::materialize() const {
  if (rows_ * cols_ > 1'000'000) {
    throw std::length_error("materialize: operator exceeds 10^6 entries");
  }
  if (const auto* d = std::get_if<DenseReal>(&backing_)) {
    return d->A;
  }
  const auto& k = std::get<RealLiftedKron>(backing_);
  const Index m_t = k.pilots.rows();
  const Index kk = k.pilots.cols();
  CMat At = CMat::Zero(k.m_r * kk, k.m_r * m_t);  // B^T kron I_Mr
  for (Index i = 0; i < kk; ++i) {
    for (Index j = 0; j < m_t; ++j) {
      At.block(i * k.m_r, j * k.m_r, k.m_r, k.m_r) =
          k.pilots(j, i) * CMat::Identity(k.m_r, k.m_r);
    }
  }
  Mat A(rows_, cols_);
  A.topLeftCorner(At.rows(), At.cols()) = At.real();
  A.topRightCorner(At.rows(), At.cols()) = -At.imag();
  A.bottomLeftCorner(At.rows(), At.cols()) = At.imag();
  A.bottomRightCorner(At.rows(), At.cols()) = At.real();
  return A;
}

}  // namespace mmce

#ifndef RPI_COMPLEX_SYMMETRIC_LDLT_HPP
#define RPI_COMPLEX_SYMMETRIC_LDLT_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "rpi/errors.hpp"

namespace rpi {

/// Unpivoted A = L·D·Lᵀ for complex *symmetric* (not Hermitian) matrices.
///
/// Intended for forms whose Hermitian part Re(A) is positive definite. All
/// pivots then lie in the open right half plane, so the principal branch of
/// sqrt on each pivot yields the analytic continuation of det(A)^{1/2} from
/// the real positive-definite case. This is the branch a convergent Gaussian
/// integral ∫exp(−½xᵀAx) dx requires.
template <typename MatrixType>
class ComplexSymmetricLdlt {
 public:
  using Scalar = typename MatrixType::Scalar;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  using Index = Eigen::Index;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ComplexSymmetricLdlt() = default;
  explicit ComplexSymmetricLdlt(const MatrixType& a) { compute(a); }

  ComplexSymmetricLdlt& compute(const MatrixType& a) {
    const Index n = a.rows();
    if (a.cols() != n) throw NumericalError("LDLT requires a square matrix");
    factor_ = a;
    pivots_.resize(n);
    // Without pivoting L inherits the lower bandwidth of A.
    bandwidth_ = 0;
    for (Index j = 0; j < n; ++j)
      for (Index i = n - 1; i > j + bandwidth_; --i)
        if (a(i, j) != Scalar(0)) {
          bandwidth_ = i - j;
          break;
        }
    for (Index k = 0; k < n; ++k) {
      Scalar d = factor_(k, k);
      for (Index p = first(k); p < k; ++p) d -= factor_(k, p) * factor_(k, p) * pivots_(p);
      if (std::abs(d) == RealScalar(0) || !std::isfinite(std::abs(d)))
        throw NumericalError("complex symmetric form is singular");
      pivots_(k) = d;
      const Index last = std::min(n, k + bandwidth_ + 1);
      for (Index i = k + 1; i < last; ++i) {
        Scalar s = factor_(i, k);
        for (Index p = first(i); p < k; ++p) s -= factor_(i, p) * factor_(k, p) * pivots_(p);
        factor_(i, k) = s / d;
      }
    }
    return *this;
  }

  Index size() const { return pivots_.size(); }
  Index bandwidth() const { return bandwidth_; }
  const VectorType& pivots() const { return pivots_; }

  /// Sum of principal logs of the pivots: the continuous branch of log det(A).
  Scalar log_determinant() const {
    Scalar s(0);
    for (Index k = 0; k < pivots_.size(); ++k) s += std::log(pivots_(k));
    return s;
  }

  /// max|d| / min|d|; a cheap proxy for the condition number.
  RealScalar pivot_ratio() const {
    if (pivots_.size() == 0) return RealScalar(1);
    const auto mags = pivots_.cwiseAbs();
    return mags.maxCoeff() / mags.minCoeff();
  }

  template <typename Rhs>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Rhs::ColsAtCompileTime> solve(const Eigen::MatrixBase<Rhs>& b) const {
    const Index n = pivots_.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Rhs::ColsAtCompileTime> x = b.template cast<Scalar>();
    for (Index c = 0; c < x.cols(); ++c) {
      for (Index i = 0; i < n; ++i)
        for (Index p = first(i); p < i; ++p) x(i, c) -= factor_(i, p) * x(p, c);
      for (Index i = 0; i < n; ++i) x(i, c) /= pivots_(i);
      for (Index i = n - 1; i >= 0; --i) {
        const Index last = std::min(n, i + bandwidth_ + 1);
        for (Index p = i + 1; p < last; ++p) x(i, c) -= factor_(p, i) * x(p, c);
      }
    }
    return x;
  }

 private:
  Index first(Index i) const { return std::max<Index>(0, i - bandwidth_); }

  MatrixType factor_;  // strictly lower part holds L
  VectorType pivots_;
  Index bandwidth_ = 0;
};

}  // namespace rpi

#endif  // RPI_COMPLEX_SYMMETRIC_LDLT_HPP

#pragma once

// Dense point-wise layer kernels. `reference` is a plain triple loop kept as the
// test oracle for `blas`, which hands the products to Eigen's GEMM.

#include <Eigen/Core>

namespace lrg::kernels {

enum class Kernel { reference, blas };

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ConstMatMap = Eigen::Map<const Mat<Scalar>>;
template <typename Scalar>
using MatMap = Eigen::Map<Mat<Scalar>>;
template <typename Scalar>
using ConstVecMap = Eigen::Map<const Vec<Scalar>>;
template <typename Scalar>
using VecMap = Eigen::Map<Vec<Scalar>>;

// Z = X W + 1 b^T
template <typename Scalar, typename XT, typename WT>
void dense_forward(Kernel k, const Eigen::MatrixBase<XT>& x, const Eigen::MatrixBase<WT>& w,
                   const ConstVecMap<Scalar>& b, Mat<Scalar>& z) {
  const Eigen::Index n = x.rows(), in = w.rows(), out = w.cols();
  z.resize(n, out);
  if (k == Kernel::blas) {
    z.noalias() = x * w;
    z.rowwise() += b.transpose();
    return;
  }
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index o = 0; o < out; ++o) {
      Scalar acc = b[o];
      for (Eigen::Index i = 0; i < in; ++i) acc += x(r, i) * w(i, o);
      z(r, o) = acc;
    }
}

// dW += X^T dZ, db += colsum(dZ). dw/db are writable views (Map or Block).
template <typename Scalar, typename XT, typename DW, typename DB>
void dense_backward_params(Kernel k, const Eigen::MatrixBase<XT>& x, const Mat<Scalar>& dz, DW dw, DB db) {
  const Eigen::Index n = x.rows(), in = x.cols(), out = dz.cols();
  if (k == Kernel::blas) {
    dw.noalias() += x.transpose() * dz;
    db += dz.colwise().sum().transpose();
    return;
  }
  for (Eigen::Index i = 0; i < in; ++i)
    for (Eigen::Index o = 0; o < out; ++o) {
      Scalar acc = 0;
      for (Eigen::Index r = 0; r < n; ++r) acc += x(r, i) * dz(r, o);
      dw(i, o) += acc;
    }
  for (Eigen::Index o = 0; o < out; ++o) {
    Scalar acc = 0;
    for (Eigen::Index r = 0; r < n; ++r) acc += dz(r, o);
    db[o] += acc;
  }
}

// dX = dZ W^T
template <typename Scalar, typename WT>
void dense_backward_input(Kernel k, const Mat<Scalar>& dz, const Eigen::MatrixBase<WT>& w, Mat<Scalar>& dx) {
  const Eigen::Index n = dz.rows(), in = w.rows(), out = w.cols();
  dx.resize(n, in);
  if (k == Kernel::blas) {
    dx.noalias() = dz * w.transpose();
    return;
  }
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index i = 0; i < in; ++i) {
      Scalar acc = 0;
      for (Eigen::Index o = 0; o < out; ++o) acc += dz(r, o) * w(i, o);
      dx(r, i) = acc;
    }
}

template <typename Scalar>
void relu_inplace(Mat<Scalar>& a) {
  a = a.cwiseMax(Scalar(0));
}

// dA <- dA * [A > 0]
template <typename Scalar>
void relu_backward_inplace(Mat<Scalar>& da, const Mat<Scalar>& a) {
  da = (a.array() > Scalar(0)).select(da, Scalar(0));
}

}  // namespace lrg::kernels

#include "gaugecert/linalg.hpp"

#include <cmath>

#include "gaugecert/config.hpp"

namespace gaugecert {

std::vector<Index> support(const Vector& x, double rel) {
  std::vector<Index> out;
  if (x.size() == 0) return out;
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return out;
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > rel * scale) out.push_back(i);
  return out;
}

std::vector<Index> complement(const std::vector<Index>& idx, Index n) {
  std::vector<bool> in(static_cast<size_t>(n), false);
  for (Index i : idx) in[static_cast<size_t>(i)] = true;
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (!in[static_cast<size_t>(i)]) out.push_back(i);
  return out;
}

namespace {

// Full SVD with singular values sorted descending; empty matrices handled by callers.
Eigen::JacobiSVD<Matrix> full_svd(const Matrix& A) {
  return Eigen::JacobiSVD<Matrix>(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

Index rank_from(const Vector& s, double rel) {
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

}  // namespace

Index numerical_rank(const Matrix& A, double rel) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return rank_from(svd.singularValues(), rel);
}

Matrix kernel_basis(const Matrix& A, double rel) {
  const Index n = A.cols();
  if (A.rows() == 0) return Matrix::Identity(n, n);
  if (n == 0) return Matrix(0, 0);
  auto svd = full_svd(A);
  const Index r = rank_from(svd.singularValues(), rel);
  return svd.matrixV().rightCols(n - r);
}

Matrix range_basis(const Matrix& B, double rel) {
  if (B.cols() == 0 || B.rows() == 0) return Matrix(B.rows(), 0);
  auto svd = full_svd(B);
  const Index r = rank_from(svd.singularValues(), rel);
  return svd.matrixU().leftCols(r);
}

Matrix orth_complement(const Matrix& B, Index n, double rel) {
  if (B.cols() == 0) return Matrix::Identity(n, n);
  return kernel_basis(B.transpose(), rel);
}

Matrix pseudo_inverse(const Matrix& A, double rel) {
  if (A.size() == 0) return Matrix::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double sigma_max(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

bool full_column_rank(const Matrix& B, double rel) {
  if (B.cols() == 0) return true;
  if (B.rows() < B.cols()) return false;
  return numerical_rank(B, rel) == B.cols();
}

Matrix select_columns(const Matrix& A, const std::vector<Index>& idx) {
  Matrix out(A.rows(), static_cast<Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = A.col(idx[j]);
  return out;
}

Vector select(const Vector& x, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out(static_cast<Index>(j)) = x(idx[j]);
  return out;
}

Vector vec(const Matrix& X) {
  Vector v(X.size());
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) v(i * X.cols() + j) = X(i, j);
  return v;
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  Matrix X(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) X(i, j) = v(i * cols + j);
  return X;
}

Matrix sym_basis(Index n) {
  Matrix B = Matrix::Zero(n * n, n * (n + 1) / 2);
  Index c = 0;
  for (Index i = 0; i < n; ++i) {
    B(i * n + i, c++) = 1.0;
  }
  const double h = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      B(i * n + j, c) = h;
      B(j * n + i, c) = h;
      ++c;
    }
  return B;
}

}  // namespace gaugecert

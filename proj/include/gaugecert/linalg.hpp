// Dense linear algebra helpers on top of Eigen.
#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace gaugecert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sign0(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Indices with |x_i| > rel * ||x||_inf. Empty for x = 0.
std::vector<Index> support(const Vector& x, double rel);
std::vector<Index> complement(const std::vector<Index>& idx, Index n);

// Numerical rank with threshold rel * sigma_max.
Index numerical_rank(const Matrix& A, double rel);

// Orthonormal basis of Ker A (n x k). k = n - rank(A).
Matrix kernel_basis(const Matrix& A, double rel = 1e-10);

// Orthonormal basis of the column span of B.
Matrix range_basis(const Matrix& B, double rel = 1e-10);

// Orthonormal basis of the orthogonal complement of span(B) in R^n.
Matrix orth_complement(const Matrix& B, Index n, double rel = 1e-10);

Matrix pseudo_inverse(const Matrix& A, double rel = 1e-12);

// Largest and smallest singular values (0 for empty matrices).
double sigma_max(const Matrix& A);

// True when the columns of B are linearly independent.
bool full_column_rank(const Matrix& B, double rel = 1e-10);

Matrix select_columns(const Matrix& A, const std::vector<Index>& idx);
Vector select(const Vector& x, const std::vector<Index>& idx);

// Row-major vectorisation of matrices (X(i,j) -> i*cols + j).
Vector vec(const Matrix& X);
Matrix unvec(const Vector& v, Index rows, Index cols);

// Orthonormal basis of symmetric n x n matrices in row-major vec form.
Matrix sym_basis(Index n);

}  // namespace gaugecert

#pragma once

#include <cstdint>
#include <vector>

namespace windesign {

// Standard normal CDF via erfc; absolute error ~1e-15.
double normal_cdf(double x);

// Inverse standard normal CDF: Acklam rational approximation refined with one
// Halley step, absolute error well below 1e-12 across (0,1).
double inverse_normal_cdf(double p);

// Small dense square matrix, row-major. Q stays single-digit here, so no
// attempt at a real linear-algebra library.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static Matrix identity(int dim) {
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }

  bool operator==(const Matrix& o) const { return n == o.n && a == o.a; }
};

// R = L·Lᵀ with L lower triangular. Returns false if any pivot is not strictly
// positive (matrix not positive definite). No pivoting by design: failure must
// surface, not be silently repaired.
bool cholesky(const Matrix& r, Matrix& lower);

// Cyclic Jacobi eigendecomposition for symmetric matrices (used only by the
// explicit correlation-repair path, never in hot loops).
void jacobi_eigen(const Matrix& sym, std::vector<double>& eigenvalues, Matrix& eigenvectors);

// Eigenvalue clipping at `floor_eigenvalue`, then diagonal renormalization back
// to a unit-diagonal correlation matrix.
Matrix repair_correlation(const Matrix& r, double floor_eigenvalue = 1e-8);

}  // namespace windesign

#pragma once

#include <vector>

namespace nirb {

// Small dense symmetric kernels backing the reduced eigenproblem. Row-major
// square storage; sizes here are the reduced dimension N (tens at most).
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  explicit DenseMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Lower-triangular Cholesky factor of an SPD matrix; throws NumericalError on
// a nonpositive pivot.
DenseMatrix cholesky(const DenseMatrix& m);

std::vector<double> forward_substitute(const DenseMatrix& lower, std::vector<double> b);
std::vector<double> back_substitute_transposed(const DenseMatrix& lower, std::vector<double> b);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column i pairs with values[i]
};

// Cyclic Jacobi rotations for a symmetric matrix; sweeps until every
// off-diagonal magnitude is below 1e-13 times the matrix scale, at most 30
// sweeps, NumericalError past that.
EigenDecomposition jacobi_eigensolve(DenseMatrix m);

// Generalized symmetric problem K x = lambda M x via Cholesky reduction of M;
// returned vectors are M-orthonormal, values ascending.
EigenDecomposition generalized_eigensolve(const DenseMatrix& k, const DenseMatrix& m);

}  // namespace nirb

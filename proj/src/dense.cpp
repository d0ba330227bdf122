#include "nirb/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nirb/sparse.hpp"

namespace nirb {

DenseMatrix cholesky(const DenseMatrix& m) {
  const int n = m.n;
  DenseMatrix l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw NumericalError("cholesky: matrix is not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

std::vector<double> forward_substitute(const DenseMatrix& lower, std::vector<double> b) {
  for (int i = 0; i < lower.n; ++i) {
    for (int k = 0; k < i; ++k) b[i] -= lower(i, k) * b[k];
    b[i] /= lower(i, i);
  }
  return b;
}

std::vector<double> back_substitute_transposed(const DenseMatrix& lower,
                                               std::vector<double> b) {
  for (int i = lower.n - 1; i >= 0; --i) {
    for (int k = i + 1; k < lower.n; ++k) b[i] -= lower(k, i) * b[k];
    b[i] /= lower(i, i);
  }
  return b;
}

EigenDecomposition jacobi_eigensolve(DenseMatrix m) {
  const int n = m.n;
  DenseMatrix v(n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
  if (scale == 0.0) scale = 1.0;

  bool converged = n < 2;
  for (int sweep = 0; sweep < 30 && !converged; ++sweep) {
    converged = true;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) <= 1e-13 * scale) continue;
        converged = false;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  if (!converged) throw NumericalError("jacobi_eigensolve: no convergence in 30 sweeps");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return m(a, a) < m(b, b); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = m(order[i], order[i]);
    // fix the sign so equal reruns give identical vectors
    int arg = 0;
    for (int k = 1; k < n; ++k)
      if (std::abs(v(k, order[i])) > std::abs(v(arg, order[i]))) arg = k;
    const double flip = v(arg, order[i]) < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < n; ++k) out.vectors(k, i) = flip * v(k, order[i]);
  }
  return out;
}

EigenDecomposition generalized_eigensolve(const DenseMatrix& k, const DenseMatrix& m) {
  const int n = k.n;
  const DenseMatrix l = cholesky(m);
  // C = L^{-1} K L^{-T}, built column by column
  DenseMatrix c(n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> colv(n);
    for (int i = 0; i < n; ++i) colv[i] = k(i, j);
    colv = forward_substitute(l, std::move(colv));
    for (int i = 0; i < n; ++i) c(i, j) = colv[i];
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> rowv(n);
    for (int j = 0; j < n; ++j) rowv[j] = c(i, j);
    rowv = forward_substitute(l, std::move(rowv));
    for (int j = 0; j < n; ++j) c(i, j) = rowv[j];
  }
  EigenDecomposition eig = jacobi_eigensolve(std::move(c));
  for (int j = 0; j < n; ++j) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = eig.vectors(i, j);
    y = back_substitute_transposed(l, std::move(y));
    for (int i = 0; i < n; ++i) eig.vectors(i, j) = y[i];
  }
  return eig;
}

}  // namespace nirb

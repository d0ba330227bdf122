#include "nirb/sparse.hpp"

#include <cmath>
#include <string>

namespace nirb {

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
    y[i] = acc;
  }
}

double CsrMatrix::coeff(int i, int j) const {
  for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col[k] == j) return val[k];
  return 0.0;
}

CsrMatrix CsrBuilder::build() const {
  CsrMatrix m;
  m.n = n_;
  m.row_ptr.assign(n_ + 1, 0);
  for (const auto& [ij, v] : entries_) m.row_ptr[ij.first + 1]++;
  for (int i = 0; i < n_; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  m.col.reserve(entries_.size());
  m.val.reserve(entries_.size());
  for (const auto& [ij, v] : entries_) {  // map iteration is already row-major
    m.col.push_back(ij.second);
    m.val.push_back(v);
  }
  return m;
}

void validate_spd_system(const SparseSpdSystem& sys) {
  const CsrMatrix& A = sys.matrix;
  if (static_cast<int>(sys.rhs.size()) != A.n)
    throw NumericalError("solve_spd: rhs size does not match matrix");
  double scale = 0.0;
  for (double v : A.val) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < A.n; ++i) {
    if (A.coeff(i, i) <= 0.0)
      throw NumericalError("solve_spd: nonpositive diagonal entry");
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const int j = A.col[k];
      if (std::abs(A.val[k] - A.coeff(j, i)) > 1e-13 * scale)
        throw NumericalError("solve_spd: matrix is not symmetric");
    }
  }
}

std::vector<double> solve_spd(const SparseSpdSystem& sys) {
  validate_spd_system(sys);
  const CsrMatrix& A = sys.matrix;
  const int n = A.n;
  std::vector<double> x(n, 0.0), r = sys.rhs, z(n), p(n), Ap(n), diag(n);
  for (int i = 0; i < n; ++i) diag[i] = A.coeff(i, i);

  double bnorm = 0.0;
  for (double v : sys.rhs) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return x;

  for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];

  const long max_iter = 10L * n;
  double resid = bnorm;
  for (long it = 0; it < max_iter; ++it) {
    A.multiply(p, Ap);
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    const double alpha = rz / pAp;
    resid = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      resid += r[i] * r[i];
    }
    resid = std::sqrt(resid);
    if (resid <= 1e-12 * bnorm) return x;
    for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NumericalError("solve_spd: CG did not converge, final relative residual " +
                       std::to_string(resid / bnorm));
}

}  // namespace nirb

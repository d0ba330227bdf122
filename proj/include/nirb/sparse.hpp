#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nirb {

// Numerical failures (solver non-convergence, degenerate systems) carry this
// type so the CLI can map them to a distinct exit code.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;  // size n+1
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  double coeff(int i, int j) const;  // 0 when the entry is not stored
};

// Ordered coordinate accumulator; rows come out sorted so assembly order
// cannot change the stored layout.
class CsrBuilder {
 public:
  explicit CsrBuilder(int n) : n_(n) {}
  void add(int i, int j, double v) { entries_[{i, j}] += v; }
  CsrMatrix build() const;

 private:
  int n_;
  std::map<std::pair<int, int>, double> entries_;
};

struct SparseSpdSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

// Jacobi-preconditioned conjugate gradients; converges when the relative
// residual drops below 1e-12, fails after 10n iterations.
std::vector<double> solve_spd(const SparseSpdSystem& sys);

void validate_spd_system(const SparseSpdSystem& sys);

}  // namespace nirb

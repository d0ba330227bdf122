#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nirb/geometry.hpp"

namespace nirb {

using ParameterVector = std::vector<double>;

struct ParametricProblem {
  std::string name;
  std::function<double(double, double, const ParameterVector&)> A;
  std::function<double(double, double, const ParameterVector&)> f;
  // Manufactured solutions only; empty otherwise.
  std::function<double(double, double)> exact;
  std::function<Vec2(double, double)> exact_grad;

  bool has_exact() const { return static_cast<bool>(exact); }
};

ParametricProblem paper_problem();
ParametricProblem manufactured_sine_problem();
ParametricProblem problem_by_name(const std::string& name);

// Minimum of A(x;mu) over a 64x64 probe grid on [0,1]^2.
double ellipticity_probe(const ParametricProblem& p, const ParameterVector& mu);

// Portable 64-bit generator (xorshift64* with splitmix64 seeding); doubles are
// the top 53 bits scaled to [0,1).
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed);
  std::uint64_t next_u64();
  double next_double();

 private:
  std::uint64_t state_;
};

// count i.i.d. uniform draws from the admissible box
// mu1 in [0.5,1.5], mu2 in [0,0.9], mu3 in [0,1], mu4 in [0,1].
std::vector<ParameterVector> sample_parameters(int count, std::uint64_t seed);

}  // namespace nirb

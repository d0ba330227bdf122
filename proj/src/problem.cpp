#include "nirb/problem.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nirb {

ParametricProblem paper_problem() {
  ParametricProblem p;
  p.name = "paper";
  p.A = [](double x, double y, const ParameterVector& mu) {
    return 2.0 * mu[0] + mu[1] * std::sin(x + y) * std::cos(x * y);
  };
  p.f = [](double x, double y, const ParameterVector& mu) {
    return mu[2] * (1.0 - y) + mu[3] * x * (1.0 - x);
  };
  return p;
}

ParametricProblem manufactured_sine_problem() {
  using std::numbers::pi;
  ParametricProblem p;
  p.name = "sine";
  p.A = [](double, double, const ParameterVector&) { return 1.0; };
  p.f = [](double x, double y, const ParameterVector&) {
    return 2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y);
  };
  p.exact = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  p.exact_grad = [](double x, double y) {
    return Vec2{pi * std::cos(pi * x) * std::sin(pi * y),
                pi * std::sin(pi * x) * std::cos(pi * y)};
  };
  return p;
}

ParametricProblem problem_by_name(const std::string& name) {
  if (name == "paper") return paper_problem();
  if (name == "sine") return manufactured_sine_problem();
  throw std::invalid_argument("unknown problem: " + name);
}

double ellipticity_probe(const ParametricProblem& p, const ParameterVector& mu) {
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i)
      lo = std::min(lo, p.A((i + 0.5) / 64.0, (j + 0.5) / 64.0, mu));
  return lo;
}

PortableRng::PortableRng(std::uint64_t seed) {
  // splitmix64 scrambles the seed so 0 and small integers are usable
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  state_ = z ^ (z >> 31);
  if (state_ == 0) state_ = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t PortableRng::next_u64() {
  std::uint64_t x = state_;
  x ^= x >> 12;
  x ^= x << 25;
  x ^= x >> 27;
  state_ = x;
  return x * 0x2545f4914f6cdd1dULL;  // xorshift64*
}

double PortableRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<ParameterVector> sample_parameters(int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_parameters: count must be >= 1");
  PortableRng rng(seed);
  std::vector<ParameterVector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back({0.5 + rng.next_double(), 0.9 * rng.next_double(),
                   rng.next_double(), rng.next_double()});
  return out;
}

}  // namespace nirb

#include "storn/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "storn/errors.hpp"

namespace storn {

double logsumexp(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("logsumexp of an empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> finite_difference_grad(const ScalarFunction& f, std::vector<double> x,
                                           double step) {
  if (!(step > 0.0)) throw ArgumentError("finite difference step must be positive");
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

std::vector<Tensor> finite_difference_grad(
    const std::function<double(const std::vector<Tensor>&)>& f, std::vector<Tensor> params,
    double step) {
  if (!(step > 0.0)) throw ArgumentError("finite difference step must be positive");
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (auto& p : params) {
    Tensor g(p.shape());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double orig = p[i];
      p[i] = orig + step;
      const double up = f(params);
      p[i] = orig - step;
      const double down = f(params);
      p[i] = orig;
      g[i] = (up - down) / (2.0 * step);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double relative_error(double a, double b) {
  const double denom = std::max(std::abs(a), std::abs(b));
  return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

bool gradient_close(double a, double b, double rtol, double atol) {
  const double diff = std::abs(a - b);
  return diff <= atol || diff <= rtol * std::max(std::abs(a), std::abs(b));
}

}  // namespace storn

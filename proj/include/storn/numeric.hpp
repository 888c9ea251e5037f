#pragma once

#include <functional>
#include <span>
#include <vector>

#include "storn/tensor.hpp"

namespace storn {

/// log(sum(exp(v))) via max shifting. Throws ArgumentError on empty input.
double logsumexp(std::span<const double> v);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
std::vector<double> finite_difference_grad(const ScalarFunction& f, std::vector<double> x,
                                           double step);

/// Same, over a list of tensors flattened in order.
std::vector<Tensor> finite_difference_grad(
    const std::function<double(const std::vector<Tensor>&)>& f, std::vector<Tensor> params,
    double step);

/// |a - b| / max(|a|, |b|), or 0 when both are zero.
double relative_error(double a, double b);

/// Agreement test used by the gradient checks: relative error below `rtol`,
/// or absolute error below `atol` for components that are essentially zero.
bool gradient_close(double a, double b, double rtol = 1e-5, double atol = 1e-8);

}  // namespace storn

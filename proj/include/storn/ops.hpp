#pragma once

#include <span>
#include <string>
#include <string_view>

#include "storn/tensor.hpp"

namespace storn {

enum class Transfer { logistic, tanh, identity };

Transfer parse_transfer(std::string_view name);
std::string_view to_string(Transfer t);

double sigmoid(double x) noexcept;

Tensor matmul(const Tensor& a, const Tensor& b);
/// a * b^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
/// a^T * b
Tensor matmul_tn(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

/// Adds a rank-1 bias to every row of a rank-2 tensor.
Tensor add_row(const Tensor& m, const Tensor& bias);
/// Column sums of a rank-2 tensor, as a rank-1 tensor.
Tensor column_sums(const Tensor& m);
Tensor sum(const Tensor& a);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor apply_transfer(const Tensor& x, Transfer t);

/// Row i of the result is row i of `a` where mask[i] != 0, else row i of `b`.
Tensor blend_rows(const Tensor& a, const Tensor& b, std::span<const double> mask);
Tensor scale_rows(const Tensor& a, std::span<const double> coeff);
/// Columns [begin, end) of a rank-2 tensor.
Tensor columns(const Tensor& a, std::size_t begin, std::size_t end);

/// sqrt(raw^2 + floor), elementwise.
Tensor posterior_sigma(const Tensor& raw, double floor);

void require_same_shape(const Tensor& a, const Tensor& b, std::string_view what);

/// Lifts a plain tensor into the value space of `like` (identity for Tensor,
/// a tape constant for ad::Var). Lets generic code create zero states.
inline Tensor lift(const Tensor& /*like*/, Tensor value) { return value; }
inline const Tensor& value_of(const Tensor& t) { return t; }

}  // namespace storn

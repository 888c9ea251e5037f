#include "storn/ops.hpp"

#include <cmath>

#include "storn/errors.hpp"

namespace storn {

Transfer parse_transfer(std::string_view name) {
  if (name == "logistic" || name == "sigmoid") return Transfer::logistic;
  if (name == "tanh") return Transfer::tanh;
  if (name == "identity" || name == "linear") return Transfer::identity;
  throw ConfigError("unknown transfer function '" + std::string(name) + "'");
}

std::string_view to_string(Transfer t) {
  switch (t) {
    case Transfer::logistic: return "logistic";
    case Transfer::tanh: return "tanh";
    case Transfer::identity: return "identity";
  }
  return "identity";
}

double sigmoid(double x) noexcept {
  // exp of the negated magnitude never overflows
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_same_shape(const Tensor& a, const Tensor& b, std::string_view what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + to_string(a.shape()) +
                         " vs " + to_string(b.shape()));
  }
}

namespace {

void require_rank2(const Tensor& a, std::string_view what) {
  if (a.rank() != 2) {
    throw DimensionError(std::string(what) + ": expected a matrix, got " + to_string(a.shape()));
  }
}

template <class F>
Tensor map(const Tensor& x, F f) {
  Tensor out(x.shape());
  auto src = x.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

template <class F>
Tensor zip(const Tensor& a, const Tensor& b, std::string_view what, F f) {
  require_same_shape(a, b, what);
  Tensor out(a.shape());
  auto x = a.data();
  auto y = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < x.size(); ++i) dst[i] = f(x[i], y[i]);
  return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner extents differ for " + to_string(a.shape()) + " and " +
                         to_string(b.shape()));
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Tensor out({n, m});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      const double* brow = pb + p * m;
      double* crow = pc + i * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_nt");
  require_rank2(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: extents differ for " + to_string(a.shape()) + " and " +
                         to_string(b.shape()));
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  Tensor out({n, m});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += pa[i * k + p] * pb[j * k + p];
      pc[i * m + j] = s;
    }
  }
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_tn");
  require_rank2(b, "matmul_tn");
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: extents differ for " + to_string(a.shape()) + " and " +
                         to_string(b.shape()));
  }
  const std::size_t n = a.cols(), k = a.rows(), m = b.cols();
  Tensor out({n, m});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = out.data().data();
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      const double av = pa[p * n + i];
      const double* brow = pb + p * m;
      double* crow = pc + i * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return zip(a, b, "sub", [](double x, double y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return zip(a, b, "mul", [](double x, double y) { return x * y; });
}

Tensor scale(const Tensor& a, double s) {
  return map(a, [s](double x) { return x * s; });
}

Tensor add_row(const Tensor& m, const Tensor& bias) {
  require_rank2(m, "add_row");
  if (bias.rank() != 1 || bias.dim(0) != m.cols()) {
    throw DimensionError("add_row: bias " + to_string(bias.shape()) + " does not fit " +
                         to_string(m.shape()));
  }
  Tensor out = m;
  const std::size_t c = m.cols();
  auto dst = out.data();
  auto b = bias.data();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < c; ++j) dst[i * c + j] += b[j];
  return out;
}

Tensor column_sums(const Tensor& m) {
  require_rank2(m, "column_sums");
  Tensor out({m.cols()});
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += m.at(i, j);
  return out;
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return Tensor::scalar(s);
}

Tensor sigmoid(const Tensor& x) {
  return map(x, [](double v) { return sigmoid(v); });
}

Tensor tanh(const Tensor& x) {
  return map(x, [](double v) { return std::tanh(v); });
}

Tensor apply_transfer(const Tensor& x, Transfer t) {
  switch (t) {
    case Transfer::logistic: return sigmoid(x);
    case Transfer::tanh: return tanh(x);
    case Transfer::identity: return x;
  }
  return x;
}

Tensor blend_rows(const Tensor& a, const Tensor& b, std::span<const double> mask) {
  require_same_shape(a, b, "blend_rows");
  require_rank2(a, "blend_rows");
  if (mask.size() != a.rows()) throw DimensionError("blend_rows: mask length mismatch");
  Tensor out = b;
  const std::size_t c = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (mask[i] == 0.0) continue;
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) = a.at(i, j);
  }
  return out;
}

Tensor scale_rows(const Tensor& a, std::span<const double> coeff) {
  require_rank2(a, "scale_rows");
  if (coeff.size() != a.rows()) throw DimensionError("scale_rows: coefficient length mismatch");
  Tensor out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) *= coeff[i];
  return out;
}

Tensor columns(const Tensor& a, std::size_t begin, std::size_t end) {
  require_rank2(a, "columns");
  if (begin > end || end > a.cols()) {
    throw DimensionError("columns: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") outside " + to_string(a.shape()));
  }
  Tensor out({a.rows(), end - begin});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = begin; j < end; ++j) out.at(i, j - begin) = a.at(i, j);
  return out;
}

Tensor posterior_sigma(const Tensor& raw, double floor) {
  return map(raw, [floor](double y) { return std::sqrt(y * y + floor); });
}

}  // namespace storn

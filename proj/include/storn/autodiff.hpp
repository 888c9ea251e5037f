#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <unordered_map>

#include "storn/losses.hpp"
#include "storn/ops.hpp"
#include "storn/tensor.hpp"

// Tape-based reverse mode differentiation.
//
// Every operation on a Var evaluates eagerly and appends a node to its Tape.
// A node is traced when it is a parameter or depends on one; only traced
// nodes carry a backward rule, so evaluating a graph made purely of
// constants costs no more than the plain Tensor functions. The free
// functions below have the same names and semantics as the Tensor functions
// in ops.hpp and losses.hpp, which lets model code be written once as a
// template over the value type.

namespace storn::ad {

class Tape;

class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool valid() const noexcept { return tape_ != nullptr; }
  bool traced() const;
  Tape* tape() const noexcept { return tape_; }
  std::size_t id() const noexcept { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Adjoint accumulators handed to backward rules.
class Adjoints {
 public:
  void add(const Var& v, const Tensor& g);

 private:
  friend class Tape;
  explicit Adjoints(Tape& tape);
  Tape* tape_;
  std::vector<Tensor> adj_;
};

/// Adjoints of the parameters of one backward pass.
class Gradients {
 public:
  /// Zero tensor of the right shape for parameters the loss does not reach.
  Tensor of(const Var& param) const;
  std::size_t visited_ops() const noexcept { return visited_; }

 private:
  friend class Tape;
  const Tape* tape_ = nullptr;
  std::unordered_map<std::size_t, Tensor> grads_;
  std::size_t visited_ = 0;
};

class Tape {
 public:
  using Backprop =
      std::function<void(const Tensor& out_value, const Tensor& out_adjoint, Adjoints& adj)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var parameter(Tensor value);

  /// Appends an operation result. The backward rule is dropped when none of
  /// `inputs` is traced.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backprop backprop);

  /// Reverse sweep from a scalar loss. A tape supports one sweep; record a
  /// fresh forward pass on a new tape for the next one.
  Gradients backward(const Var& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t traced_ops() const noexcept;

 private:
  friend class Var;
  friend class Adjoints;
  struct Node {
    Tensor value;
    bool traced = false;
    bool parameter = false;
    Backprop backprop;
  };

  void check_owner(const Var& v) const;

  std::deque<Node> nodes_;
  bool consumed_ = false;
};

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var mul(const Var& a, const Tensor& b);
Var scale(const Var& a, double s);
Var add_row(const Var& m, const Var& bias);
Var sum(const Var& a);
Var sigmoid(const Var& x);
Var tanh(const Var& x);
Var apply_transfer(const Var& x, Transfer t);
Var blend_rows(const Var& a, const Var& b, std::span<const double> mask);
Var scale_rows(const Var& a, std::span<const double> coeff);
Var columns(const Var& a, std::size_t begin, std::size_t end);
Var posterior_sigma(const Var& raw, double floor);

Var bernoulli_nll_rows(const Var& probs, const Tensor& targets, std::span<const double> mask,
                       double clamp = kProbClamp);
Var bernoulli_logit_nll_rows(const Var& logits, const Tensor& targets, std::span<const double> mask,
                             double clamp = kProbClamp);
Var gaussian_nll_rows(const Var& mean, const Tensor& targets, double sigma,
                      std::span<const double> mask);
Var kl_rows(const Var& mu, const Var& sigma, std::span<const double> mask);

inline Var lift(const Var& like, Tensor value) { return like.tape()->constant(std::move(value)); }
inline const Tensor& value_of(const Var& v) { return v.value(); }

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }

}  // namespace storn::ad

#include "storn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "storn/errors.hpp"

namespace storn::ad {

const Tensor& Var::value() const {
  if (!tape_) throw ArgumentError("use of an unbound Var");
  return tape_->nodes_[id_].value;
}

bool Var::traced() const { return tape_ && tape_->nodes_[id_].traced; }

Adjoints::Adjoints(Tape& tape) : tape_(&tape), adj_(tape.nodes_.size()) {}

void Adjoints::add(const Var& v, const Tensor& g) {
  if (!tape_->nodes_[v.id()].traced) return;
  Tensor& slot = adj_[v.id()];
  if (slot.empty()) {
    if (g.shape() != v.shape()) {
      throw DimensionError("adjoint shape " + to_string(g.shape()) + " for value " +
                           to_string(v.shape()));
    }
    slot = g;
    return;
  }
  auto dst = slot.data();
  auto src = g.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Tensor Gradients::of(const Var& param) const {
  if (param.tape() != tape_) throw ArgumentError("gradient requested for a foreign Var");
  auto it = grads_.find(param.id());
  if (it != grads_.end()) return it->second;
  return Tensor(param.shape());
}

void Tape::check_owner(const Var& v) const {
  if (v.tape() != this) throw ArgumentError("Var belongs to a different tape");
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), false, false, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Tensor value) {
  nodes_.push_back(Node{std::move(value), true, true, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Backprop backprop) {
  bool traced = false;
  for (const auto& in : inputs) {
    check_owner(in);
    traced = traced || nodes_[in.id()].traced;
  }
  nodes_.push_back(Node{std::move(value), traced, false, traced ? std::move(backprop) : nullptr});
  return Var(this, nodes_.size() - 1);
}

std::size_t Tape::traced_ops() const noexcept {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) {
    return n.traced && !n.parameter;
  }));
}

Gradients Tape::backward(const Var& loss) {
  check_owner(loss);
  if (loss.value().size() != 1) {
    throw ArgumentError("backward needs a scalar loss, got shape " + to_string(loss.shape()));
  }
  if (consumed_) throw ArgumentError("tape already differentiated; record a new forward pass");
  consumed_ = true;

  Gradients out;
  out.tape_ = this;
  Adjoints adj(*this);
  adj.add(loss, Tensor(loss.shape(), 1.0));
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.traced || adj.adj_[i].empty()) continue;
    if (n.parameter) {
      out.grads_.emplace(i, std::move(adj.adj_[i]));
      continue;
    }
    n.backprop(n.value, adj.adj_[i], adj);
    ++out.visited_;
    adj.adj_[i] = Tensor();
  }
  return out;
}

Var matmul(const Var& a, const Var& b) {
  return a.tape()->record(storn::matmul(a.value(), b.value()), {a, b},
                          [a, b](const Tensor&, const Tensor& g, Adjoints& adj) {
                            if (a.traced()) adj.add(a, storn::matmul_nt(g, b.value()));
                            if (b.traced()) adj.add(b, storn::matmul_tn(a.value(), g));
                          });
}

Var add(const Var& a, const Var& b) {
  return a.tape()->record(storn::add(a.value(), b.value()), {a, b},
                          [a, b](const Tensor&, const Tensor& g, Adjoints& adj) {
                            adj.add(a, g);
                            adj.add(b, g);
                          });
}

Var sub(const Var& a, const Var& b) {
  return a.tape()->record(storn::sub(a.value(), b.value()), {a, b},
                          [a, b](const Tensor&, const Tensor& g, Adjoints& adj) {
                            adj.add(a, g);
                            if (b.traced()) adj.add(b, storn::scale(g, -1.0));
                          });
}

Var mul(const Var& a, const Var& b) {
  return a.tape()->record(storn::mul(a.value(), b.value()), {a, b},
                          [a, b](const Tensor&, const Tensor& g, Adjoints& adj) {
                            if (a.traced()) adj.add(a, storn::mul(g, b.value()));
                            if (b.traced()) adj.add(b, storn::mul(g, a.value()));
                          });
}

Var mul(const Var& a, const Tensor& b) {
  return a.tape()->record(storn::mul(a.value(), b), {a},
                          [a, b](const Tensor&, const Tensor& g, Adjoints& adj) { adj.add(a, storn::mul(g, b)); });
}

Var scale(const Var& a, double s) {
  return a.tape()->record(storn::scale(a.value(), s), {a},
                          [a, s](const Tensor&, const Tensor& g, Adjoints& adj) { adj.add(a, storn::scale(g, s)); });
}

Var add_row(const Var& m, const Var& bias) {
  return m.tape()->record(storn::add_row(m.value(), bias.value()), {m, bias},
                          [m, bias](const Tensor&, const Tensor& g, Adjoints& adj) {
                            adj.add(m, g);
                            if (bias.traced()) adj.add(bias, storn::column_sums(g));
                          });
}

Var sum(const Var& a) {
  return a.tape()->record(storn::sum(a.value()), {a}, [a](const Tensor&, const Tensor& g, Adjoints& adj) {
    adj.add(a, Tensor(a.shape(), g[0]));
  });
}

Var sigmoid(const Var& x) {
  return x.tape()->record(storn::sigmoid(x.value()), {x},
                          [x](const Tensor& s, const Tensor& g, Adjoints& adj) {
                            Tensor d(g.shape());
                            for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] * s[i] * (1.0 - s[i]);
                            adj.add(x, d);
                          });
}

Var tanh(const Var& x) {
  return x.tape()->record(storn::tanh(x.value()), {x},
                          [x](const Tensor& y, const Tensor& g, Adjoints& adj) {
                            Tensor d(g.shape());
                            for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] * (1.0 - y[i] * y[i]);
                            adj.add(x, d);
                          });
}

Var apply_transfer(const Var& x, Transfer t) {
  switch (t) {
    case Transfer::logistic: return sigmoid(x);
    case Transfer::tanh: return tanh(x);
    case Transfer::identity: return x;
  }
  return x;
}

Var blend_rows(const Var& a, const Var& b, std::span<const double> mask) {
  std::vector<double> m(mask.begin(), mask.end());
  return a.tape()->record(storn::blend_rows(a.value(), b.value(), mask), {a, b},
                          [a, b, m](const Tensor&, const Tensor& g, Adjoints& adj) {
                            std::vector<double> inv(m.size());
                            for (std::size_t i = 0; i < m.size(); ++i) inv[i] = m[i] != 0.0 ? 0.0 : 1.0;
                            std::vector<double> on(m.size());
                            for (std::size_t i = 0; i < m.size(); ++i) on[i] = m[i] != 0.0 ? 1.0 : 0.0;
                            if (a.traced()) adj.add(a, storn::scale_rows(g, on));
                            if (b.traced()) adj.add(b, storn::scale_rows(g, inv));
                          });
}

Var scale_rows(const Var& a, std::span<const double> coeff) {
  std::vector<double> c(coeff.begin(), coeff.end());
  return a.tape()->record(storn::scale_rows(a.value(), coeff), {a},
                          [a, c](const Tensor&, const Tensor& g, Adjoints& adj) {
                            adj.add(a, storn::scale_rows(g, c));
                          });
}

Var columns(const Var& a, std::size_t begin, std::size_t end) {
  return a.tape()->record(storn::columns(a.value(), begin, end), {a},
                          [a, begin, end](const Tensor&, const Tensor& g, Adjoints& adj) {
                            Tensor d(a.shape());
                            for (std::size_t i = 0; i < d.rows(); ++i)
                              for (std::size_t j = begin; j < end; ++j) d.at(i, j) = g.at(i, j - begin);
                            adj.add(a, d);
                          });
}

Var posterior_sigma(const Var& raw, double floor) {
  return raw.tape()->record(storn::posterior_sigma(raw.value(), floor), {raw},
                            [raw](const Tensor& s, const Tensor& g, Adjoints& adj) {
                              const Tensor& y = raw.value();
                              Tensor d(g.shape());
                              for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] * y[i] / s[i];
                              adj.add(raw, d);
                            });
}

Var bernoulli_nll_rows(const Var& probs, const Tensor& targets, std::span<const double> mask,
                       double clamp) {
  std::vector<double> m(mask.begin(), mask.end());
  return probs.tape()->record(
      storn::bernoulli_nll_rows(probs.value(), targets, mask, clamp), {probs},
      [probs, targets, m, clamp](const Tensor&, const Tensor& g, Adjoints& adj) {
        const Tensor& p = probs.value();
        Tensor d(p.shape());
        for (std::size_t i = 0; i < p.rows(); ++i) {
          if (m[i] == 0.0) continue;
          for (std::size_t j = 0; j < p.cols(); ++j) {
            const double v = p.at(i, j);
            if (v < clamp || v > 1.0 - clamp) continue;
            d.at(i, j) = g[i] * (targets.at(i, j) == 1.0 ? -1.0 / v : 1.0 / (1.0 - v));
          }
        }
        adj.add(probs, d);
      });
}

Var bernoulli_logit_nll_rows(const Var& logits, const Tensor& targets, std::span<const double> mask,
                             double clamp) {
  std::vector<double> m(mask.begin(), mask.end());
  return logits.tape()->record(
      storn::bernoulli_logit_nll_rows(logits.value(), targets, mask, clamp), {logits},
      [logits, targets, m, clamp](const Tensor&, const Tensor& g, Adjoints& adj) {
        const Tensor& a = logits.value();
        const double hi = logit_bound(clamp);
        Tensor d(a.shape());
        for (std::size_t i = 0; i < a.rows(); ++i) {
          if (m[i] == 0.0) continue;
          for (std::size_t j = 0; j < a.cols(); ++j) {
            const double v = a.at(i, j);
            if (v < -hi || v > hi) continue;
            d.at(i, j) = g[i] * (storn::sigmoid(v) - targets.at(i, j));
          }
        }
        adj.add(logits, d);
      });
}

Var gaussian_nll_rows(const Var& mean, const Tensor& targets, double sigma,
                      std::span<const double> mask) {
  std::vector<double> m(mask.begin(), mask.end());
  return mean.tape()->record(
      storn::gaussian_nll_rows(mean.value(), targets, sigma, mask), {mean},
      [mean, targets, m, sigma](const Tensor&, const Tensor& g, Adjoints& adj) {
        const Tensor& mu = mean.value();
        const double inv_var = 1.0 / (sigma * sigma);
        Tensor d(mu.shape());
        for (std::size_t i = 0; i < mu.rows(); ++i) {
          if (m[i] == 0.0) continue;
          for (std::size_t j = 0; j < mu.cols(); ++j)
            d.at(i, j) = g[i] * (mu.at(i, j) - targets.at(i, j)) * inv_var;
        }
        adj.add(mean, d);
      });
}

Var kl_rows(const Var& mu, const Var& sigma, std::span<const double> mask) {
  std::vector<double> m(mask.begin(), mask.end());
  return mu.tape()->record(
      storn::kl_rows(mu.value(), sigma.value(), mask), {mu, sigma},
      [mu, sigma, m](const Tensor&, const Tensor& g, Adjoints& adj) {
        const Tensor& mv = mu.value();
        const Tensor& sv = sigma.value();
        Tensor dmu(mv.shape()), dsigma(sv.shape());
        for (std::size_t i = 0; i < mv.rows(); ++i) {
          if (m[i] == 0.0) continue;
          for (std::size_t j = 0; j < mv.cols(); ++j) {
            dmu.at(i, j) = g[i] * mv.at(i, j);
            dsigma.at(i, j) = g[i] * (sv.at(i, j) - 1.0 / sv.at(i, j));
          }
        }
        if (mu.traced()) adj.add(mu, dmu);
        if (sigma.traced()) adj.add(sigma, dsigma);
      });
}

}  // namespace storn::ad

#include "storn/rnn.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "storn/errors.hpp"

namespace storn {

RnnDims dims_of(const RnnParams& p) {
  return {p.w_in.dim(0), p.w_in.dim(1), p.w_out.dim(1)};
}

void validate(const RnnParams& p) {
  if (p.w_in.rank() != 2 || p.w_rec.rank() != 2 || p.w_out.rank() != 2 || p.b_hid.rank() != 1 ||
      p.b_out.rank() != 1) {
    throw DimensionError("rnn weights have the wrong rank");
  }
  const RnnDims d = dims_of(p);
  if (d.input == 0 || d.hidden == 0 || d.output == 0) throw DimensionError("rnn extents must be positive");
  if (p.w_rec.shape() != Shape{d.hidden, d.hidden}) {
    throw DimensionError("recurrent matrix " + to_string(p.w_rec.shape()) + " is not " +
                         std::to_string(d.hidden) + "x" + std::to_string(d.hidden));
  }
  if (p.w_out.dim(0) != d.hidden || p.b_hid.dim(0) != d.hidden || p.b_out.dim(0) != d.output) {
    throw DimensionError("rnn output map or biases disagree with hidden width " +
                         std::to_string(d.hidden));
  }
  for (const Tensor* w : {&p.w_in, &p.w_rec, &p.w_out, &p.b_hid, &p.b_out}) {
    if (!w->all_finite()) throw ValidationError("rnn weights contain non-finite values");
  }
}

RnnVars bind(ad::Tape& tape, const RnnParams& p, bool trainable) {
  auto put = [&](const Tensor& t) { return trainable ? tape.parameter(t) : tape.constant(t); };
  return RnnVars{put(p.w_in), put(p.w_rec), put(p.w_out), put(p.b_hid), put(p.b_out), p.hidden,
                 p.output};
}

double spectral_radius(const Tensor& square) {
  if (square.rank() != 2 || square.rows() != square.cols()) {
    throw DimensionError("spectral radius of non-square " + to_string(square.shape()));
  }
  const auto n = static_cast<Eigen::Index>(square.rows());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = square.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

RnnParams init_params(const RnnDims& dims, std::string_view scheme, std::uint64_t seed,
                      Transfer hidden, Transfer output) {
  if (dims.input == 0 || dims.hidden == 0 || dims.output == 0) {
    throw ArgumentError("rnn dimensions must be positive");
  }
  RnnParams p{Tensor({dims.input, dims.hidden}), Tensor({dims.hidden, dims.hidden}),
              Tensor({dims.hidden, dims.output}), Tensor({dims.hidden}), Tensor({dims.output}),
              hidden, output};
  if (scheme == "zero") return p;
  if (scheme != "default") throw ConfigError("unknown initialisation scheme '" + std::string(scheme) + "'");

  std::mt19937_64 rng(seed);
  auto glorot = [&](Tensor& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& v : w.data()) v = u(rng);
  };
  glorot(p.w_in);
  glorot(p.w_out);

  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : p.w_rec.data()) v = normal(rng);
  const double radius = spectral_radius(p.w_rec);
  if (radius > 0.0) {
    for (auto& v : p.w_rec.data()) v /= radius;
  }
  return p;
}

RnnOutput rnn_forward(const RnnParams& p, const SequenceBatch& inputs, const std::optional<Tensor>& h0) {
  validate(p);
  if (inputs.features() != p.w_in.dim(0)) {
    throw DimensionError("input width " + std::to_string(inputs.features()) +
                         " does not match rnn input width " + std::to_string(p.w_in.dim(0)));
  }
  const std::size_t batch = inputs.batch(), units = p.w_rec.dim(0);
  Tensor start = h0.value_or(Tensor({batch, units}));
  if (start.shape() != Shape{batch, units}) {
    throw DimensionError("initial state " + to_string(start.shape()) + " for batch " +
                         std::to_string(batch) + " and " + std::to_string(units) + " units");
  }
  const auto xs = step_values(p.w_in, inputs.values);
  const auto hidden = run_hidden(p, xs, nullptr, inputs.mask, start);
  std::vector<Tensor> outputs;
  outputs.reserve(hidden.size());
  for (std::size_t t = 0; t < hidden.size(); ++t) {
    outputs.push_back(
        scale_rows(apply_transfer(output_preactivation(p, hidden[t]), p.output), inputs.mask_row(t)));
  }
  return {stack_steps(hidden), stack_steps(outputs)};
}

Tensor birnn_forward(const RnnParams& fwd, const RnnParams& bwd, const SequenceBatch& inputs) {
  validate(fwd);
  validate(bwd);
  if (dims_of(fwd).input != dims_of(bwd).input || dims_of(fwd).output != dims_of(bwd).output) {
    throw DimensionError("bidirectional halves disagree on input or output width");
  }
  if (inputs.features() != fwd.w_in.dim(0)) {
    throw DimensionError("input width " + std::to_string(inputs.features()) +
                         " does not match rnn input width " + std::to_string(fwd.w_in.dim(0)));
  }
  return stack_steps(birnn_outputs(fwd, bwd, step_values(fwd.w_in, inputs.values), inputs.mask));
}

}  // namespace storn

#include "storn/sequence.hpp"

#include <algorithm>

#include "storn/errors.hpp"

namespace storn {

std::size_t SequenceBatch::length(std::size_t b) const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < steps(); ++t) n += mask.at(t, b) != 0.0 ? 1 : 0;
  return n;
}

std::size_t SequenceBatch::valid_steps() const {
  std::size_t n = 0;
  for (double m : mask.data()) n += m != 0.0 ? 1 : 0;
  return n;
}

Tensor SequenceBatch::sequence(std::size_t b) const {
  const std::size_t len = length(b), k = features();
  Tensor out({len, k});
  for (std::size_t t = 0; t < len; ++t)
    for (std::size_t j = 0; j < k; ++j) out.at(t, j) = values.at(t, b, j);
  return out;
}

void SequenceBatch::validate() const {
  if (values.rank() != 3) throw DimensionError("sequence values must be time x batch x features");
  if (mask.shape() != Shape{values.dim(0), values.dim(1)}) {
    throw DimensionError("mask " + to_string(mask.shape()) + " does not match values " +
                         to_string(values.shape()));
  }
  for (std::size_t b = 0; b < batch(); ++b) {
    bool ended = false;
    for (std::size_t t = 0; t < steps(); ++t) {
      const double m = mask.at(t, b);
      if (m != 0.0 && m != 1.0) throw ValidationError("mask entries must be 0 or 1");
      if (m == 0.0) {
        ended = true;
        for (std::size_t k = 0; k < features(); ++k) {
          if (values.at(t, b, k) != 0.0) {
            throw ValidationError("padded entry (" + std::to_string(t) + ", " + std::to_string(b) +
                                  ") is not zero");
          }
        }
      } else if (ended) {
        throw ValidationError("mask of sequence " + std::to_string(b) +
                              " is not prefix-contiguous");
      }
    }
  }
}

SequenceBatch SequenceBatch::from_sequences(std::span<const Tensor> sequences) {
  if (sequences.empty()) throw ArgumentError("cannot batch zero sequences");
  const std::size_t k = sequences.front().dim(1);
  std::size_t longest = 0;
  for (const auto& s : sequences) {
    if (s.rank() != 2 || s.dim(1) != k) {
      throw DimensionError("sequence of shape " + to_string(s.shape()) + " in a batch of width " +
                           std::to_string(k));
    }
    longest = std::max(longest, s.dim(0));
  }
  SequenceBatch out{Tensor({longest, sequences.size(), k}), Tensor({longest, sequences.size()})};
  for (std::size_t b = 0; b < sequences.size(); ++b) {
    const Tensor& s = sequences[b];
    for (std::size_t t = 0; t < s.dim(0); ++t) {
      out.mask.at(t, b) = 1.0;
      for (std::size_t j = 0; j < k; ++j) out.values.at(t, b, j) = s.at(t, j);
    }
  }
  return out;
}

SequenceBatch shift_right(const SequenceBatch& x) {
  SequenceBatch out{Tensor(x.values.shape()), x.mask};
  for (std::size_t t = 1; t < x.steps(); ++t) {
    for (std::size_t b = 0; b < x.batch(); ++b) {
      if (x.mask.at(t, b) == 0.0) continue;
      for (std::size_t k = 0; k < x.features(); ++k) out.values.at(t, b, k) = x.values.at(t - 1, b, k);
    }
  }
  return out;
}

}  // namespace storn

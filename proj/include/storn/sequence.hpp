#pragma once

#include <span>
#include <vector>

#include "storn/tensor.hpp"

namespace storn {

/// Padded batch of variable-length sequences.
///
/// `values` is time x batch x features and `mask` is time x batch with 1 for
/// valid steps. Masks are prefix-contiguous per sequence and padded entries
/// of `values` are zero.
struct SequenceBatch {
  Tensor values;
  Tensor mask;

  std::size_t steps() const { return values.dim(0); }
  std::size_t batch() const { return values.dim(1); }
  std::size_t features() const { return values.dim(2); }

  std::size_t length(std::size_t b) const;
  std::size_t valid_steps() const;
  std::span<const double> mask_row(std::size_t t) const {
    return mask.data().subspan(t * batch(), batch());
  }
  Tensor step(std::size_t t) const { return values.slice(t); }

  /// Sequence `b` without padding, as length x features.
  Tensor sequence(std::size_t b) const;

  /// Throws ValidationError on a broken mask or non-zero padding.
  void validate() const;

  /// Pads `sequences` (each length x features) to the longest one.
  static SequenceBatch from_sequences(std::span<const Tensor> sequences);
};

/// Input stream of the one-step-ahead recurrences: step t carries x_{t-1},
/// with a zero vector at t = 0. The mask is unchanged.
SequenceBatch shift_right(const SequenceBatch& x);

}  // namespace storn

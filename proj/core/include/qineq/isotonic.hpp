#pragma once

#include <span>
#include <vector>

#include "qineq/pwl_surface.hpp"

namespace qineq {

struct IsotonicBlock {
  int start;  ///< first index, inclusive
  int end;    ///< last index, inclusive
  double value;
};

struct IsotonicFit {
  std::vector<double> values;
  std::vector<IsotonicBlock> blocks;
};

/// Weighted least-squares projection onto nondecreasing sequences (pool
/// adjacent violators). Adjacent blocks are merged only on a strict violation,
/// so ties stay as separate blocks.
IsotonicFit pava(std::span<const double> values, std::span<const double> weights);

/// Unit-weight overload.
IsotonicFit pava(std::span<const double> values);

/// Replaces every coefficient column of the surface with its PAVA fit.
/// Empty `weights` means w_j = 1.
BetaSurface isotonize_surface(const BetaSurface& surface, std::span<const double> weights = {});

}  // namespace qineq

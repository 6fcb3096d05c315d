#pragma once

#include <cstdint>
#include <vector>

#include "partcrop/manifest.hpp"

namespace partcrop {

/// Partial-knowledge split. "Known" sets train the attacker; "unknown" sets
/// are attacked. Members play the target's training data, non-members its
/// test data. Index lists refer to manifest entries and are ascending.
struct SplitPlan {
  double known_fraction = 0.5;
  std::uint64_t seed = 0;
  std::vector<std::size_t> known_members;
  std::vector<std::size_t> known_nonmembers;
  std::vector<std::size_t> unknown_members;
  std::vector<std::size_t> unknown_nonmembers;

  /// Known members followed by known non-members.
  std::vector<std::size_t> known() const;
  std::vector<std::size_t> unknown() const;
};

/// Stratified by membership: floor(fraction * class size) of each class is
/// known. Throws InvalidInput if the fraction is outside (0, 1) or a class
/// would end up with an empty known or unknown part.
SplitPlan split_dataset(const DatasetManifest& manifest, double known_fraction, std::uint64_t seed);

}  // namespace partcrop

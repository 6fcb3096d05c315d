#include "partcrop/split.hpp"

#include <algorithm>
#include <cmath>

#include "partcrop/errors.hpp"
#include "partcrop/rng.hpp"

namespace partcrop {

std::vector<std::size_t> SplitPlan::known() const {
  std::vector<std::size_t> out = known_members;
  out.insert(out.end(), known_nonmembers.begin(), known_nonmembers.end());
  return out;
}

std::vector<std::size_t> SplitPlan::unknown() const {
  std::vector<std::size_t> out = unknown_members;
  out.insert(out.end(), unknown_nonmembers.begin(), unknown_nonmembers.end());
  return out;
}

SplitPlan split_dataset(const DatasetManifest& manifest, double known_fraction, std::uint64_t seed) {
  if (!(known_fraction > 0.0 && known_fraction < 1.0)) {
    throw InvalidInput("known_fraction must lie in (0, 1)");
  }
  SplitPlan plan;
  plan.known_fraction = known_fraction;
  plan.seed = seed;

  auto split_class = [&](Membership cls, std::vector<std::size_t>& known,
                         std::vector<std::size_t>& unknown) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      if (manifest.entries[i].membership == cls) idx.push_back(i);
    }
    const auto n_known = static_cast<std::size_t>(std::floor(known_fraction * static_cast<double>(idx.size())));
    if (n_known == 0 || n_known == idx.size()) {
      throw InvalidInput("class '" + to_string(cls) + "' with " + std::to_string(idx.size()) +
                         " entries is too small to split at fraction " + std::to_string(known_fraction));
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(std::span(idx));
    known.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_known));
    unknown.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_known), idx.end());
    std::sort(known.begin(), known.end());
    std::sort(unknown.begin(), unknown.end());
  };
  split_class(Membership::member, plan.known_members, plan.unknown_members);
  split_class(Membership::nonmember, plan.known_nonmembers, plan.unknown_nonmembers);
  return plan;
}

}  // namespace partcrop

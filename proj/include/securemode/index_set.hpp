#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "securemode/scalar.hpp"

namespace securemode {

/// Sorted, duplicate-free, zero-based channel indices (sensors or actuators).
using IndexSet = std::vector<std::size_t>;

/// Throws unless `s` is strictly increasing and every entry is below `bound`.
inline void validate_index_set(const IndexSet& s, std::size_t bound, const std::string& what) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] >= bound)
      throw Error(what + ": index " + std::to_string(s[k] + 1) + " out of range 1.." + std::to_string(bound));
    if (k > 0 && s[k] <= s[k - 1]) throw Error(what + ": indices must be sorted and distinct");
  }
}

inline IndexSet normalize_index_set(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline IndexSet complement(const IndexSet& s, std::size_t bound) {
  IndexSet out;
  for (std::size_t k = 0, pos = 0; k < bound; ++k) {
    if (pos < s.size() && s[pos] == k) {
      ++pos;
      continue;
    }
    out.push_back(k);
  }
  return out;
}

/// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<IndexSet> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<IndexSet> out;
  if (k > n) return out;
  IndexSet cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

/// Subsets of size 0..k, by size then lexicographically.
inline std::vector<IndexSet> subsets_up_to(std::size_t n, std::size_t k) {
  std::vector<IndexSet> out;
  for (std::size_t s = 0; s <= std::min(n, k); ++s) {
    auto level = subsets_of_size(n, s);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// One-based rendering, "{1,3}".
inline std::string format_index_set(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k] + 1);
  return out + "}";
}

}  // namespace securemode

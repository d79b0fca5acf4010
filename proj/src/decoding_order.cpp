#include "semnoma/decoding_order.hpp"

#include <algorithm>
#include <numeric>

#include "semnoma/errors.hpp"

namespace semnoma {

DecodingOrder DecodingOrder::from_permutation(const std::vector<int>& order) {
  const int k_count = static_cast<int>(order.size());
  DecodingOrder d;
  d.num_sus = k_count;
  d.before.assign(static_cast<std::size_t>(k_count) * k_count, 0);
  d.priorities.assign(k_count, 0.0);
  std::vector<int> position(k_count, -1);
  for (int pos = 0; pos < k_count; ++pos) {
    const int su = order[pos];
    if (su < 0 || su >= k_count || position[su] >= 0)
      throw ConfigError("decoding order: not a permutation");
    position[su] = pos;
    d.priorities[su] = pos;
  }
  for (int k = 0; k < k_count; ++k)
    for (int j = 0; j < k_count; ++j)
      if (k != j && position[k] < position[j]) d.before[k * k_count + j] = 1;
  return d;
}

std::vector<int> DecodingOrder::permutation() const {
  std::vector<int> sus(num_sus);
  std::iota(sus.begin(), sus.end(), 0);
  // First-decoded SU precedes everyone: largest row sum.
  std::vector<int> row_sum(num_sus, 0);
  for (int k = 0; k < num_sus; ++k)
    for (int j = 0; j < num_sus; ++j) row_sum[k] += before[k * num_sus + j];
  std::stable_sort(sus.begin(), sus.end(),
                   [&](int a, int b) { return row_sum[a] > row_sum[b]; });
  return sus;
}

std::vector<int> DecodingOrder::decode_positions() const {
  const std::vector<int> perm = permutation();
  std::vector<int> position(num_sus, 0);
  for (int pos = 0; pos < num_sus; ++pos) position[perm[pos]] = pos;
  return position;
}

void DecodingOrder::validate() const {
  if (num_sus < 1) throw ConfigError("decoding order: empty");
  if (static_cast<int>(before.size()) != num_sus * num_sus)
    throw ConfigError("decoding order: bad matrix size");
  std::vector<int> row_sum(num_sus, 0);
  for (int k = 0; k < num_sus; ++k) {
    if (before[k * num_sus + k] != 0)
      throw ConfigError("decoding order: nonzero self term");
    for (int j = 0; j < num_sus; ++j) {
      if (j == k) continue;
      const int pair = before[k * num_sus + j] + before[j * num_sus + k];
      if (pair != 1) throw ConfigError("decoding order: pairing violated");
      row_sum[k] += before[k * num_sus + j];
    }
  }
  // A strict total order has row sums {K-1, ..., 0} in some assignment.
  std::vector<int> sorted = row_sum;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < num_sus; ++i)
    if (sorted[i] != i) throw ConfigError("decoding order: cyclic precedence");
}

}  // namespace semnoma

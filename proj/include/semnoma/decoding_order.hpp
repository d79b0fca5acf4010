#pragma once

#include <cstdint>
#include <vector>

namespace semnoma {

// NOMA successive-decoding precedence. before(k, j) == 1 means SU-k is
// decoded before SU-j and therefore receives SU-j's signal as interference.
// Self terms are meaningless and kept at zero.
struct DecodingOrder {
  int num_sus = 0;
  std::vector<std::uint8_t> before;  // num_sus * num_sus, row-major
  std::vector<double> priorities;    // r_k diagnostic: decode position of SU-k

  bool decodes_before(int k, int j) const { return before[k * num_sus + j] != 0; }

  /// order[0] is decoded first.
  static DecodingOrder from_permutation(const std::vector<int>& order);

  /// Recover the permutation (first-decoded SU first) from row sums.
  std::vector<int> permutation() const;

  /// position[k] = decode slot of SU-k (0 = first).
  std::vector<int> decode_positions() const;

  /// Throws ConfigError unless pairing and acyclicity hold.
  void validate() const;
};

}  // namespace semnoma

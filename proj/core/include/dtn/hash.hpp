// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_HASH_HPP
#define DTN_HASH_HPP

#include <cstdint>
#include <string_view>

namespace dtn
{

// FNV-1a, 64 bit. Stable across platforms; used for provenance hashes in reports.
inline std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull)
{
  std::uint64_t h = seed;
  for (unsigned char c : bytes)
  {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace dtn

#endif  // DTN_HASH_HPP

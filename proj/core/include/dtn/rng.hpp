// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_RNG_HPP
#define DTN_RNG_HPP

#include <cstdint>

#include <Eigen/Dense>

namespace dtn
{

//
// xorshift64* (Marsaglia xorshift with the 2685821657736338717 multiplier): the
// documented generator behind every random probe, so runs reproduce bit-for-bit
// across languages. state must be nonzero; uniform doubles take the top 53 bits.
//
class Xorshift64Star
{
public:
  explicit Xorshift64Star(std::uint64_t seed) : state_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed)
  {
  }

  std::uint64_t Next()
  {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 2685821657736338717ull;
  }

  // uniform in [0, 1)
  double Uniform()
  {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  // uniform in [-1, 1]
  double Symmetric()
  {
    return 2.0 * Uniform() - 1.0;
  }

  Eigen::VectorXd SymmetricVector(int n)
  {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; i++)
    {
      v[i] = Symmetric();
    }
    return v;
  }

private:
  std::uint64_t state_;
};

}  // namespace dtn

#endif  // DTN_RNG_HPP

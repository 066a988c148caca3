#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace momo {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Largest k >= 0 with base^k <= x. Pure integer iteration; no floating logs,
// so boundary powers (x == base^k exactly) are never misclassified.
inline unsigned floor_log(u64 base, u64 x) {
  if (base < 2) throw std::invalid_argument("floor_log: base must be >= 2");
  unsigned k = 0;
  u64 v = 1;
  while (v <= x / base) {
    v *= base;
    ++k;
  }
  return k;
}

// base^exp, or cap+1 if the true value exceeds cap (or overflows).
inline u64 ipow_capped(u64 base, unsigned exp, u64 cap) {
  u64 v = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && v > cap / base) return cap == std::numeric_limits<u64>::max() ? cap : cap + 1;
    v *= base;
    if (v > cap) return v;
  }
  return v;
}

// Largest r with r^k <= x (k >= 1).
inline u64 floor_kth_root(u64 x, unsigned k) {
  if (k == 0) throw std::invalid_argument("floor_kth_root: k must be >= 1");
  if (k == 1 || x < 2) return x;
  u64 lo = 1, hi = u64(1) << (64 / k);
  while (hi - lo > 1) {
    u64 mid = lo + (hi - lo) / 2;
    if (ipow_capped(mid, k, x) <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Rational primes <= bound, by plain odd-only sieve of Eratosthenes.
inline std::vector<u64> sieve_primes(u64 bound) {
  std::vector<u64> primes;
  if (bound < 2) return primes;
  primes.push_back(2);
  if (bound < 3) return primes;
  const u64 n = (bound - 1) / 2;  // odd numbers 3,5,...,2n+1
  std::vector<bool> composite(n + 1, false);
  for (u64 i = 1; 2 * i + 1 <= bound / (2 * i + 1); ++i) {
    if (composite[i]) continue;
    const u64 p = 2 * i + 1;
    for (u64 j = (p * p - 1) / 2; j <= n; j += p) composite[j] = true;
  }
  for (u64 i = 1; i <= n; ++i)
    if (!composite[i]) primes.push_back(2 * i + 1);
  return primes;
}

inline int mobius(u64 n) {
  int mu = 1;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      mu = -mu;
    }
  }
  if (n > 1) mu = -mu;
  return mu;
}

// Writes p and e with n == p^e when n is a prime power (p prime, e >= 1).
inline bool is_prime_power(u64 n, u64* base_out = nullptr, unsigned* exp_out = nullptr) {
  if (n < 2) return false;
  u64 p = n;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  unsigned e = 0;
  u64 m = n;
  while (m % p == 0) {
    m /= p;
    ++e;
  }
  if (m != 1) return false;
  if (base_out) *base_out = p;
  if (exp_out) *exp_out = e;
  return true;
}

}  // namespace momo

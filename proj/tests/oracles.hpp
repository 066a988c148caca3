#pragma once

// Brute-force reference implementations for the test suites. Everything here
// is deliberately independent of the library's enumeration and summation
// paths: trial division, term-by-term series, naive polynomial arithmetic.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <monoid_moments/arith.hpp>

namespace oracle {

using momo::u64;

inline std::vector<std::pair<u64, u64>> factor_u64(u64 n) {
  std::vector<std::pair<u64, u64>> out;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      u64 e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline u64 big_omega_u64(u64 n) {
  u64 total = 0;
  for (auto [p, e] : factor_u64(n)) total += e;
  return total;
}

inline bool is_h_free_u64(u64 n, unsigned h) {
  for (auto [p, e] : factor_u64(n))
    if (e > h - 1) return false;
  return true;
}

inline bool is_h_full_u64(u64 n, unsigned h) {
  for (auto [p, e] : factor_u64(n))
    if (e < h) return false;
  return true;
}

struct BruteTally {
  u64 count = 0, s1 = 0, s2 = 0;
};

// Walks every integer in [1,x] by trial division.
inline BruteTally integer_family_tally(u64 x, unsigned h, bool h_free) {
  BruteTally t;
  for (u64 n = 1; n <= x; ++n) {
    const bool in = h_free ? is_h_free_u64(n, h) : is_h_full_u64(n, h);
    if (!in) continue;
    const u64 om = big_omega_u64(n);
    ++t.count;
    t.s1 += om;
    t.s2 += om * om;
  }
  return t;
}

// Riemann zeta via the integer series with an Euler-Maclaurin tail:
//   sum_{n<=N} n^-s + N^{1-s}/(s-1) - N^-s/2 + s N^{-s-1}/12.
// Good to ~1e-13 for s >= 1.5 at N = 2e4.
inline double zeta_series(double s, unsigned N = 20000) {
  long double sum = 0.0L;
  for (unsigned n = 1; n <= N; ++n) sum += std::pow((long double)n, (long double)-s);
  const long double Nd = N;
  sum += std::pow(Nd, 1.0L - (long double)s) / ((long double)s - 1.0L);
  sum -= std::pow(Nd, (long double)-s) / 2.0L;
  sum += (long double)s * std::pow(Nd, (long double)-s - 1.0L) / 12.0L;
  return double(sum);
}

// Monic irreducible count over F_p (p prime) by exhaustive factor search.
// Polynomials are coefficient vectors, constant term first, degree d monic.
namespace gf {

inline std::vector<unsigned> poly_mod(std::vector<unsigned> a, const std::vector<unsigned>& b, unsigned p) {
  // remainder of a by monic b over F_p
  const std::size_t db = b.size() - 1;
  while (a.size() > db) {
    const unsigned lead = a.back();
    if (lead != 0) {
      const std::size_t shift = a.size() - 1 - db;
      for (std::size_t i = 0; i <= db; ++i) a[shift + i] = (a[shift + i] + p * p - lead * b[i] % (p * p)) % p;
    }
    a.pop_back();
  }
  return a;
}

inline bool is_zero(const std::vector<unsigned>& a) {
  for (unsigned c : a)
    if (c) return false;
  return true;
}

inline bool divides(const std::vector<unsigned>& b, const std::vector<unsigned>& a, unsigned p) {
  return is_zero(poly_mod(a, b, p));
}

// enumerate all monic polynomials of degree d as coefficient vectors
inline void all_monic(unsigned p, unsigned d, std::vector<std::vector<unsigned>>& out) {
  std::vector<unsigned> coeffs(d + 1, 0);
  coeffs[d] = 1;
  const u64 total = momo::ipow_capped(p, d, u64(1) << 40);
  for (u64 idx = 0; idx < total; ++idx) {
    u64 v = idx;
    for (unsigned i = 0; i < d; ++i) {
      coeffs[i] = unsigned(v % p);
      v /= p;
    }
    out.push_back(coeffs);
  }
}

inline u64 irreducible_count_brute(unsigned p, unsigned d) {
  if (d == 1) return p;
  std::vector<std::vector<unsigned>> candidates;
  all_monic(p, d, candidates);
  std::vector<std::vector<unsigned>> low;
  for (unsigned dd = 1; dd <= d / 2; ++dd) all_monic(p, dd, low);
  u64 count = 0;
  for (const auto& cand : candidates) {
    bool irred = true;
    for (const auto& f : low)
      if (divides(f, cand, p)) {
        irred = false;
        break;
      }
    if (irred) ++count;
  }
  return count;
}

}  // namespace gf

}  // namespace oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"

namespace momo {

// The set X the counting variable ranges over: all of Q, or powers of a fixed q.
enum class XMode { rational, q_power };

// Declared density data of the monoid: M(x) ~ kappa*x with error exponent theta.
struct MonoidParams {
  double kappa = 1.0;
  double theta = 0.0;
  XMode x_mode = XMode::rational;
  u64 q = 0;  // meaningful only for x_mode == q_power

  void validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("MonoidParams: kappa must be > 0");
    if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("MonoidParams: theta must be in [0,1)");
    if (x_mode == XMode::q_power && q < 2) throw std::invalid_argument("MonoidParams: q_power mode requires integer q >= 2");
  }
};

enum class SpectrumKind { integers, monic_polynomials, synthetic };

struct PrimeSlot {
  u64 id;
  u64 norm;
};

// Monic irreducible count over F_q in degree d: (1/d) sum_{e|d} mu(e) q^{d/e}.
inline u64 irreducible_count(u64 q, unsigned d) {
  i64 total = 0;
  for (unsigned e = 1; e <= d; ++e) {
    if (d % e != 0) continue;
    int mu = mobius(e);
    if (mu == 0) continue;
    u64 pw = ipow_capped(q, d / e, std::numeric_limits<u64>::max() / 2);
    total += i64(mu) * i64(pw);
  }
  return u64(total / i64(d));
}

// The prime data of a monoid: every prime norm <= norm_bound, with multiplicity.
// Slots of equal norm are distinct primes; ids are dense, ordered by (norm, id).
// Stored grouped by norm since all counting statistics depend only on the norm
// multiset. Synthetic spectra are complete by definition (the records *are* the
// whole prime set), so their norm_bound is unbounded.
class NormSpectrum {
 public:
  static NormSpectrum integers(u64 norm_bound) {
    if (norm_bound < 2) throw std::invalid_argument("integer spectrum: norm_bound must be >= 2 (empty spectrum)");
    NormSpectrum s;
    s.kind_ = SpectrumKind::integers;
    s.params_ = MonoidParams{1.0, 0.0, XMode::rational, 0};
    s.norm_bound_ = norm_bound;
    for (u64 p : sieve_primes(norm_bound)) {
      s.norms_.push_back(p);
      s.counts_.push_back(1);
    }
    s.finish();
    return s;
  }

  static NormSpectrum monic_polynomials(u64 q, unsigned max_degree) {
    u64 base = 0;
    unsigned exp = 0;
    if (!is_prime_power(q, &base, &exp)) throw std::invalid_argument("polynomial spectrum: q must be a prime power >= 2");
    if (max_degree < 1) throw std::invalid_argument("polynomial spectrum: max_degree must be >= 1");
    NormSpectrum s;
    s.kind_ = SpectrumKind::monic_polynomials;
    s.params_ = MonoidParams{double(q) / double(q - 1), 0.0, XMode::q_power, q};
    s.norm_bound_ = ipow_capped(q, max_degree, std::numeric_limits<u64>::max() / 2);
    for (unsigned d = 1; d <= max_degree; ++d) {
      s.norms_.push_back(ipow_capped(q, d, std::numeric_limits<u64>::max() / 2));
      s.counts_.push_back(irreducible_count(q, d));
    }
    s.finish();
    return s;
  }

  // records: (norm, count), norms strictly increasing, norms >= 2, counts >= 1.
  static NormSpectrum synthetic(const std::vector<std::pair<u64, u64>>& records, MonoidParams params) {
    params.validate();
    NormSpectrum s;
    s.kind_ = SpectrumKind::synthetic;
    s.params_ = params;
    s.norm_bound_ = std::numeric_limits<u64>::max();
    u64 prev = 0;
    for (auto [norm, count] : records) {
      if (norm < 2) throw std::invalid_argument("synthetic spectrum: norm 1 is not a valid prime norm");
      if (count < 1) throw std::invalid_argument("synthetic spectrum: counts must be >= 1");
      if (norm <= prev) throw std::invalid_argument("synthetic spectrum: norms must be strictly increasing");
      prev = norm;
      s.norms_.push_back(norm);
      s.counts_.push_back(count);
    }
    s.finish();
    return s;
  }

  // One record per line: "<norm> <count>". '#' starts a comment; blank lines ok.
  static NormSpectrum synthetic_from_file(const std::string& path, MonoidParams params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("synthetic spectrum: cannot open " + path);
    std::vector<std::pair<u64, u64>> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      u64 norm = 0, count = 0;
      if (!(ls >> norm)) continue;  // blank or comment-only
      if (!(ls >> count)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected '<norm> <count>'");
      std::string trailing;
      if (ls >> trailing) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing data");
      records.emplace_back(norm, count);
    }
    return synthetic(records, params);
  }

  SpectrumKind kind() const { return kind_; }
  const MonoidParams& params() const { return params_; }
  u64 norm_bound() const { return norm_bound_; }

  std::size_t group_count() const { return norms_.size(); }
  u64 group_norm(std::size_t g) const { return norms_[g]; }
  u64 group_size(std::size_t g) const { return counts_[g]; }
  u64 group_offset(std::size_t g) const { return offsets_[g]; }
  u64 slot_count() const { return offsets_.back(); }
  u64 max_norm() const { return norms_.empty() ? 1 : norms_.back(); }

  std::size_t group_of_slot(u64 id) const {
    if (id >= slot_count()) throw std::out_of_range("unknown slot id");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id);
    return std::size_t(it - offsets_.begin()) - 1;
  }

  u64 slot_norm(u64 id) const { return norms_[group_of_slot(id)]; }
  PrimeSlot slot(u64 id) const { return PrimeSlot{id, slot_norm(id)}; }

  // Number of slots (groups expanded) with norm <= x.
  u64 slots_upto(u64 x) const {
    auto it = std::upper_bound(norms_.begin(), norms_.end(), x);
    std::size_t g = std::size_t(it - norms_.begin());
    return offsets_[g];
  }

  // Index of past-the-end group for norms <= x.
  std::size_t groups_upto(u64 x) const {
    auto it = std::upper_bound(norms_.begin(), norms_.end(), x);
    return std::size_t(it - norms_.begin());
  }

  // True when every prime of the underlying monoid with norm <= x is present.
  bool complete_to(u64 x) const { return x <= norm_bound_; }

  void require_complete(u64 x) const {
    if (!complete_to(x))
      throw std::domain_error("insufficient spectrum: complete to " + std::to_string(norm_bound_) +
                              ", need " + std::to_string(x));
  }

 private:
  void finish() {
    offsets_.resize(norms_.size() + 1);
    offsets_[0] = 0;
    for (std::size_t g = 0; g < norms_.size(); ++g) offsets_[g + 1] = offsets_[g] + counts_[g];
  }

  SpectrumKind kind_ = SpectrumKind::synthetic;
  MonoidParams params_;
  u64 norm_bound_ = 1;
  std::vector<u64> norms_;    // strictly increasing
  std::vector<u64> counts_;   // slots per norm
  std::vector<u64> offsets_;  // prefix sums of counts_, size +1
};

// An element as sorted (slot id, multiplicity) pairs; empty = identity.
struct Factorization {
  std::vector<std::pair<u64, u64>> terms;

  static Factorization from_terms(std::vector<std::pair<u64, u64>> t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].second < 1) throw std::invalid_argument("factorization: exponents must be >= 1");
      if (i > 0 && t[i].first <= t[i - 1].first)
        throw std::invalid_argument("factorization: slot ids must be sorted and distinct");
    }
    return Factorization{std::move(t)};
  }
};

// Exponent-wise sum of two factorizations (the monoid operation).
inline Factorization add(const Factorization& f, const Factorization& g) {
  Factorization out;
  std::size_t i = 0, j = 0;
  while (i < f.terms.size() || j < g.terms.size()) {
    if (j == g.terms.size() || (i < f.terms.size() && f.terms[i].first < g.terms[j].first)) {
      out.terms.push_back(f.terms[i++]);
    } else if (i == f.terms.size() || g.terms[j].first < f.terms[i].first) {
      out.terms.push_back(g.terms[j++]);
    } else {
      out.terms.emplace_back(f.terms[i].first, f.terms[i].second + g.terms[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

// prod N(p)^e over the factorization; identity -> 1. Exact in 128 bits;
// anything wider is rejected.
inline u128 norm_of(const Factorization& f, const NormSpectrum& s) {
  u128 result = 1;
  const u128 cap = ~u128(0);
  for (auto [id, exp] : f.terms) {
    u128 base = s.slot_norm(id);  // throws on unknown id
    for (u64 i = 0; i < exp; ++i) {
      if (result > cap / base) throw std::overflow_error("norm_of: value exceeds 128-bit range");
      result *= base;
    }
  }
  return result;
}

inline u64 big_omega(const Factorization& f) {
  u64 total = 0;
  for (auto& [id, exp] : f.terms) total += exp;
  return total;
}

inline u64 small_omega(const Factorization& f) { return f.terms.size(); }

inline void check_h(unsigned h) {
  if (h < 2) throw std::invalid_argument("h must be >= 2");
}

inline bool is_h_free(const Factorization& f, unsigned h) {
  check_h(h);
  for (auto& [id, exp] : f.terms)
    if (exp > h - 1) return false;
  return true;
}

inline bool is_h_full(const Factorization& f, unsigned h) {
  check_h(h);
  for (auto& [id, exp] : f.terms)
    if (exp < h) return false;
  return true;
}

}  // namespace momo

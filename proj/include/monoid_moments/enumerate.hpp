#pragma once

#include <cmath>
#include <cstring>
#include <utility>
#include <vector>

#include "monoid.hpp"

namespace momo {

enum class Family { h_free, h_full };

inline const char* family_name(Family f) { return f == Family::h_free ? "h_free" : "h_full"; }

// Which elements to count: an h-free or h-full family, optionally with some
// prime slots forced to multiplicity zero.
struct SetSelector {
  Family family;
  unsigned h;
  std::vector<u64> excluded_slots{};

  void validate(const NormSpectrum& s) const {
    check_h(h);
    for (std::size_t i = 0; i < excluded_slots.size(); ++i) {
      if (excluded_slots[i] >= s.slot_count()) throw std::invalid_argument("selector: excluded slot does not exist");
      for (std::size_t j = i + 1; j < excluded_slots.size(); ++j)
        if (excluded_slots[i] == excluded_slots[j]) throw std::invalid_argument("selector: duplicate excluded slot");
    }
  }
};

struct MomentTally {
  u64 count = 0;
  u64 sum_omega = 0;
  u64 sum_omega_sq = 0;
  std::vector<u64> histogram;  // histogram[k] = #elements with Omega == k

  void add(u64 omega, u64 multiplicity = 1) {
    count += multiplicity;
    sum_omega += multiplicity * omega;
    sum_omega_sq += multiplicity * omega * omega;
    if (histogram.size() <= omega) histogram.resize(omega + 1, 0);
    histogram[omega] += multiplicity;
  }

  void merge(const MomentTally& other) {
    count += other.count;
    sum_omega += other.sum_omega;
    sum_omega_sq += other.sum_omega_sq;
    if (histogram.size() < other.histogram.size()) histogram.resize(other.histogram.size(), 0);
    for (std::size_t k = 0; k < other.histogram.size(); ++k) histogram[k] += other.histogram[k];
  }

  bool operator==(const MomentTally&) const = default;
};

namespace detail {

enum class EnumFamily { all, h_free, h_full };

// (group index, slots removed from it) — at most a handful of entries.
using GroupExclusions = std::vector<std::pair<std::size_t, u64>>;

inline GroupExclusions to_group_exclusions(const NormSpectrum& s, const std::vector<u64>& slot_ids) {
  GroupExclusions out;
  for (u64 id : slot_ids) {
    std::size_t g = s.group_of_slot(id);
    bool found = false;
    for (auto& [gg, n] : out)
      if (gg == g) {
        ++n;
        found = true;
      }
    if (!found) out.emplace_back(g, 1);
  }
  return out;
}

// Visits every element of the selected family with norm <= x as
// (norm, Omega, multiplicity). Slots of equal norm are interchangeable for all
// statistics here, so elements are enumerated as exponent tuples over a
// prefix of each group's available slots; the multiplicity weight counts the
// binomial number of ways to place that tuple on distinct slots. Weights are
// exact: the running product stays an integer at every step.
template <class Visit>
class Enumerator {
 public:
  Enumerator(const NormSpectrum& s, u64 x, EnumFamily fam, unsigned h, const GroupExclusions& excl, Visit& visit)
      : s_(s), x_(x), fam_(fam), h_(h), excl_(excl), visit_(visit), groups_(s.group_count()) {}

  void run() {
    if (x_ < 1) return;
    rec(0, avail(0), 1, 0, 1);
  }

 private:
  u64 avail(std::size_t g) const {
    if (g >= groups_) return 0;
    u64 c = s_.group_size(g);
    for (auto& [gg, n] : excl_)
      if (gg == g) c -= n;
    return c;
  }

  void rec(std::size_t g0, u64 avail0, u64 val, u64 om, u64 weight) {
    visit_(val, om, weight);
    for (std::size_t g = g0; g < groups_; ++g) {
      const u64 av = (g == g0) ? avail0 : avail(g);
      if (av == 0) continue;
      const u64 norm = s_.group_norm(g);
      const unsigned e0 = (fam_ == EnumFamily::h_full) ? h_ : 1;
      u64 v = val;
      bool fits = true;
      for (unsigned i = 0; i < e0; ++i) {
        if (v > x_ / norm) {
          fits = false;
          break;
        }
        v *= norm;
      }
      if (!fits) break;  // groups are sorted by norm
      // using the i-th slot of a group with c available multiplies the weight
      // by C(c,i)/C(c,i-1) = (c-i+1)/i; the division is exact at each step
      const u64 used_index = avail(g) - av + 1;
      const u64 w = u64(u128(weight) * av / used_index);
      unsigned e = e0;
      for (;;) {
        rec(g, av - 1, v, om + e, w);
        if (fam_ == EnumFamily::h_free && e == h_ - 1) break;
        if (v > x_ / norm) break;
        v *= norm;
        ++e;
      }
    }
  }

  const NormSpectrum& s_;
  const u64 x_;
  const EnumFamily fam_;
  const unsigned h_;
  const GroupExclusions& excl_;
  Visit& visit_;
  const std::size_t groups_;
};

// Segmented trial-division sieve over [1,x] for the rational integers:
// emits (n, Omega(n)) for every h-free n. Keeps only O(segment) memory.
template <class Visit>
void sieve_hfree_integers(const NormSpectrum& s, u64 x, unsigned h, Visit&& visit) {
  std::vector<u64> small_primes;
  const u64 root = floor_kth_root(x, 2);
  for (std::size_t g = 0; g < s.groups_upto(root); ++g) small_primes.push_back(s.group_norm(g));

  const u64 seg_size = u64(1) << 20;
  std::vector<u64> rem(seg_size);
  std::vector<unsigned char> om(seg_size), bad(seg_size);

  for (u64 lo = 1; lo <= x; lo += seg_size) {
    const u64 hi = std::min(x, lo + seg_size - 1);
    const u64 n = hi - lo + 1;
    for (u64 i = 0; i < n; ++i) rem[i] = lo + i;
    std::memset(om.data(), 0, n);
    std::memset(bad.data(), 0, n);
    for (u64 p : small_primes) {
      for (u64 m = ((lo + p - 1) / p) * p; m <= hi; m += p) {
        u64 i = m - lo;
        unsigned e = 0;
        while (rem[i] % p == 0) {
          rem[i] /= p;
          ++e;
        }
        om[i] += static_cast<unsigned char>(e);
        if (e > h - 1) bad[i] = 1;
      }
    }
    for (u64 i = 0; i < n; ++i) {
      if (bad[i]) continue;
      visit(lo + i, u64(om[i]) + (rem[i] > 1 ? 1 : 0), u64(1));
    }
  }
}

constexpr u64 kSieveFastPathMin = u64(1) << 18;

// Visits each selected element once as (norm, Omega). The sieve fast path and
// the recursive path must agree exactly; force_recursive pins the latter.
template <class Visit>
void for_each_selected(const NormSpectrum& s, u64 x, EnumFamily fam, unsigned h, const GroupExclusions& excl,
                       Visit&& visit, bool force_recursive = false) {
  if (!force_recursive && fam == EnumFamily::h_free && s.kind() == SpectrumKind::integers && excl.empty() &&
      x >= kSieveFastPathMin) {
    sieve_hfree_integers(s, x, h, visit);
    return;
  }
  Enumerator<Visit> e(s, x, fam, h, excl, visit);
  e.run();
}

inline EnumFamily to_enum_family(Family f) { return f == Family::h_free ? EnumFamily::h_free : EnumFamily::h_full; }

// Spectrum completeness needed to enumerate the family up to x: h-full
// elements only involve primes with norm^h <= x.
inline u64 required_bound(u64 x, EnumFamily fam, unsigned h) {
  return fam == EnumFamily::h_full ? floor_kth_root(x, h) : x;
}

inline u64 count_selected_impl(const NormSpectrum& s, u64 x, EnumFamily fam, unsigned h, const GroupExclusions& excl) {
  u64 count = 0;
  for_each_selected(s, x, fam, h, excl, [&](u64, u64, u64 w) { count += w; });
  return count;
}

}  // namespace detail

inline void check_x(u64 x) {
  if (x < 1) throw std::invalid_argument("x must be >= 1");
}

// Exact number of elements with norm <= x, identity included.
inline u64 count_all(const NormSpectrum& s, u64 x) {
  check_x(x);
  s.require_complete(x);
  if (s.kind() == SpectrumKind::integers) return x;  // M(x) = floor(x) for N
  return detail::count_selected_impl(s, x, detail::EnumFamily::all, 2, {});
}

inline u64 count_all_recursive(const NormSpectrum& s, u64 x) {  // shortcut-free route, for cross-checks
  check_x(x);
  s.require_complete(x);
  return detail::count_selected_impl(s, x, detail::EnumFamily::all, 2, {});
}

inline u64 count_selected(const NormSpectrum& s, u64 x, const SetSelector& sel) {
  check_x(x);
  sel.validate(s);
  auto fam = detail::to_enum_family(sel.family);
  s.require_complete(detail::required_bound(x, fam, sel.h));
  return detail::count_selected_impl(s, x, fam, sel.h, detail::to_group_exclusions(s, sel.excluded_slots));
}

inline MomentTally tally_selected(const NormSpectrum& s, u64 x, const SetSelector& sel, bool force_recursive = false) {
  check_x(x);
  sel.validate(s);
  if (!sel.excluded_slots.empty()) throw std::invalid_argument("tally_selected: excluded_slots must be empty");
  auto fam = detail::to_enum_family(sel.family);
  s.require_complete(detail::required_bound(x, fam, sel.h));
  MomentTally t;
  detail::for_each_selected(s, x, fam, sel.h, {}, [&](u64, u64 om, u64 w) { t.add(om, w); }, force_recursive);
  return t;
}

// The proofs' prime-decomposition route to the moments: every occurrence
// m = k*p + y with n_p(y) = 0 is counted via restricted counts at x/N(p)^k.
// Order 1 gives sum Omega, order 2 adds the k^2 diagonal and the ordered
// two-prime k*l sum; both must equal the direct tally exactly.
inline u64 decomposition_moment(const NormSpectrum& s, u64 x, const SetSelector& sel, int order) {
  check_x(x);
  sel.validate(s);
  if (!sel.excluded_slots.empty()) throw std::invalid_argument("decomposition_moment: excluded_slots must be empty");
  if (order != 1 && order != 2) throw std::invalid_argument("decomposition_moment: order must be 1 or 2");
  auto fam = detail::to_enum_family(sel.family);
  const unsigned h = sel.h;
  s.require_complete(detail::required_bound(x, fam, sel.h));

  const unsigned e0 = (fam == detail::EnumFamily::h_full) ? h : 1;
  auto k_hi = [&](u64 norm) -> unsigned {
    unsigned km = floor_log(norm, x);
    if (fam == detail::EnumFamily::h_free) km = std::min(km, h - 1);
    return km;
  };

  u64 total = 0;
  const std::size_t G = s.group_count();
  for (std::size_t g = 0; g < G; ++g) {
    const u64 norm = s.group_norm(g);
    if (ipow_capped(norm, e0, x) > x) break;
    const u64 c = s.group_size(g);
    detail::GroupExclusions excl{{g, 1}};
    u64 pk = 1;
    for (unsigned k = 1; k <= k_hi(norm); ++k) {
      pk *= norm;
      if (k < e0) continue;
      const u64 cnt = detail::count_selected_impl(s, x / pk, fam, h, excl);
      const u64 weight = (order == 1) ? u64(k) : u64(k) * u64(k);
      total += weight * c * cnt;
    }
  }
  if (order == 1) return total;

  // ordered pairs of distinct primes, grouped by norm
  for (std::size_t g1 = 0; g1 < G; ++g1) {
    const u64 n1 = s.group_norm(g1);
    const u64 base1 = ipow_capped(n1, e0, x);
    if (base1 > x) break;
    const u64 c1 = s.group_size(g1);
    for (std::size_t g2 = g1; g2 < G; ++g2) {
      const u64 n2 = s.group_norm(g2);
      const u64 base2 = ipow_capped(n2, e0, x / base1);
      if (base1 > x / base2) break;
      const u64 c2 = s.group_size(g2);
      const u64 ordered_pairs = (g1 == g2) ? c1 * (c1 - 1) : 2 * c1 * c2;
      if (ordered_pairs == 0) continue;
      detail::GroupExclusions excl;
      if (g1 == g2)
        excl = {{g1, 2}};
      else
        excl = {{g1, 1}, {g2, 1}};
      u64 pk = base1;
      unsigned k = e0;
      for (;;) {
        u64 pl = base2;
        unsigned l = e0;
        while (pk <= x / pl) {
          const u64 cnt = detail::count_selected_impl(s, x / (pk * pl), fam, h, excl);
          total += ordered_pairs * u64(k) * u64(l) * cnt;
          if (fam == detail::EnumFamily::h_free && l == h - 1) break;
          if (pl > x / n2) break;
          pl *= n2;
          ++l;
        }
        if (fam == detail::EnumFamily::h_free && k == h - 1) break;
        if (pk > x / n1) break;
        pk *= n1;
        ++k;
      }
    }
  }
  return total;
}

struct ExceptionCount {
  u64 exceptions = 0;
  u64 eligible = 0;
  double fraction() const { return eligible == 0 ? 0.0 : double(exceptions) / double(eligible); }
};

// Normal-order check: among family elements with norm > 16 (> e^e), count
// those with Omega outside [(1-eps)F, (1+eps)F], F = loglog N (h-free) or
// h loglog N (h-full).
inline ExceptionCount normal_order_exceptions(const NormSpectrum& s, u64 x, const SetSelector& sel, double epsilon) {
  check_x(x);
  sel.validate(s);
  if (!(epsilon > 0.0)) throw std::invalid_argument("normal_order_exceptions: epsilon must be > 0");
  auto fam = detail::to_enum_family(sel.family);
  s.require_complete(detail::required_bound(x, fam, sel.h));
  const double hfac = (sel.family == Family::h_full) ? double(sel.h) : 1.0;
  ExceptionCount out;
  detail::for_each_selected(s, x, fam, sel.h, detail::to_group_exclusions(s, sel.excluded_slots),
                            [&](u64 norm, u64 om, u64 w) {
                              if (norm <= 16) return;
                              out.eligible += w;
                              const double F = hfac * std::log(std::log(double(norm)));
                              const double v = double(om);
                              if (v < (1.0 - epsilon) * F || v > (1.0 + epsilon) * F) out.exceptions += w;
                            });
  return out;
}

// Pi(x): number of prime slots with norm <= x.
inline u64 prime_count(const NormSpectrum& s, u64 x) {
  check_x(x);
  s.require_complete(x);
  return s.slots_upto(x);
}

enum class PrimeSumKind { mertens, recip_power, log_weighted, loglog_weighted, double_recip, log_sq_weighted };

// Empirical prime-element sums behind the second-section lemmas. Log-weighted
// kinds sum over N(p) <= x/2 (rational X) or <= x/q (q-power X), exactly as in
// the lemma statements; mertens/recip_power go up to x, double_recip over
// ordered pairs with N(p)N(q) <= x.
inline double prime_sum(const NormSpectrum& s, u64 x, PrimeSumKind kind, double alpha = 0.0) {
  check_x(x);
  s.require_complete(x);
  const double xd = double(x);
  auto log_cutoff = [&]() -> u64 {
    if (s.params().x_mode == XMode::q_power) return x / s.params().q;
    return x / 2;
  };
  double sum = 0.0;
  switch (kind) {
    case PrimeSumKind::mertens: {
      for (std::size_t g = 0; g < s.groups_upto(x); ++g) sum += double(s.group_size(g)) / double(s.group_norm(g));
      return sum;
    }
    case PrimeSumKind::recip_power: {
      for (std::size_t g = 0; g < s.groups_upto(x); ++g)
        sum += double(s.group_size(g)) * std::pow(double(s.group_norm(g)), -alpha);
      return sum;
    }
    case PrimeSumKind::log_weighted: {
      for (std::size_t g = 0; g < s.groups_upto(log_cutoff()); ++g) {
        const double n = double(s.group_norm(g));
        sum += double(s.group_size(g)) / (n * std::log(xd / n));
      }
      return sum;
    }
    case PrimeSumKind::loglog_weighted: {
      for (std::size_t g = 0; g < s.groups_upto(log_cutoff()); ++g) {
        const double n = double(s.group_norm(g));
        sum += double(s.group_size(g)) / n * std::log(std::log(xd / n));
      }
      return sum;
    }
    case PrimeSumKind::log_sq_weighted: {
      for (std::size_t g = 0; g < s.groups_upto(log_cutoff()); ++g) {
        const double n = double(s.group_norm(g));
        const double l = std::log(xd / n);
        sum += double(s.group_size(g)) / (n * l * l);
      }
      return sum;
    }
    case PrimeSumKind::double_recip: {
      const std::size_t G = s.groups_upto(x);
      std::vector<double> prefix(G + 1, 0.0);  // prefix[k] = sum_{g<k} c_g/n_g
      for (std::size_t g = 0; g < G; ++g) prefix[g + 1] = prefix[g] + double(s.group_size(g)) / double(s.group_norm(g));
      for (std::size_t g = 0; g < G; ++g) {
        const u64 n = s.group_norm(g);
        const u64 partner_max = x / n;
        if (partner_max < 2) break;
        const std::size_t k = s.groups_upto(partner_max);
        if (k == 0) continue;
        sum += double(s.group_size(g)) / double(n) * prefix[std::min(k, G)];
      }
      return sum;
    }
  }
  throw std::logic_error("prime_sum: unknown kind");
}

}  // namespace momo

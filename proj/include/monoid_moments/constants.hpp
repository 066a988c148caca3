#pragma once

#include <cmath>
#include <string>

#include "monoid.hpp"

namespace momo {

inline constexpr double kEulerGamma = 0.5772156649015328606065120900824024;
inline constexpr double kPi = 3.1415926535897932384626433832795029;

enum class TailKind { integral, dyadic_drift, exact };

inline const char* tail_kind_name(TailKind k) {
  switch (k) {
    case TailKind::integral: return "integral";
    case TailKind::dyadic_drift: return "dyadic-drift";
    case TailKind::exact: return "exact";
  }
  return "?";
}

// A truncated Euler product or prime sum: the partial value at truncation norm
// P plus an estimate of what the tail beyond P can still contribute. Integral
// tails are rigorous comparisons against sum_{n>P} n^{-beta}; dyadic drift is
// a reported heuristic for spectra whose prime density is only conjectural.
struct EulerValue {
  double value = 0.0;
  u64 truncation_norm = 0;
  double tail_estimate = 0.0;
  u64 term_count = 0;
  TailKind tail_kind = TailKind::exact;
};

namespace detail {

// sum_{n > P} n^{-beta} <= P^(1-beta)/(beta-1) + P^(-beta), beta > 1.
inline double integer_tail(double beta, u64 P) {
  const double p = double(P);
  return std::pow(p, 1.0 - beta) / (beta - 1.0) + std::pow(p, -beta);
}

// Generic accumulation of sum_{norm <= P} count * term(norm).
// envelope_c * n^{-beta} must bound |term| for all n >= 2; it powers the
// rigorous tail for the integer spectrum. Other kinds report the last
// dyadic block's contribution as a drift heuristic (or an exact zero tail
// when the synthetic spectrum is already fully inside P).
template <class Term>
EulerValue prime_sum_value(const NormSpectrum& s, u64 P, Term&& term, double beta, double envelope_c) {
  EulerValue out;
  out.truncation_norm = P;
  double sum = 0.0, half_block = 0.0;
  const std::size_t G = s.groups_upto(P);
  for (std::size_t g = 0; g < G; ++g) {
    const u64 n = s.group_norm(g);
    const double t = double(s.group_size(g)) * term(double(n));
    sum += t;
    if (n > P / 2) half_block += t;
    ++out.term_count;
  }
  out.value = sum;
  if (s.kind() == SpectrumKind::integers) {
    out.tail_kind = TailKind::integral;
    out.tail_estimate = envelope_c * integer_tail(beta, P);
  } else if (s.kind() == SpectrumKind::synthetic && P >= s.max_norm()) {
    out.tail_kind = TailKind::exact;
    out.tail_estimate = 0.0;
  } else {
    out.tail_kind = TailKind::dyadic_drift;
    out.tail_estimate = std::abs(half_block);
  }
  return out;
}

// Same, but a product over factors 1 + term(norm); the tail bound scales the
// value by exp of the remaining log-sum.
template <class Term>
EulerValue euler_product_value(const NormSpectrum& s, u64 P, Term&& term, double beta, double envelope_c) {
  EulerValue out;
  out.truncation_norm = P;
  double log_sum = 0.0, half_block = 0.0;
  const std::size_t G = s.groups_upto(P);
  for (std::size_t g = 0; g < G; ++g) {
    const u64 n = s.group_norm(g);
    const double lf = double(s.group_size(g)) * std::log1p(term(double(n)));
    log_sum += lf;
    if (n > P / 2) half_block += lf;
    ++out.term_count;
  }
  out.value = std::exp(log_sum);
  if (s.kind() == SpectrumKind::integers) {
    out.tail_kind = TailKind::integral;
    out.tail_estimate = out.value * std::expm1(envelope_c * integer_tail(beta, P));
  } else if (s.kind() == SpectrumKind::synthetic && P >= s.max_norm()) {
    out.tail_kind = TailKind::exact;
    out.tail_estimate = 0.0;
  } else {
    out.tail_kind = TailKind::dyadic_drift;
    out.tail_estimate = out.value * std::expm1(std::abs(half_block));
  }
  return out;
}

inline void check_truncation(const NormSpectrum& s, u64 P) {
  if (P < 2) throw std::invalid_argument("truncation norm P must be >= 2");
  s.require_complete(P);
}

}  // namespace detail

// zeta_M(s) = prod_{N(p) <= P} (1 - N(p)^{-s})^{-1}, s > 1.
inline EulerValue zeta_M(double s_arg, const NormSpectrum& s, u64 P) {
  if (!(s_arg > 1.0)) throw std::domain_error("zeta_M diverges for s <= 1");
  detail::check_truncation(s, P);
  // -log(1 - n^-s) <= n^-s / (1 - 2^-s)
  const double c = 1.0 / (1.0 - std::pow(2.0, -s_arg));
  return detail::euler_product_value(
      s, P, [&](double n) { return 1.0 / (std::pow(n, s_arg) - 1.0); }, s_arg, c);
}

// gamma_h = prod_p (1 + (N(p) - N(p)^{1/h}) / (N(p)^2 (N(p)^{1/h} - 1))).
inline EulerValue gamma_h(unsigned h, const NormSpectrum& s, u64 P) {
  check_h(h);
  detail::check_truncation(s, P);
  const double inv_h = 1.0 / double(h);
  // factor - 1 <= n^{-1-1/h} / (1 - 2^{-1/h})
  const double c = 1.0 / (1.0 - std::pow(2.0, -inv_h));
  return detail::euler_product_value(
      s, P,
      [&](double n) {
        const double r = std::pow(n, inv_h);
        return (n - r) / (n * n * (r - 1.0));
      },
      1.0 + inv_h, c);
}

// Generalized Mertens constant: lim (sum 1/N(p) - loglog x). For the rational
// integers the rapidly convergent closed form gamma + sum_p (log(1-1/p) + 1/p)
// is used; otherwise the partial value at P is reported with its drift.
inline EulerValue mertens_A(const NormSpectrum& s, u64 P) {
  detail::check_truncation(s, P);
  EulerValue out;
  out.truncation_norm = P;
  if (s.kind() == SpectrumKind::integers) {
    double sum = 0.0;
    const std::size_t G = s.groups_upto(P);
    for (std::size_t g = 0; g < G; ++g) {
      const double p = double(s.group_norm(g));
      sum += std::log1p(-1.0 / p) + 1.0 / p;
      ++out.term_count;
    }
    out.value = kEulerGamma + sum;
    out.tail_kind = TailKind::integral;
    out.tail_estimate = detail::integer_tail(2.0, P);  // |log(1-1/p)+1/p| <= p^-2
    return out;
  }
  double sum = 0.0, sum_half = 0.0;
  const std::size_t G = s.groups_upto(P);
  for (std::size_t g = 0; g < G; ++g) {
    const double t = double(s.group_size(g)) / double(s.group_norm(g));
    sum += t;
    if (s.group_norm(g) <= P / 2) sum_half += t;
    ++out.term_count;
  }
  out.value = sum - std::log(std::log(double(P)));
  // convergence is only O(1/log P) here, so report the last dyadic block's
  // drift rather than a rigorous bound
  out.tail_kind = TailKind::dyadic_drift;
  out.tail_estimate = std::abs(out.value - (sum_half - std::log(std::log(double(P) / 2.0))));
  return out;
}

// B: -pi^2/6 over Q, (loglog q)^2 - pi^2/6 over {q^z}.
inline double B_const(const MonoidParams& params) {
  params.validate();
  if (params.x_mode == XMode::rational) return -kPi * kPi / 6.0;
  const double ll = std::log(std::log(double(params.q)));
  return ll * ll - kPi * kPi / 6.0;
}

// C3 = A + sum_p (N^h - h N^2 + h N - 1) / (N (N-1) (N^h - 1)).
inline EulerValue c3(unsigned h, const NormSpectrum& s, u64 P, const EulerValue& A) {
  check_h(h);
  detail::check_truncation(s, P);
  const double hd = double(h);
  auto out = detail::prime_sum_value(
      s, P,
      [&](double n) {
        const double nh = std::pow(n, hd);
        return (nh - hd * n * n + hd * n - 1.0) / (n * (n - 1.0) * (nh - 1.0));
      },
      2.0, 4.0 * hd + 4.0);
  out.value += A.value;
  out.tail_estimate += A.tail_estimate;
  return out;
}

// C3' = A + sum_p [N^h(3N-1) + (N-1)^2 - N(h^2 N^2 + (-2h^2+2h+1)N + (h-1)^2)]
//               / (N (N-1)^2 (N^h - 1)).
inline EulerValue c3_prime(unsigned h, const NormSpectrum& s, u64 P, const EulerValue& A) {
  check_h(h);
  detail::check_truncation(s, P);
  const double hd = double(h);
  auto out = detail::prime_sum_value(
      s, P,
      [&](double n) {
        const double nh = std::pow(n, hd);
        const double num = nh * (3.0 * n - 1.0) + (n - 1.0) * (n - 1.0) -
                           n * (hd * hd * n * n + (-2.0 * hd * hd + 2.0 * hd + 1.0) * n + (hd - 1.0) * (hd - 1.0));
        return num / (n * (n - 1.0) * (n - 1.0) * (nh - 1.0));
      },
      2.0, 32.0 * hd * hd + 32.0 * hd + 48.0);
  out.value += A.value;
  out.tail_estimate += A.tail_estimate;
  return out;
}

// The squared prime sum subtracted inside C4.
inline EulerValue c4_subtracted_sum(unsigned h, const NormSpectrum& s, u64 P) {
  check_h(h);
  detail::check_truncation(s, P);
  const double hd = double(h);
  return detail::prime_sum_value(
      s, P,
      [&](double n) {
        const double nh = std::pow(n, hd);
        const double t = (nh - hd * n + hd - 1.0) / ((n - 1.0) * (nh - 1.0));
        return t * t;
      },
      2.0, 16.0);
}

// C4 = C3^2 + C3' + B - sum_p ((N^h - hN + h - 1)/((N-1)(N^h - 1)))^2.
inline EulerValue c4(unsigned h, const EulerValue& C3, const EulerValue& C3p, double B, const NormSpectrum& s, u64 P) {
  auto sub = c4_subtracted_sum(h, s, P);
  EulerValue out;
  out.value = C3.value * C3.value + C3p.value + B - sub.value;
  out.truncation_norm = P;
  out.term_count = sub.term_count;
  out.tail_kind = sub.tail_kind;
  out.tail_estimate = (2.0 * std::abs(C3.value) + C3.tail_estimate) * C3.tail_estimate + C3p.tail_estimate + sub.tail_estimate;
  return out;
}

// D3 = h(A - log h) + sum_p [h(N - N^{1-1/h} - N^{1/h} + 1) + N]
//                         / [N (N^{1/h} - 1)(N - N^{1-1/h} + 1)].
inline EulerValue d3(unsigned h, const NormSpectrum& s, u64 P, const EulerValue& A) {
  check_h(h);
  detail::check_truncation(s, P);
  const double hd = double(h);
  const double inv_h = 1.0 / hd;
  const double q2 = 1.0 - std::pow(2.0, -inv_h);
  auto out = detail::prime_sum_value(
      s, P,
      [&](double n) {
        const double r = std::pow(n, inv_h);       // N^{1/h}
        const double rc = n / r;                   // N^{1-1/h}
        const double num = hd * (n - rc - r + 1.0) + n;
        return num / (n * (r - 1.0) * (n - rc + 1.0));
      },
      1.0 + inv_h, (hd + 1.0) / (q2 * q2));
  out.value += hd * (A.value - std::log(hd));
  out.tail_estimate += hd * A.tail_estimate;
  return out;
}

// D3' = h^2(A - log h) + sum_p [(2h^2+2h-1)N^{(1+h)/h} - (1+h)^2 N^{(2+h)/h}
//        - h^2 (N - N^{1/h} + 2N^{2/h} - N^{3/h})]
//        / [N (-N^{(1+h)/h} - N^{1/h} + N)(N^{1/h} - 1)^2].
inline EulerValue d3_prime(unsigned h, const NormSpectrum& s, u64 P, const EulerValue& A) {
  check_h(h);
  detail::check_truncation(s, P);
  const double hd = double(h);
  const double inv_h = 1.0 / hd;
  const double q2 = 1.0 - std::pow(2.0, -inv_h);
  auto out = detail::prime_sum_value(
      s, P,
      [&](double n) {
        const double r = std::pow(n, inv_h);
        const double num = (2.0 * hd * hd + 2.0 * hd - 1.0) * std::pow(n, (1.0 + hd) / hd) -
                           (1.0 + hd) * (1.0 + hd) * std::pow(n, (2.0 + hd) / hd) -
                           hd * hd * (n - r + 2.0 * r * r - r * r * r);
        const double den = n * (-std::pow(n, (1.0 + hd) / hd) - r + n) * (r - 1.0) * (r - 1.0);
        return num / den;
      },
      1.0 + inv_h, (5.0 * hd * hd + 4.0 * hd) / (q2 * q2 * q2));
  out.value += hd * hd * (A.value - std::log(hd));
  out.tail_estimate += hd * hd * A.tail_estimate;
  return out;
}

// The squared prime sum subtracted inside D4.
inline EulerValue d4_subtracted_sum(unsigned h, const NormSpectrum& s, u64 P) {
  check_h(h);
  detail::check_truncation(s, P);
  const double hd = double(h);
  const double inv_h = 1.0 / hd;
  const double q2 = 1.0 - std::pow(2.0, -inv_h);
  const double root_c = hd / q2 + 1.0 / (q2 * q2);
  return detail::prime_sum_value(
      s, P,
      [&](double n) {
        const double r = std::pow(n, inv_h);
        const double t = (hd * (r - 1.0) + 1.0) / ((r - 1.0) * (n - n / r + 1.0));
        return t * t;
      },
      2.0, root_c * root_c);
}

// D4 = D3^2 + D3' + h^2 B - sum_p ((h(N^{1/h}-1)+1)/((N^{1/h}-1)(N - N^{1-1/h} + 1)))^2.
inline EulerValue d4(unsigned h, const EulerValue& D3, const EulerValue& D3p, double B, const NormSpectrum& s, u64 P) {
  auto sub = d4_subtracted_sum(h, s, P);
  EulerValue out;
  out.value = D3.value * D3.value + D3p.value + double(h) * double(h) * B - sub.value;
  out.truncation_norm = P;
  out.term_count = sub.term_count;
  out.tail_kind = sub.tail_kind;
  out.tail_estimate = (2.0 * std::abs(D3.value) + D3.tail_estimate) * D3.tail_estimate + D3p.tail_estimate + sub.tail_estimate;
  return out;
}

namespace detail {

// Tail sums from index m, arranged so every bracket term is positive for
// 0 < a < 1; the raw textbook numerators cancel to ~eps/(1-a)^3 near a = 1.
//   sum_{k=m}^inf k   a^k = a^m [m(1-a) + a] / (1-a)^2
//   sum_{k=m}^inf k^2 a^k = a^m [m^2(1-a)^2 + a(2m-1)(1-a) + 2a] / (1-a)^3
inline long double geom_tail_k(long double a, long double m) {
  const long double one = 1.0L - a;
  return std::pow(a, m) * (m * one + a) / (one * one);
}

inline long double geom_tail_k2(long double a, long double m) {
  const long double one = 1.0L - a;
  return std::pow(a, m) * (m * m * one * one + a * (2.0L * m - 1.0L) * one + 2.0L * a) / (one * one * one);
}

inline long double geom_sum_k_ext(double a, unsigned h, long long r) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("geom_sum_k: a must be in (0,1)");
  check_h(h);
  if (r < (long long)h) return 0.0L;
  return geom_tail_k(a, (long double)h) - geom_tail_k(a, (long double)r + 1.0L);
}

inline long double geom_sum_k2_ext(double a, unsigned h, long long r) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("geom_sum_k2: a must be in (0,1)");
  check_h(h);
  if (r < (long long)h) return 0.0L;
  return geom_tail_k2(a, (long double)h) - geom_tail_k2(a, (long double)r + 1.0L);
}

}  // namespace detail

// Closed form of sum_{k=h}^{r} k a^k for 0 < a < 1:
//   h a^h/(1-a) + a^{h+1}/(1-a)^2 + a^{r+1}(a r - r - 1)/(1-a)^2.
inline double geom_sum_k(double a, unsigned h, long long r) { return double(detail::geom_sum_k_ext(a, h, r)); }

// Closed form of sum_{k=h}^{r} k^2 a^k:
//   [h^2 a^h + (-2h^2+2h+1) a^{h+1} + (h-1)^2 a^{h+2}
//    + a^{r+1}(a^2 r^2 + (-2r^2-2r+1)a + (r+1)^2)] / (1-a)^3, sign folded.
inline double geom_sum_k2(double a, unsigned h, long long r) { return double(detail::geom_sum_k2_ext(a, h, r)); }

// Every constant of the moment theorems for one (spectrum, h, P).
struct ConstantsBundle {
  unsigned h = 2;
  XMode x_mode = XMode::rational;
  u64 q = 0;
  u64 truncation_norm = 0;
  EulerValue A;
  double B = 0.0;
  EulerValue zeta_h;
  EulerValue gamma;
  EulerValue C3, C3p, C4;
  EulerValue D3, D3p, D4;

  static ConstantsBundle compute(const NormSpectrum& s, unsigned h, u64 P) {
    check_h(h);
    detail::check_truncation(s, P);
    ConstantsBundle b;
    b.h = h;
    b.x_mode = s.params().x_mode;
    b.q = s.params().q;
    b.truncation_norm = P;
    b.A = mertens_A(s, P);
    b.B = B_const(s.params());
    b.zeta_h = zeta_M(double(h), s, P);
    b.gamma = gamma_h(h, s, P);
    b.C3 = c3(h, s, P, b.A);
    b.C3p = c3_prime(h, s, P, b.A);
    b.C4 = c4(h, b.C3, b.C3p, b.B, s, P);
    b.D3 = d3(h, s, P, b.A);
    b.D3p = d3_prime(h, s, P, b.A);
    b.D4 = d4(h, b.D3, b.D3p, b.B, s, P);
    return b;
  }
};

}  // namespace momo

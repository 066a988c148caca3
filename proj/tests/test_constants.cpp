#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <monoid_moments/constants.hpp>

#include "oracles.hpp"

using namespace momo;

namespace {

const MonoidParams kRational{1.0, 0.0, XMode::rational, 0};

NormSpectrum single_prime_2() { return NormSpectrum::synthetic({{2, 1}}, kRational); }
NormSpectrum empty_spectrum() { return NormSpectrum::synthetic({}, kRational); }

}  // namespace

TEST_CASE("zeta_M truncations against independent series") {
  auto ints = NormSpectrum::integers(1000000);
  SECTION("s=2 at P=1e6 is within 1e-6 of pi^2/6") {
    auto z = zeta_M(2.0, ints, 1000000);
    REQUIRE(std::abs(z.value - kPi * kPi / 6.0) < 1e-6);
    REQUIRE(std::abs(z.value - oracle::zeta_series(2.0)) < 1e-6);
    REQUIRE(z.tail_kind == TailKind::integral);
    REQUIRE(std::abs(z.value - kPi * kPi / 6.0) <= z.tail_estimate);
  }
  SECTION("polynomial monoid: closed form 1/(1-q^(1-s))") {
    auto poly = NormSpectrum::monic_polynomials(2, 28);
    auto z2 = zeta_M(2.0, poly, poly.norm_bound());
    REQUIRE(std::abs(z2.value - 2.0) < 1e-9);
    auto z3 = zeta_M(3.0, poly, poly.norm_bound());
    REQUIRE(std::abs(z3.value - 4.0 / 3.0) < 1e-9);
  }
  SECTION("empty spectrum: empty product") {
    auto z = zeta_M(2.0, empty_spectrum(), 100);
    REQUIRE(z.value == 1.0);
    REQUIRE(z.tail_estimate == 0.0);
  }
  REQUIRE_THROWS_AS(zeta_M(1.0, ints, 100), std::domain_error);
  REQUIRE_THROWS_AS(zeta_M(2.0, ints, 10000000), std::domain_error);  // insufficient spectrum
}

TEST_CASE("gamma_h values") {
  auto ints = NormSpectrum::integers(1000000);
  SECTION("h=2: per-factor algebraic identity (p - sqrt p)/(p^2(sqrt p - 1)) = p^(-3/2)") {
    auto g = gamma_h(2, ints, 1000000);
    double log_simplified = 0.0;
    for (u64 id = 0; id < ints.slot_count(); ++id)
      log_simplified += std::log1p(std::pow(double(ints.slot_norm(id)), -1.5));
    REQUIRE(g.value == Catch::Approx(std::exp(log_simplified)).margin(1e-12));
    // against the independent zeta route: gamma_2 = zeta(3/2)/zeta(3)
    const double exact = oracle::zeta_series(1.5, 2000000) / oracle::zeta_series(3.0);
    REQUIRE(std::abs(g.value - exact) < 5e-4);
    REQUIRE(std::abs(g.value - exact) <= g.tail_estimate);
    REQUIRE(g.value == Catch::Approx(2.1729758339).margin(1e-9));  // frozen truncation value at P=1e6
  }
  SECTION("single prime of norm 2, h=2") {
    auto g = gamma_h(2, single_prime_2(), 4);
    REQUIRE(g.value == Catch::Approx(1.0 + std::pow(2.0, -1.5)).margin(1e-15));
    REQUIRE(g.value == Catch::Approx(1.3535533905932737).margin(1e-12));
    REQUIRE(g.tail_estimate == 0.0);  // synthetic spectrum fully inside P
  }
  SECTION("empty spectrum") { REQUIRE(gamma_h(2, empty_spectrum(), 10).value == 1.0); }
}

TEST_CASE("mertens constant") {
  auto ints = NormSpectrum::integers(1000000);
  auto A = mertens_A(ints, 1000000);
  REQUIRE(std::abs(A.value - 0.2615) < 5e-4);
  REQUIRE(std::abs(A.value - 0.2614972128476428) < 1e-6);  // literature value
  SECTION("single prime partial value at P=2") {
    auto a = mertens_A(single_prime_2(), 2);
    REQUIRE(a.value == Catch::Approx(0.5 - std::log(std::log(2.0))).margin(1e-14));
    REQUIRE(a.value == Catch::Approx(0.8665129205816644).margin(1e-12));
  }
  SECTION("polynomial monoid reports a drift, no asserted value") {
    auto poly = NormSpectrum::monic_polynomials(2, 20);
    auto a = mertens_A(poly, poly.norm_bound());
    REQUIRE(std::isfinite(a.value));
    REQUIRE(a.tail_kind == TailKind::dyadic_drift);
    REQUIRE(a.tail_estimate > 0.0);
  }
}

TEST_CASE("B constant for both X modes") {
  REQUIRE(B_const(kRational) == Catch::Approx(-1.6449340668482264).margin(1e-15));
  MonoidParams qp{1.0, 0.0, XMode::q_power, 2};
  const double ll2 = std::log(std::log(2.0));
  REQUIRE(B_const(qp) == Catch::Approx(ll2 * ll2 - kPi * kPi / 6.0).margin(1e-15));
  REQUIRE(B_const(qp) == Catch::Approx(-1.51059).margin(1e-3));
  MonoidParams bad{1.0, 0.0, XMode::q_power, 1};
  REQUIRE_THROWS(B_const(bad));
}

TEST_CASE("C3, C3', C4") {
  auto ints = NormSpectrum::integers(1000000);
  auto A = mertens_A(ints, 1000000);
  EulerValue zero{};  // A = 0 for the single-factor spot checks
  SECTION("single prime of norm 2, h=2: all three summands by hand") {
    auto sp = single_prime_2();
    REQUIRE(c3(2, sp, 4, zero).value == Catch::Approx(-1.0 / 6.0).margin(1e-15));
    REQUIRE(c3_prime(2, sp, 4, zero).value == Catch::Approx(-1.0 / 6.0).margin(1e-15));
    REQUIRE(c4_subtracted_sum(2, sp, 4).value == Catch::Approx(1.0 / 9.0).margin(1e-15));
  }
  SECTION("empty spectrum with A=0") {
    REQUIRE(c3(2, empty_spectrum(), 10, zero).value == 0.0);
    REQUIRE(c3_prime(2, empty_spectrum(), 10, zero).value == 0.0);
    auto v = c4(2, zero, zero, -kPi * kPi / 6.0, empty_spectrum(), 10);
    REQUIRE(v.value == Catch::Approx(-kPi * kPi / 6.0).margin(1e-15));
  }
  SECTION("h=2 simplified forms: c3 summand is -1/(p(p+1)), c4 sum term 1/(p+1)^2") {
    auto C3 = c3(2, ints, 1000000, A);
    double simplified = 0.0;
    for (u64 id = 0; id < ints.slot_count(); ++id) {
      const double p = double(ints.slot_norm(id));
      simplified -= 1.0 / (p * (p + 1.0));
    }
    REQUIRE(C3.value == Catch::Approx(A.value + simplified).margin(1e-9));
    auto C3p = c3_prime(2, ints, 1000000, A);
    REQUIRE(C3p.value == Catch::Approx(C3.value).margin(1e-12));  // h=2 coincidence of the two summands
    double sq = 0.0;
    for (u64 id = 0; id < ints.slot_count(); ++id) {
      const double p = double(ints.slot_norm(id));
      sq += 1.0 / ((p + 1.0) * (p + 1.0));
    }
    REQUIRE(c4_subtracted_sum(2, ints, 1000000).value == Catch::Approx(sq).margin(1e-9));
    auto C4 = c4(2, C3, C3p, B_const(kRational), ints, 1000000);
    REQUIRE(C4.value ==
            Catch::Approx(C3.value * C3.value + C3p.value + B_const(kRational) - sq).margin(1e-9));
    REQUIRE(C4.value == Catch::Approx(-1.9534197697660531).margin(1e-9));  // frozen truncation value
  }
}

TEST_CASE("D3, D3', D4") {
  auto ints = NormSpectrum::integers(1000000);
  auto A = mertens_A(ints, 1000000);
  EulerValue zero{};
  SECTION("empty spectrum: D3 reduces to h(A - log h)") {
    REQUIRE(d3(2, empty_spectrum(), 10, zero).value == Catch::Approx(-2.0 * std::log(2.0)).margin(1e-15));
  }
  SECTION("single prime of norm 2, h=2") {
    auto sp = single_prime_2();
    auto D3 = d3(2, sp, 4, zero);
    REQUIRE(D3.value == Catch::Approx(-2.0 * std::log(2.0) + 1.7836116248912235).margin(1e-12));
    auto D3p = d3_prime(2, sp, 4, zero);
    REQUIRE(D3p.value == Catch::Approx(-4.0 * std::log(2.0) + 15.485281374238557).margin(1e-12));
    REQUIRE(d4_subtracted_sum(2, sp, 4).value == Catch::Approx(7.748493678229559).margin(1e-12));
  }
  SECTION("d3 summand equals the proof-side form: [h(1-a)+a]/[p(1-a)(1-a+1/p)] - h/p") {
    auto probe = NormSpectrum::integers(10000);
    for (unsigned h : {2u, 3u, 5u}) {
      double alt = 0.0;
      for (u64 id = 0; id < probe.slot_count(); ++id) {
        const double p = double(probe.slot_norm(id));
        const double a = std::pow(p, -1.0 / double(h));
        const double hd = double(h);
        alt += (hd * (1.0 - a) + a) / (p * (1.0 - a) * (1.0 - a + 1.0 / p)) - hd / p;
      }
      auto D3 = d3(h, probe, 10000, zero);
      CAPTURE(h);
      REQUIRE(D3.value == Catch::Approx(double(h) * (0.0 - std::log(double(h))) + alt).margin(1e-9));
    }
  }
  SECTION("summand equals the proof-side form for every h: f(p) - h^2/p") {
    // f(p) = [h^2 + a(-2h^2+2h+1) + a^2 (h-1)^2] / [p (1-a)^2 (1-a+1/p)], a = p^(-1/h)
    auto probe = NormSpectrum::integers(10000);
    for (unsigned h : {2u, 3u, 5u}) {
      double alt = 0.0;
      for (u64 id = 0; id < probe.slot_count(); ++id) {
        const double p = double(probe.slot_norm(id));
        const double a = std::pow(p, -1.0 / double(h));
        const double hd = double(h);
        const double f = (hd * hd + a * (-2.0 * hd * hd + 2.0 * hd + 1.0) + a * a * (hd - 1.0) * (hd - 1.0)) /
                         (p * (1.0 - a) * (1.0 - a) * (1.0 - a + 1.0 / p));
        alt += f - hd * hd / p;
      }
      auto D3p = d3_prime(h, probe, 10000, zero);
      CAPTURE(h);
      REQUIRE(D3p.value == Catch::Approx(double(h) * double(h) * (0.0 - std::log(double(h))) + alt).margin(1e-9));
    }
  }
  SECTION("frozen integer values at P=1e6, h=2") {
    auto D3 = d3(2, ints, 1000000, A);
    auto D3p = d3_prime(2, ints, 1000000, A);
    auto D4 = d4(2, D3, D3p, B_const(kRational), ints, 1000000);
    REQUIRE(D3.value == Catch::Approx(2.8254380379548794).margin(1e-9));
    REQUIRE(D3p.value == Catch::Approx(23.335754558562655).margin(1e-9));
    REQUIRE(D4.value == Catch::Approx(13.74851547496242).margin(1e-9));
  }
}

TEST_CASE("bundle recomposition identities hold to 1e-12") {
  auto ints = NormSpectrum::integers(100000);
  for (unsigned h : {2u, 3u, 4u}) {
    auto b = ConstantsBundle::compute(ints, h, 100000);
    const double c4r = b.C3.value * b.C3.value + b.C3p.value + b.B - c4_subtracted_sum(h, ints, 100000).value;
    const double d4r = b.D3.value * b.D3.value + b.D3p.value + double(h) * double(h) * b.B -
                       d4_subtracted_sum(h, ints, 100000).value;
    CAPTURE(h);
    REQUIRE(std::abs(b.C4.value - c4r) <= 1e-12);
    REQUIRE(std::abs(b.D4.value - d4r) <= 1e-12);
  }
}

TEST_CASE("truncation behavior in P") {
  auto ints = NormSpectrum::integers(200000);
  auto A = mertens_A(ints, 100000);
  SECTION("products are monotone nondecreasing in P") {
    double prev_z = 0.0, prev_g = 0.0;
    for (u64 P : {1000ull, 10000ull, 100000ull}) {
      auto z = zeta_M(2.0, ints, P);
      auto g = gamma_h(2, ints, P);
      REQUIRE(z.value >= prev_z);
      REQUIRE(g.value >= prev_g);
      prev_z = z.value;
      prev_g = g.value;
    }
  }
  SECTION("doubling P moves the value by at most the tail estimate") {
    for (u64 P : {1000ull, 10000ull, 100000ull}) {
      CAPTURE(P);
      REQUIRE(std::abs(zeta_M(2.0, ints, 2 * P).value - zeta_M(2.0, ints, P).value) <= zeta_M(2.0, ints, P).tail_estimate);
      for (unsigned h : {2u, 3u}) {
        CAPTURE(h);
        REQUIRE(std::abs(gamma_h(h, ints, 2 * P).value - gamma_h(h, ints, P).value) <= gamma_h(h, ints, P).tail_estimate);
        REQUIRE(std::abs(c3(h, ints, 2 * P, A).value - c3(h, ints, P, A).value) <= c3(h, ints, P, A).tail_estimate);
        REQUIRE(std::abs(c3_prime(h, ints, 2 * P, A).value - c3_prime(h, ints, P, A).value) <=
                c3_prime(h, ints, P, A).tail_estimate);
        REQUIRE(std::abs(d3(h, ints, 2 * P, A).value - d3(h, ints, P, A).value) <= d3(h, ints, P, A).tail_estimate);
        REQUIRE(std::abs(d3_prime(h, ints, 2 * P, A).value - d3_prime(h, ints, P, A).value) <=
                d3_prime(h, ints, P, A).tail_estimate);
      }
    }
  }
}

TEST_CASE("geometric closed forms") {
  SECTION("worked values") {
    REQUIRE(geom_sum_k(0.5, 2, 4) == Catch::Approx(1.125).margin(1e-14));
    REQUIRE(geom_sum_k(0.3, 3, 3) == Catch::Approx(3.0 * 0.027).margin(1e-14));
    REQUIRE(geom_sum_k2(0.5, 2, 3) == Catch::Approx(2.125).margin(1e-14));
  }
  SECTION("empty range") {
    REQUIRE(geom_sum_k(0.5, 3, 2) == 0.0);
    REQUIRE(geom_sum_k2(0.9, 5, 4) == 0.0);
  }
  SECTION("domain errors") {
    REQUIRE_THROWS_AS(geom_sum_k(0.0, 2, 5), std::domain_error);
    REQUIRE_THROWS_AS(geom_sum_k(1.0, 2, 5), std::domain_error);
    REQUIRE_THROWS_AS(geom_sum_k2(-0.5, 2, 5), std::domain_error);
    REQUIRE_THROWS_AS(geom_sum_k2(1.5, 2, 5), std::domain_error);
  }
  SECTION("1000 randomized cases against direct summation") {
    std::mt19937_64 rng(123456);
    std::uniform_real_distribution<double> ua(0.01, 0.99);
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
      const double a = ua(rng);
      const unsigned h = 2 + unsigned(rng() % 9);
      const long long r = (long long)h + (long long)(rng() % 59);
      long double dk = 0.0L, dk2 = 0.0L;
      for (long long k = h; k <= r; ++k) {
        const long double t = std::pow((long double)a, (long double)k);
        dk += (long double)k * t;
        dk2 += (long double)k * (long double)k * t;
      }
      worst = std::max(worst, double(std::fabs(detail::geom_sum_k_ext(a, h, r) - dk)));
      worst = std::max(worst, double(std::fabs(detail::geom_sum_k2_ext(a, h, r) - dk2)));
      // the double-precision API wraps the same computation to within rounding
      REQUIRE(geom_sum_k(a, h, r) == Catch::Approx(double(dk)).epsilon(1e-13).margin(1e-12));
      REQUIRE(geom_sum_k2(a, h, r) == Catch::Approx(double(dk2)).epsilon(1e-13).margin(1e-12));
    }
    REQUIRE(worst <= 1e-12);
  }
  SECTION("a=0.9, h=2, r=50 matches direct summation tightly") {
    long double direct = 0.0L;
    for (int k = 2; k <= 50; ++k) direct += (long double)k * (long double)k * std::pow(0.9L, (long double)k);
    REQUIRE(std::abs(geom_sum_k2(0.9, 2, 50) - double(direct)) <= 1e-12);
  }
}

TEST_CASE("constants bundle on the empty synthetic monoid") {
  auto e = empty_spectrum();
  auto b = ConstantsBundle::compute(e, 2, 100);
  REQUIRE(b.zeta_h.value == 1.0);  // empty products
  REQUIRE(b.gamma.value == 1.0);
  REQUIRE(b.C3.value == b.A.value);  // empty prime sums
  REQUIRE(b.C3p.value == b.A.value);
  REQUIRE(b.D3.value == Catch::Approx(2.0 * (b.A.value - std::log(2.0))).margin(1e-15));
  REQUIRE(b.C4.value == Catch::Approx(b.C3.value * b.C3.value + b.C3p.value + b.B).margin(1e-15));
  REQUIRE(b.D4.value == Catch::Approx(b.D3.value * b.D3.value + b.D3p.value + 4.0 * b.B).margin(1e-15));
}

TEST_CASE("constants bundle on the polynomial monoid") {
  auto poly = NormSpectrum::monic_polynomials(2, 20);
  auto b = ConstantsBundle::compute(poly, 2, poly.norm_bound());
  REQUIRE(b.x_mode == XMode::q_power);
  const double ll2 = std::log(std::log(2.0));
  REQUIRE(b.B == Catch::Approx(ll2 * ll2 - kPi * kPi / 6.0).margin(1e-15));
  REQUIRE(std::abs(b.zeta_h.value - 2.0) < 1e-4);  // 1/(1 - 2^{1-2})
  REQUIRE(std::isfinite(b.D4.value));
  const double c4r = b.C3.value * b.C3.value + b.C3p.value + b.B - c4_subtracted_sum(2, poly, poly.norm_bound()).value;
  REQUIRE(std::abs(b.C4.value - c4r) <= 1e-12);
}

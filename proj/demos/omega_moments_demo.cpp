// Minimal library tour: build a spectrum, tally a family, compare against the
// theorem's main term, and check one exact identity.

#include <cstdio>

#include <monoid_moments/asymptotics.hpp>
#include <monoid_moments/constants.hpp>
#include <monoid_moments/enumerate.hpp>

using namespace momo;

int main() {
  // powerful numbers (2-full elements of the rational integers)
  auto ints = NormSpectrum::integers(1000000);
  auto bundle = ConstantsBundle::compute(ints, 2, 1000000);
  const SetSelector powerful{Family::h_full, 2, {}};

  std::printf("%12s %10s %14s %14s %12s\n", "x", "count", "sum Omega", "predicted", "normalized");
  for (u64 x : {u64(100000000), u64(1000000000), u64(10000000000)}) {
    const MomentTally t = tally_selected(ints, x, powerful);
    const Prediction p = predict(x, 2, Family::h_full, Moment::m1, bundle, ints.params());
    const Residual r = residual_report(t, p);
    std::printf("%12llu %10llu %14llu %14.1f %12.3f\n", (unsigned long long)x, (unsigned long long)t.count,
                (unsigned long long)t.sum_omega, p.main_value, r.normalized);
  }

  // the first moment also falls out of the prime-decomposition identity, exactly
  const u64 x = 100000;
  auto small = NormSpectrum::integers(x);
  const u64 direct = tally_selected(small, x, powerful).sum_omega;
  const u64 decomposed = decomposition_moment(small, x, powerful, 1);
  std::printf("\ndecomposition identity at x=%llu: %llu == %llu (%s)\n", (unsigned long long)x,
              (unsigned long long)direct, (unsigned long long)decomposed, direct == decomposed ? "ok" : "BROKEN");
  return direct == decomposed ? 0 : 1;
}

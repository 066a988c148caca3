#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <random>
#include <thread>

#include "report.hpp"

namespace momo {

// One fully specified experiment: which monoid, which family, which sweep.
struct ExperimentConfig {
  std::string monoid = "integers";  // integers | poly | synthetic
  u64 q = 2;                        // poly: field size (prime power)
  std::string spectrum_file;        // synthetic: records path
  double kappa = 1.0;               // synthetic params (poly/integers derive their own)
  double theta = 0.0;
  std::string x_mode = "rational";  // synthetic: rational | q-power
  u64 x_mode_q = 2;

  unsigned h = 2;
  Family family = Family::h_free;
  std::vector<u64> x_list;
  u64 prime_bound = 1000000;
  double epsilon = 0.5;
  std::string output = "csv";  // csv | json
  u64 seed = 1;
  bool timing = true;
  unsigned threads = 0;  // 0: MONOID_MOMENTS_THREADS env, then hardware
  bool inject_fault = false;  // verify-only: deliberately break one identity

  void validate_common() const {
    check_h(h);
    if (x_list.empty()) throw std::invalid_argument("config: x_list must be nonempty");
    for (std::size_t i = 1; i < x_list.size(); ++i)
      if (x_list[i] <= x_list[i - 1]) throw std::invalid_argument("config: x_list must be ascending");
    if (output != "csv" && output != "json") throw std::invalid_argument("config: output must be csv or json");
  }
};

inline unsigned resolve_threads(unsigned requested, std::size_t tasks) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("MONOID_MOMENTS_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = unsigned(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return unsigned(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

// Deterministic parallel map: task i writes slot i. The first worker
// exception is rethrown on the caller's thread after the join.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Spectrum construction from config; bound covers both the constants
// truncation P and whatever completeness the family sweep needs.
inline NormSpectrum build_spectrum(const ExperimentConfig& cfg) {
  u64 max_x = cfg.x_list.empty() ? 2 : cfg.x_list.back();
  u64 needed = (cfg.family == Family::h_full) ? floor_kth_root(max_x, cfg.h) : max_x;
  needed = std::max({needed, cfg.prime_bound, u64(2)});
  if (cfg.monoid == "integers") return NormSpectrum::integers(needed);
  if (cfg.monoid == "poly") {
    unsigned deg = std::max(1u, floor_log(cfg.q, needed));
    if (ipow_capped(cfg.q, deg, needed) < needed) ++deg;  // cover the bound, not just reach it
    return NormSpectrum::monic_polynomials(cfg.q, deg);
  }
  if (cfg.monoid == "synthetic") {
    MonoidParams params;
    params.kappa = cfg.kappa;
    params.theta = cfg.theta;
    params.x_mode = cfg.x_mode == "q-power" ? XMode::q_power : XMode::rational;
    params.q = params.x_mode == XMode::q_power ? cfg.x_mode_q : 0;
    return NormSpectrum::synthetic_from_file(cfg.spectrum_file, params);
  }
  throw std::invalid_argument("config: monoid must be integers, poly, or synthetic");
}

struct ReportRow {
  u64 x = 0;
  unsigned h = 2;
  Family family = Family::h_free;
  Moment moment = Moment::count;
  u64 empirical = 0;
  double predicted = 0.0;
  double residual = 0.0;
  double normalized = 0.0;
  i64 runtime_ms = 0;
};

inline std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "x,h,family,moment,empirical,predicted,residual,normalized,runtime_ms\n";
  for (const auto& r : rows) {
    out += std::to_string(r.x) + ',' + std::to_string(r.h) + ',' + family_name(r.family) + ',' +
           moment_name(r.moment) + ',' + std::to_string(r.empirical) + ',' + format_double(r.predicted) + ',' +
           format_double(r.residual) + ',' + format_double(r.normalized) + ',' + std::to_string(r.runtime_ms) + '\n';
  }
  return out;
}

inline ordered_json rows_to_json(const std::vector<ReportRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows)
    arr.push_back(ordered_json{{"x", r.x},
                               {"h", r.h},
                               {"family", family_name(r.family)},
                               {"moment", moment_name(r.moment)},
                               {"empirical", r.empirical},
                               {"predicted", r.predicted},
                               {"residual", r.residual},
                               {"normalized", r.normalized},
                               {"runtime_ms", r.runtime_ms}});
  return arr;
}

inline ConstantsBundle run_constants(const NormSpectrum& s, const ExperimentConfig& cfg) {
  return ConstantsBundle::compute(s, cfg.h, cfg.prime_bound);
}

// For each x: exact tally, prediction, residual for count, m1, m2.
inline std::vector<ReportRow> run_moments(const NormSpectrum& s, const ExperimentConfig& cfg) {
  cfg.validate_common();
  const ConstantsBundle bundle = ConstantsBundle::compute(s, cfg.h, cfg.prime_bound);
  std::vector<std::array<ReportRow, 3>> per_x(cfg.x_list.size());
  const unsigned threads = resolve_threads(cfg.threads, cfg.x_list.size());
  parallel_for(cfg.x_list.size(), threads, [&](std::size_t i) {
    const u64 x = cfg.x_list[i];
    const auto t0 = std::chrono::steady_clock::now();
    const SetSelector sel{cfg.family, cfg.h, {}};
    const MomentTally tally = tally_selected(s, x, sel);
    const auto t1 = std::chrono::steady_clock::now();
    const i64 ms = cfg.timing ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() : 0;
    const Moment moments[3] = {Moment::count, Moment::m1, Moment::m2};
    const u64 empirical[3] = {tally.count, tally.sum_omega, tally.sum_omega_sq};
    for (int m = 0; m < 3; ++m) {
      const Prediction pred = predict(x, cfg.h, cfg.family, moments[m], bundle, s.params());
      const Residual res = residual_report(double(empirical[m]), pred);
      per_x[i][m] = ReportRow{x,            cfg.h,        cfg.family,     moments[m], empirical[m],
                              pred.main_value, res.residual, res.normalized, ms};
    }
  });
  std::vector<ReportRow> rows;
  for (auto& triple : per_x)
    for (auto& r : triple) rows.push_back(r);
  return rows;
}

struct NormalOrderRow {
  u64 x = 0;
  unsigned h = 2;
  Family family = Family::h_free;
  double epsilon = 0.0;
  u64 exceptions = 0;
  u64 eligible = 0;
  double fraction = 0.0;
  i64 runtime_ms = 0;
};

inline std::vector<NormalOrderRow> run_normal_order(const NormSpectrum& s, const ExperimentConfig& cfg) {
  cfg.validate_common();
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
  std::vector<NormalOrderRow> rows(cfg.x_list.size());
  const unsigned threads = resolve_threads(cfg.threads, cfg.x_list.size());
  parallel_for(cfg.x_list.size(), threads, [&](std::size_t i) {
    const u64 x = cfg.x_list[i];
    const auto t0 = std::chrono::steady_clock::now();
    const auto ec = normal_order_exceptions(s, x, SetSelector{cfg.family, cfg.h, {}}, cfg.epsilon);
    const auto t1 = std::chrono::steady_clock::now();
    rows[i] = NormalOrderRow{x,
                             cfg.h,
                             cfg.family,
                             cfg.epsilon,
                             ec.exceptions,
                             ec.eligible,
                             ec.fraction(),
                             cfg.timing ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() : 0};
  });
  return rows;
}

inline std::string normal_order_csv(const std::vector<NormalOrderRow>& rows) {
  std::string out = "x,h,family,epsilon,exceptions,eligible,fraction,runtime_ms\n";
  for (const auto& r : rows)
    out += std::to_string(r.x) + ',' + std::to_string(r.h) + ',' + family_name(r.family) + ',' +
           format_double(r.epsilon) + ',' + std::to_string(r.exceptions) + ',' + std::to_string(r.eligible) + ',' +
           format_double(r.fraction) + ',' + std::to_string(r.runtime_ms) + '\n';
  return out;
}

inline ordered_json normal_order_json(const std::vector<NormalOrderRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows)
    arr.push_back(ordered_json{{"x", r.x},
                               {"h", r.h},
                               {"family", family_name(r.family)},
                               {"epsilon", r.epsilon},
                               {"exceptions", r.exceptions},
                               {"eligible", r.eligible},
                               {"fraction", r.fraction},
                               {"runtime_ms", r.runtime_ms}});
  return arr;
}

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyResult {
  std::vector<VerifyCheck> checks;
  bool all_pass() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// The exact-identity suite: decomposition vs tally on fixed and seeded random
// spectra, geometric closed forms vs direct summation, bundle recomposition,
// exclusion monotonicity, nesting, tally merge, and output determinism.
inline VerifyResult run_verify(const ExperimentConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  VerifyResult out;
  auto record = [&](const std::string& name, bool pass, const std::string& detail = "") {
    out.checks.push_back(VerifyCheck{name, pass, detail});
  };

  // decomposition identity on integers, a random synthetic monoid, and poly(2)
  {
    bool pass = true;
    std::string detail;
    auto check_one = [&](const NormSpectrum& s, u64 x, unsigned h, Family fam, const char* tag) {
      SetSelector sel{fam, h, {}};
      MomentTally t = tally_selected(s, x, sel);
      u64 s1 = t.sum_omega + (cfg.inject_fault ? 1 : 0);
      u64 d1 = decomposition_moment(s, x, sel, 1);
      u64 d2 = decomposition_moment(s, x, sel, 2);
      if (d1 != s1 || d2 != t.sum_omega_sq) {
        pass = false;
        detail += std::string(tag) + " x=" + std::to_string(x) + " h=" + std::to_string(h) + " " + family_name(fam) +
                  " d1=" + std::to_string(d1) + " s1=" + std::to_string(s1) + " d2=" + std::to_string(d2) +
                  " s2=" + std::to_string(t.sum_omega_sq) + "; ";
      }
    };
    NormSpectrum ints = NormSpectrum::integers(2000);
    NormSpectrum poly = NormSpectrum::monic_polynomials(2, 9);
    std::vector<std::pair<u64, u64>> records;
    u64 norm = 2;
    for (int i = 0; i < 6; ++i) {
      records.emplace_back(norm, 1 + rng() % 3);
      norm += 1 + rng() % 5;
    }
    NormSpectrum synth = NormSpectrum::synthetic(records, MonoidParams{1.0, 0.0, XMode::rational, 0});
    for (unsigned h : {2u, 3u})
      for (Family fam : {Family::h_free, Family::h_full}) {
        for (u64 x : {u64(200), u64(2000)}) check_one(ints, x, h, fam, "integers");
        check_one(synth, 500, h, fam, "synthetic");
        check_one(poly, u64(1) << 9, h, fam, "poly2");
      }
    record("decomposition-vs-tally", pass, detail);
  }

  // geometric closed forms against direct summation
  {
    std::uniform_real_distribution<double> ua(0.01, 0.99);
    bool pass = true;
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
      const double a = ua(rng);
      const unsigned h = 2 + unsigned(rng() % 9);
      const long long r = (long long)h + (long long)(rng() % 59);
      long double direct_k = 0.0L, direct_k2 = 0.0L;
      for (long long k = h; k <= r; ++k) {
        const long double t = std::pow((long double)a, (long double)k);
        direct_k += (long double)k * t;
        direct_k2 += (long double)k * (long double)k * t;
      }
      // compared at the extended precision both sides are computed in; the
      // double-rounded API values sit half an ulp away, which exceeds 1e-12
      // once the sum itself passes ~2^43
      const double e1 = double(std::fabs(detail::geom_sum_k_ext(a, h, r) - direct_k));
      const double e2 = double(std::fabs(detail::geom_sum_k2_ext(a, h, r) - direct_k2));
      worst = std::max({worst, e1, e2});
    }
    pass = worst <= 1e-12;
    record("geom-closed-forms", pass, "worst_abs_err=" + format_double(worst));
  }

  // bundle recomposition identities
  {
    bool pass = true;
    std::string detail;
    NormSpectrum ints = NormSpectrum::integers(10000);
    for (unsigned h : {2u, 3u}) {
      ConstantsBundle b = ConstantsBundle::compute(ints, h, 10000);
      const double c4r = b.C3.value * b.C3.value + b.C3p.value + b.B - c4_subtracted_sum(h, ints, 10000).value;
      const double d4r =
          b.D3.value * b.D3.value + b.D3p.value + double(h) * double(h) * b.B - d4_subtracted_sum(h, ints, 10000).value;
      if (std::abs(c4r - b.C4.value) > 1e-12 || std::abs(d4r - b.D4.value) > 1e-12) {
        pass = false;
        detail += "h=" + std::to_string(h) + " dC4=" + format_double(c4r - b.C4.value) +
                  " dD4=" + format_double(d4r - b.D4.value) + "; ";
      }
    }
    record("bundle-recomposition", pass, detail);
  }

  // adding exclusions never increases restricted counts; empty = unrestricted
  {
    bool pass = true;
    NormSpectrum ints = NormSpectrum::integers(600);
    for (Family fam : {Family::h_free, Family::h_full}) {
      SetSelector base{fam, 2, {}};
      u64 prev = count_selected(ints, 600, base);
      if (prev != count_selected(ints, 600, SetSelector{fam, 2, {}})) pass = false;
      std::vector<u64> excluded;
      for (int i = 0; i < 5; ++i) {
        u64 id = rng() % ints.slot_count();
        bool dup = false;
        for (u64 e : excluded) dup |= (e == id);
        if (dup) continue;
        excluded.push_back(id);
        u64 c = count_selected(ints, 600, SetSelector{fam, 2, excluded});
        if (c > prev) pass = false;
        prev = c;
      }
    }
    record("exclusion-monotonicity", pass);
  }

  // nesting in h
  {
    bool pass = true;
    NormSpectrum ints = NormSpectrum::integers(3000);
    for (unsigned h = 2; h <= 4; ++h) {
      u64 sf = count_selected(ints, 3000, SetSelector{Family::h_free, h, {}});
      u64 sf2 = count_selected(ints, 3000, SetSelector{Family::h_free, h + 1, {}});
      u64 nf = count_selected(ints, 3000, SetSelector{Family::h_full, h, {}});
      u64 nf2 = count_selected(ints, 3000, SetSelector{Family::h_full, h + 1, {}});
      u64 all = count_all(ints, 3000);
      if (!(sf <= sf2 && nf2 <= nf && sf <= all && nf <= all)) pass = false;
    }
    record("family-nesting", pass);
  }

  // tally over [1,x] equals the merge of norm-range slices
  {
    bool pass = true;
    NormSpectrum ints = NormSpectrum::integers(1200);
    SetSelector sel{Family::h_free, 2, {}};
    MomentTally whole = tally_selected(ints, 1200, sel);
    std::vector<u64> cuts = {1, 7, 100, 350, 800, 1200};
    std::vector<MomentTally> slices(cuts.size());
    detail::for_each_selected(ints, 1200, detail::EnumFamily::h_free, 2, {}, [&](u64 n, u64 om, u64 w) {
      std::size_t i = 0;
      while (n > cuts[i]) ++i;
      slices[i].add(om, w);
    });
    std::shuffle(slices.begin(), slices.end(), rng);
    MomentTally merged;
    for (auto& sl : slices) merged.merge(sl);
    pass = merged == whole;
    record("tally-range-merge", pass);
  }

  // identical seed must reproduce identical bytes
  {
    NormSpectrum ints = NormSpectrum::integers(100000);
    ExperimentConfig c2 = cfg;
    c2.timing = false;
    c2.x_list = {1000, 10000};
    c2.family = Family::h_free;
    c2.prime_bound = 100000;
    const std::string a = rows_to_csv(run_moments(ints, c2));
    const std::string b = rows_to_csv(run_moments(ints, c2));
    record("report-determinism", a == b);
  }

  return out;
}

inline std::string verify_to_text(const VerifyResult& r) {
  std::string out;
  for (auto& c : r.checks) {
    out += (c.pass ? "PASS " : "FAIL ") + c.name;
    if (!c.detail.empty()) out += "  [" + c.detail + "]";
    out += '\n';
  }
  out += r.all_pass() ? "verify: all checks passed\n" : "verify: FAILURES present\n";
  return out;
}

// Sweep = moments across x plus a per-moment trend summary of normalized
// residuals (max/min ratio against the first x).
struct SweepTrend {
  Moment moment;
  double first_normalized = 0.0;
  double max_abs_ratio = 0.0;  // max over x of |normalized(x)/normalized(x0)|
  double min_abs_ratio = 0.0;
};

struct SweepResult {
  std::vector<ReportRow> rows;
  std::vector<SweepTrend> trends;
};

inline SweepResult run_sweep(const NormSpectrum& s, const ExperimentConfig& cfg) {
  SweepResult res;
  res.rows = run_moments(s, cfg);
  for (Moment m : {Moment::count, Moment::m1, Moment::m2}) {
    SweepTrend t;
    t.moment = m;
    bool first = true;
    for (const auto& r : res.rows) {
      if (r.moment != m) continue;
      if (first) {
        t.first_normalized = r.normalized;
        t.max_abs_ratio = t.min_abs_ratio = 1.0;
        first = false;
        continue;
      }
      if (t.first_normalized != 0.0) {
        const double ratio = std::abs(r.normalized / t.first_normalized);
        t.max_abs_ratio = std::max(t.max_abs_ratio, ratio);
        t.min_abs_ratio = std::min(t.min_abs_ratio, ratio);
      }
    }
    res.trends.push_back(t);
  }
  return res;
}

}  // namespace momo

// Command-line driver: build spectra, evaluate constants, run exact counts and
// moment sweeps, check the exact identities, and emit CSV/JSON reports.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <monoid_moments/harness.hpp>

namespace {

using namespace momo;

struct CommonOpts {
  ExperimentConfig cfg;
  std::vector<u64> degrees;  // q-power sugar: x = q^n
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_x = true) {
  cmd->set_help_flag("--help", "print help");  // frees -h / --h for the family parameter
  cmd->add_option("--monoid", o.cfg.monoid, "integers | poly | synthetic")->default_val("integers");
  cmd->add_option("--q", o.cfg.q, "field size for --monoid poly (prime power)");
  cmd->add_option("--spectrum-file", o.cfg.spectrum_file, "synthetic spectrum records ('<norm> <count>' lines)");
  cmd->add_option("--kappa", o.cfg.kappa, "synthetic: declared kappa");
  cmd->add_option("--theta", o.cfg.theta, "synthetic: declared theta in [0,1)");
  cmd->add_option("--x-mode", o.cfg.x_mode, "synthetic: rational | q-power");
  cmd->add_option("--x-mode-q", o.cfg.x_mode_q, "synthetic: q for q-power mode");
  cmd->add_option("--h", o.cfg.h, "h >= 2")->check(CLI::Range(2u, 64u));
  cmd->add_option_function<std::string>(
      "--family", [&o](const std::string& v) {
        if (v == "h-free" || v == "h_free") o.cfg.family = Family::h_free;
        else if (v == "h-full" || v == "h_full") o.cfg.family = Family::h_full;
        else throw CLI::ValidationError("--family must be h-free or h-full");
      },
      "h-free | h-full");
  if (with_x) {
    cmd->add_option("--x", o.cfg.x_list, "ascending list of x values")->delimiter(',');
    cmd->add_option("--degrees", o.degrees, "degree list n; x = q^n (q-power monoids)")->delimiter(',');
  }
  cmd->add_option("--prime-bound", o.cfg.prime_bound, "truncation norm P for constants");
  cmd->add_option("--format", o.cfg.output, "csv | json");
  cmd->add_option("--out", o.out_path, "output file (default stdout)");
  cmd->add_option("--seed", o.cfg.seed, "seed for randomized identity checks");
  cmd->add_option("--threads", o.cfg.threads, "max worker threads (0 = MONOID_MOMENTS_THREADS or hardware)");
  cmd->add_flag_callback("--no-timing", [&o] { o.cfg.timing = false; }, "zero the runtime_ms column");
}

// x-mode and q are determined by the config alone; the x list must be final
// before the spectrum is sized, so this cannot consult the spectrum.
std::pair<XMode, u64> config_x_mode(const ExperimentConfig& cfg) {
  if (cfg.monoid == "poly") return {XMode::q_power, cfg.q};
  if (cfg.monoid == "synthetic" && cfg.x_mode == "q-power") return {XMode::q_power, cfg.x_mode_q};
  return {XMode::rational, 0};
}

void finalize_x(CommonOpts& o) {
  auto [mode, q] = config_x_mode(o.cfg);
  if (!o.degrees.empty()) {
    if (mode != XMode::q_power) throw CLI::ValidationError("--degrees requires a q-power monoid");
    for (u64 n : o.degrees) o.cfg.x_list.push_back(ipow_capped(q, unsigned(n), u64(1) << 62));
    std::sort(o.cfg.x_list.begin(), o.cfg.x_list.end());
  }
  if (mode == XMode::q_power) {
    for (u64 x : o.cfg.x_list) {
      u64 v = 1;
      while (v < x && v <= x / q) v *= q;
      if (v != x)
        std::cerr << "warning: x=" << x << " is not a power of q=" << q
                  << "; counts are still exact but the theorems assume x in X\n";
    }
  }
}

void emit(const CommonOpts& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + o.out_path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moments of the Omega function over h-free and h-full elements of normed abelian monoids"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file with a [subcommand] section; command-line flags win");

  CommonOpts constants_o, count_o, moments_o, verify_o, normal_o, sweep_o;
  std::vector<u64> count_exclude_norms;

  auto* c_constants = app.add_subcommand("constants", "evaluate the Euler-product constants bundle");
  add_common(c_constants, constants_o, false);
  constants_o.cfg.x_list = {16};  // constants need no sweep

  auto* c_count = app.add_subcommand("count", "exact counts: all elements and the selected family");
  add_common(c_count, count_o);
  c_count->add_option("--exclude-norms", count_exclude_norms,
                      "force one prime slot of each listed norm to multiplicity 0")
      ->delimiter(',');

  auto* c_moments = app.add_subcommand("moments", "tally count/m1/m2 against theorem predictions");
  add_common(c_moments, moments_o);

  auto* c_verify = app.add_subcommand("verify", "run the exact-identity suite");
  add_common(c_verify, verify_o, false);
  verify_o.cfg.x_list = {16};
  c_verify->add_flag("--inject-fault", verify_o.cfg.inject_fault,
                     "deliberately break one identity (harness sanity check)");

  auto* c_normal = app.add_subcommand("normal-order", "count normal-order exceptions");
  add_common(c_normal, normal_o);
  c_normal->add_option("--epsilon", normal_o.cfg.epsilon, "band half-width epsilon > 0");

  auto* c_sweep = app.add_subcommand("sweep", "moments plus normalized-residual trend summary");
  add_common(c_sweep, sweep_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_constants->parsed()) {
      auto& o = constants_o;
      NormSpectrum s = build_spectrum(o.cfg);
      ConstantsBundle b = run_constants(s, o.cfg);
      emit(o, to_json(b).dump(2) + "\n");
      return 0;
    }
    if (c_count->parsed()) {
      auto& o = count_o;
      finalize_x(o);
      o.cfg.validate_common();
      NormSpectrum s = build_spectrum(o.cfg);
      SetSelector sel{o.cfg.family, o.cfg.h, {}};
      for (u64 n : count_exclude_norms) {
        std::size_t g = s.groups_upto(n);
        if (g == 0 || s.group_norm(g - 1) != n)
          throw std::invalid_argument("--exclude-norms: no prime slot of norm " + std::to_string(n));
        u64 id = s.group_offset(g - 1);
        const u64 end = id + s.group_size(g - 1);
        while (std::find(sel.excluded_slots.begin(), sel.excluded_slots.end(), id) != sel.excluded_slots.end()) ++id;
        if (id >= end)
          throw std::invalid_argument("--exclude-norms: no remaining slot of norm " + std::to_string(n));
        sel.excluded_slots.push_back(id);
      }
      std::string text = "x,count_all,count_selected\n";
      ordered_json arr = ordered_json::array();
      for (u64 x : o.cfg.x_list) {
        // count_all needs the spectrum complete to x; the family count often
        // does not (h-full only needs x^(1/h)), so report what is available
        std::string all_field;
        ordered_json all_json;
        if (s.complete_to(x)) {
          const u64 all = count_all(s, x);
          all_field = std::to_string(all);
          all_json = all;
        }
        u64 selc = count_selected(s, x, sel);
        text += std::to_string(x) + ',' + all_field + ',' + std::to_string(selc) + '\n';
        arr.push_back(ordered_json{{"x", x}, {"count_all", all_json}, {"count_selected", selc}});
      }
      emit(o, o.cfg.output == "json" ? arr.dump(2) + "\n" : text);
      return 0;
    }
    if (c_moments->parsed()) {
      auto& o = moments_o;
      finalize_x(o);
      NormSpectrum s = build_spectrum(o.cfg);
      auto rows = run_moments(s, o.cfg);
      emit(o, o.cfg.output == "json" ? rows_to_json(rows).dump(2) + "\n" : rows_to_csv(rows));
      return 0;
    }
    if (c_verify->parsed()) {
      auto& o = verify_o;
      VerifyResult r = run_verify(o.cfg);
      emit(o, verify_to_text(r));
      return r.all_pass() ? 0 : 1;
    }
    if (c_normal->parsed()) {
      auto& o = normal_o;
      finalize_x(o);
      NormSpectrum s = build_spectrum(o.cfg);
      auto rows = run_normal_order(s, o.cfg);
      emit(o, o.cfg.output == "json" ? normal_order_json(rows).dump(2) + "\n" : normal_order_csv(rows));
      return 0;
    }
    if (c_sweep->parsed()) {
      auto& o = sweep_o;
      finalize_x(o);
      NormSpectrum s = build_spectrum(o.cfg);
      SweepResult res = run_sweep(s, o.cfg);
      if (o.cfg.output == "json") {
        ordered_json j;
        j["rows"] = rows_to_json(res.rows);
        ordered_json trends = ordered_json::array();
        for (auto& t : res.trends)
          trends.push_back(ordered_json{{"moment", moment_name(t.moment)},
                                        {"first_normalized", t.first_normalized},
                                        {"max_abs_ratio", t.max_abs_ratio},
                                        {"min_abs_ratio", t.min_abs_ratio}});
        j["trends"] = trends;
        emit(o, j.dump(2) + "\n");
      } else {
        std::string text = rows_to_csv(res.rows);
        for (auto& t : res.trends)
          text += std::string("# trend ") + moment_name(t.moment) + " first_normalized=" +
                  format_double(t.first_normalized) + " max_abs_ratio=" + format_double(t.max_abs_ratio) +
                  " min_abs_ratio=" + format_double(t.min_abs_ratio) + '\n';
        emit(o, text);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

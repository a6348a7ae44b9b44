// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0
//
// polarmix command-line front end: construct | evolve | simulate | codec |
// analyze | joint. Every artifact is a CSV or JSON file; with a fixed seed
// runs are byte-identical regardless of thread count.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "polarmix/io.hpp"
#include "polarmix/polarmix.hpp"

namespace fs = std::filesystem;
using namespace polarmix;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct RunConfig {
  std::string dist = "uniform:0,1";
  int n = 4;
  double rate = 0.5;
  std::string rule = "quantile";
  double lambda = 0.0;  // 0 = derive from epsilon
  double epsilon = 0.1;
  std::vector<double> deadlines;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::string out = ".";
  int grid_points = kDefaultGridPoints;
  int degree_cap = kDefaultDegreeCap;
  std::string path_bits;  // joint subcommand

  PolarizeOptions polarize_options() const {
    PolarizeOptions o;
    o.degree_cap = degree_cap;
    o.grid_points = grid_points;
    return o;
  }

  FrozenSet freeze(const RuntimeDistribution& base) const {
    std::size_t N = std::size_t{1} << n;
    if (rule == "laplace") {
      double lam =
          lambda > 0.0 ? lambda : default_laplace_lambda(N, rate, epsilon);
      return laplace_freeze(base, n, rate, lam, polarize_options());
    }
    return quantile_freeze(base, n, rate);
  }
};

std::string csv_line(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ",";
    s += fields[i];
  }
  s += "\r\n";
  return s;
}

std::string num(double v) { return detail::fmt17(v); }

void write_artifact(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot write " + p.string());
  os << text;
  if (!os) throw std::ios_base::failure("short write " + p.string());
}

int cmd_construct(const RunConfig& cfg) {
  RuntimeDistribution base = parse_distribution_spec(cfg.dist);
  FrozenSet fsn = cfg.freeze(base);
  fs::path out(cfg.out);
  fs::create_directories(out);
  write_artifact(out / "frozenset.json", to_json(fsn) + "\n");

  // deadline -> union bound table; default sweep spans the support
  std::vector<double> deadlines = cfg.deadlines;
  if (deadlines.empty()) {
    double a = base.support_lo(), b = base.support_hi();
    for (int i = 0; i < 20; ++i)
      deadlines.push_back(a + (b - a) * (i + 1) / 20.0);
  }
  std::string csv = csv_line({"deadline", "failure_bound"});
  for (double t : deadlines)
    csv += csv_line({num(t), num(failure_bound(base, fsn, t))});
  write_artifact(out / "failure_bound.csv", csv);
  std::cout << "construct: N=" << fsn.workers() << " K=" << fsn.data_count()
            << " rule=" << to_string(fsn.rule)
            << " param=" << fsn.rule_param << "\n";
  return kExitOk;
}

int cmd_evolve(const RunConfig& cfg) {
  RuntimeDistribution base = parse_distribution_spec(cfg.dist);
  PolarFamily fam = polarize(base, cfg.n, cfg.polarize_options());
  fs::path out(cfg.out);
  fs::create_directories(out);
  std::string csv = csv_line({"index", "bit_path", "t", "cdf", "pdf"});
  double a = base.support_lo(), b = base.support_hi();
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    BitPath p = BitPath::from_index(i, cfg.n);
    const AnyDist& d = fam.members[i];
    for (int s = 0; s < cfg.grid_points; ++s) {
      double t = a + (b - a) * s / (cfg.grid_points - 1);
      csv += csv_line({std::to_string(i), p.to_string(), num(t),
                       num(cdf(d, t)), num(pdf(d, t))});
    }
  }
  write_artifact(out / "family.csv", csv);
  std::cout << "evolve: wrote " << fam.members.size() << " members ("
            << (fam.grid_mode ? "grid" : "exact") << " mode)\n";
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
  RuntimeDistribution base = parse_distribution_spec(cfg.dist);
  FrozenSet fsn = cfg.freeze(base);
  double deadline = cfg.deadlines.empty()
                        ? base.quantile(cfg.rate) +
                              0.15 * (base.support_hi() - base.support_lo())
                        : cfg.deadlines.front();
  ComparisonReport rep =
      run_comparison(base, fsn, cfg.trials, cfg.seed, deadline);
  fs::path out(cfg.out);
  fs::create_directories(out);

  std::string csv = csv_line({"trial", "scheme", "decode_time"});
  for (const auto& r : rep.records) {
    csv += csv_line({std::to_string(r.trial), "uncoded", num(r.uncoded)});
    csv += csv_line(
        {std::to_string(r.trial), "repetition", num(r.repetition)});
    csv += csv_line({std::to_string(r.trial), "mds", num(r.mds)});
    csv += csv_line({std::to_string(r.trial), "polar", num(r.polar)});
  }
  write_artifact(out / "comparison.csv", csv);

  std::string j = "{";
  bool first = true;
  for (const auto& [name, s] : rep.summary) {
    if (!first) j += ",";
    first = false;
    j += "\"" + name + "\":{\"mean\":" + num(s.mean) +
         ",\"p50\":" + num(s.p50) + ",\"p95\":" + num(s.p95) +
         ",\"fail@deadline\":" + num(s.fail_at_deadline) + "}";
  }
  j += "}";
  write_artifact(out / "summary.json", j + "\n");
  std::cout << "simulate: " << cfg.trials << " trials, deadline " << deadline
            << "\n";
  for (const auto& [name, s] : rep.summary)
    std::cout << "  " << name << ": mean=" << s.mean << " p95=" << s.p95
              << " fail=" << s.fail_at_deadline << "\n";
  return kExitOk;
}

int cmd_codec(const RunConfig& cfg) {
  RuntimeDistribution base = parse_distribution_spec(cfg.dist);
  FrozenSet fsn = cfg.freeze(base);
  CodeConfig code = fsn.code_config();
  std::size_t N = code.workers;
  RandomStream rs(cfg.seed);
  std::vector<TaskMatrix> blocks(N);
  for (std::size_t pos = 0; pos < N; ++pos)
    blocks[pos] = code.frozen[path_of_position(pos, N)]
                      ? TaskMatrix(4, 3)
                      : TaskMatrix::random(4, 3, rs);
  TaskMatrix B = TaskMatrix::random(3, 5, rs);
  auto coded = encode(blocks, code);
  std::vector<WorkerReturn> rets(N);
  std::vector<double> times(N);
  for (std::size_t w = 0; w < N; ++w) {
    times[w] = base.sample(rs);
    rets[w] = {w, coded[w].matmul(B), times[w]};
  }
  DecodeOutput out = sc_decode(rets, code);
  double worst = 0.0;
  for (std::size_t path = 0; path < N; ++path) {
    if (code.frozen[path]) continue;
    TaskMatrix direct = blocks[position_of_path(path, N)].matmul(B);
    double scale = std::max(1.0, direct.max_abs());
    worst = std::max(worst, out.blocks[path]->max_abs_diff(direct) / scale);
  }
  bool ok = worst < 1e-9 && out.decode_time == decode_time(times, code.frozen);
  fs::path outdir(cfg.out);
  fs::create_directories(outdir);
  std::string report =
      std::string("{\"workers\":") + std::to_string(N) +
      ",\"data_blocks\":" + std::to_string(code.data_blocks) +
      ",\"max_rel_err\":" + num(worst) +
      ",\"decode_time\":" + num(out.decode_time) +
      ",\"ok\":" + (ok ? "true" : "false") + "}";
  write_artifact(outdir / "codec_report.json", report + "\n");
  std::cout << "codec: roundtrip max rel err " << worst
            << (worst < 1e-9 ? " < 1e-9" : " (FAIL)") << ", decode time "
            << out.decode_time << "\n";
  return ok ? kExitOk : kExitInternal;
}

int cmd_analyze(const RunConfig& cfg) {
  RuntimeDistribution base = parse_distribution_spec(cfg.dist);
  fs::path out(cfg.out);
  fs::create_directories(out);

  double resid = martingale_residual(base, std::min(cfg.n, 5));
  DeltaTailResult tail =
      delta_norm_tail(base, cfg.n, 0.5, 0.375, cfg.trials, cfg.seed);
  auto [high, low] =
      polarization_fraction(base, cfg.n, base.quantile(cfg.rate));
  LimitLocationResult loc = limit_location_test(
      base, std::max(cfg.n, 8), std::min<std::size_t>(cfg.trials, 2000),
      cfg.seed + 1);
  std::vector<int> depths;
  for (int d = 0; d <= cfg.n; ++d) depths.push_back(d);
  auto l2 = l2_increment_series(base, depths,
                                std::min<std::size_t>(cfg.trials, 2000),
                                cfg.seed + 2);
  MinFDecayResult decay = min_f_decay(base, cfg.n, cfg.trials, cfg.seed + 3);

  std::string j = "{";
  j += "\"martingale_residual\":" + num(resid);
  j += ",\"delta_tail\":{\"depth\":" + std::to_string(tail.depth) +
       ",\"threshold\":" + num(tail.threshold) +
       ",\"exceedance\":" + num(tail.exceedance) +
       ",\"standard_error\":" + num(tail.standard_error) +
       ",\"base_integral\":" + num(tail.base_integral) +
       ",\"markov_bound\":" + num(tail.markov_bound) +
       ",\"quoted_bound\":" + num(tail.quoted_bound) + "}";
  j += ",\"fraction_high\":" + num(high) + ",\"fraction_low\":" + num(low);
  j += ",\"limit_location_ks\":" + num(loc.ks) +
       ",\"ks_critical_1pct\":" + num(loc.ks_critical_1pct);
  j += ",\"min_f\":{\"p10\":" + num(decay.p10) + ",\"p50\":" +
       num(decay.p50) + ",\"p90\":" + num(decay.p90) +
       ",\"envelope\":" + num(decay.envelope) + "}";
  j += "}";
  write_artifact(out / "diagnostics.json", j + "\n");

  std::string csv = csv_line({"depth", "mean_l2_increment_sq"});
  for (std::size_t i = 0; i < depths.size(); ++i)
    csv += csv_line({std::to_string(depths[i]), num(l2[i])});
  write_artifact(out / "l2_series.csv", csv);
  std::cout << "analyze: residual=" << resid << " ks=" << loc.ks
            << " exceedance=" << tail.exceedance << "\n";
  return kExitOk;
}

int cmd_joint(const RunConfig& cfg) {
  RuntimeDistribution base = parse_distribution_spec(cfg.dist);
  std::vector<int> bits;
  if (!cfg.path_bits.empty()) {
    for (char c : cfg.path_bits) {
      if (c != '0' && c != '1')
        throw CLI::ValidationError("path", "path must be a 0/1 string");
      bits.push_back(c - '0');
    }
  } else {
    RandomStream s(cfg.seed);
    for (int k = 0; k < cfg.n; ++k)
      bits.push_back(static_cast<int>(s.next_u64() & 1));
  }
  int pts = std::min(cfg.grid_points, 256);
  JointGrid g = JointGrid::product(base, pts);
  fs::path out(cfg.out);
  fs::create_directories(out);
  auto dump = [&](const JointGrid& jg, int step) {
    std::vector<std::string> head = {"u\\v"};
    for (std::size_t j = 0; j < jg.points(); ++j)
      head.push_back(num(jg.axis(j)));
    std::string csv = csv_line(head);
    for (std::size_t i = 0; i < jg.points(); ++i) {
      std::vector<std::string> row = {num(jg.axis(i))};
      for (std::size_t j = 0; j < jg.points(); ++j)
        row.push_back(num(jg.at(i, j)));
      csv += csv_line(row);
    }
    write_artifact(out / ("joint_" + std::to_string(step) + ".csv"), csv);
  };
  dump(g, 0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    g = joint_density_step(g, bits[k]);
    dump(g, static_cast<int>(k + 1));
  }
  std::cout << "joint: wrote " << bits.size() + 1 << " grids\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational polarization toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a TOML/INI file");
  app.allow_config_extras(false);

  RunConfig cfg;
  app.add_option("--dist", cfg.dist,
                 "base distribution: uniform:a,b | exp:mean | file:d.json | "
                 "samples:s.csv");
  app.add_option("--n", cfg.n, "polarization depth (N = 2^n)")
      ->check(CLI::Range(0, 20));
  app.add_option("--rate", cfg.rate, "code rate K/N")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9).description("(0,1)"));
  app.add_option("--rule", cfg.rule, "freezing rule")
      ->check(CLI::IsMember({"quantile", "laplace"}));
  app.add_option("--lambda", cfg.lambda, "laplace rule exponent");
  app.add_option("--epsilon", cfg.epsilon,
                 "slack for the default laplace lambda = log(NR)/epsilon");
  app.add_option("--deadline", cfg.deadlines, "deadline(s)");
  app.add_option("--trials", cfg.trials, "monte-carlo trials")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--grid-points", cfg.grid_points, "grid resolution")
      ->check(CLI::Range(16, 1 << 20));
  app.add_option("--degree-cap", cfg.degree_cap,
                 "piecewise-polynomial degree cap before grid fallback")
      ->check(CLI::Range(2, 1 << 16));

  auto* construct = app.add_subcommand(
      "construct", "freezing set + failure bound table");
  auto* evolve =
      app.add_subcommand("evolve", "polarized family CDF/PDF table");
  auto* simulate =
      app.add_subcommand("simulate", "scheme comparison monte carlo");
  auto* codec = app.add_subcommand("codec", "encode/decode round trip check");
  auto* analyze = app.add_subcommand("analyze", "convergence diagnostics");
  auto* joint = app.add_subcommand("joint", "joint density evolution grids");
  joint->add_option("--path", cfg.path_bits, "explicit bit path, e.g. 1011");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (construct->parsed()) return cmd_construct(cfg);
    if (evolve->parsed()) return cmd_evolve(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (codec->parsed()) return cmd_codec(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (joint->parsed()) return cmd_joint(cfg);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

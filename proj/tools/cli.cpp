#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "mpcc/analysis.hpp"
#include "mpcc/bench.hpp"
#include "mpcc/errors.hpp"
#include "mpcc/homotopy.hpp"

namespace mpcc {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string join(const Vector& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? " " : "") + num(x[i]);
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
  if (!f) throw Error("cannot write '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Overrides {
  std::string reg = "disj";
  double t0 = 1.0;
  double tmin = 1e-15;
  double eps = 1e-6;
  double shrink = 0.0;
  double beta = 2.0;
  std::string mode = "enumerate";
  int max_iter = 200;

  void attach(CLI::App* app, bool with_reg) {
    if (with_reg) app->add_option("--reg", reg, "Regularization: scholtes, ks, disj, qpf")->capture_default_str();
    app->add_option("--t0", t0, "Initial parameter")->capture_default_str();
    app->add_option("--tmin", tmin, "Smallest parameter")->capture_default_str();
    app->add_option("--eps", eps, "Target maximum violation")->capture_default_str();
    app->add_option("--shrink", shrink, "Shrink factor (default 0.01, or 0.0001 for scholtes)");
    app->add_option("--beta", beta, "Quadrant penalty shape parameter")->capture_default_str();
    app->add_option("--mode", mode, "Disjunctive mode: enumerate, greedy")->capture_default_str();
    app->add_option("--max-iter", max_iter, "SQP iteration limit")->capture_default_str();
  }

  HomotopyParams params(const std::string& kind) const {
    HomotopyParams p;
    p.kind = parse_reg_kind(kind);
    p.t0 = t0;
    p.t_min = tmin;
    p.eps = eps;
    p.shrink = shrink;
    p.beta = beta;
    p.mode = parse_disj_mode(mode);
    p.solver.max_iter = max_iter;
    p.validate();
    return p;
  }
};

Vector to_vector(const std::vector<double>& v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solve and analyze programs with complementarity constraints", "mpcc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("mpcc ") + kVersion);

  Overrides solve_ov;
  std::string solve_file, solve_trace;
  std::vector<double> solve_start;
  auto* solve = app.add_subcommand("solve", "Run the homotopy on a problem file");
  solve->add_option("problem", solve_file, "Problem file")->required();
  solve_ov.attach(solve, true);
  solve->add_option("--start", solve_start, "Start point (defaults to the file's start)");
  solve->add_option("--out", solve_trace, "Write the iteration trace CSV here");

  std::string an_file, an_mode = "enumerate";
  std::vector<double> an_point, an_traj;
  double an_t = 0.0;
  auto* analyze = app.add_subcommand("analyze", "Classify a point and report its indices");
  analyze->add_option("problem", an_file, "Problem file")->required();
  analyze->add_option("--point", an_point, "Point to analyze")->required();
  analyze->add_option("--t", an_t, "Analyze the point for D(t) instead of the MPCC");
  analyze->add_option("--trajectory", an_traj, "Solve D(t) for these t and check convergence against --point")
      ->delimiter(',');
  analyze->add_option("--mode", an_mode, "Disjunctive mode for --trajectory")->capture_default_str();

  Overrides bench_ov;
  std::string bench_dir, bench_out = "report.csv";
  std::vector<std::string> bench_regs{"disj", "ks", "scholtes"};
  int bench_repeats = 10;
  unsigned bench_workers = 0;
  auto* bench = app.add_subcommand("bench", "Run every regularization on a corpus directory");
  bench->add_option("corpus", bench_dir, "Directory of .mpcc files")->required();
  bench->add_option("--regs", bench_regs, "Comma separated regularizations")->delimiter(',');
  bench_ov.attach(bench, false);
  bench->add_option("--repeats", bench_repeats, "Timing repeats per run")->capture_default_str();
  bench->add_option("--workers", bench_workers, "Worker threads (0: all cores)")->capture_default_str();
  bench->add_option("--out", bench_out, "Report CSV path")->capture_default_str();

  std::string prof_in, prof_metric = "fbar", prof_out = "profile.csv", prof_script;
  auto* profile = app.add_subcommand("profile", "Performance profile from a report CSV");
  profile->add_option("report", prof_in, "Report CSV")->required();
  profile->add_option("--metric", prof_metric, "fbar or taubar")->capture_default_str();
  profile->add_option("--out", prof_out, "Profile CSV path")->capture_default_str();
  profile->add_option("--script", prof_script, "Plot script path (default: next to --out)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "mpcc " << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (solve->parsed()) {
      MpccProblem problem = load_problem(solve_file);
      HomotopyParams hp = solve_ov.params(solve_ov.reg);
      Vector x0 = solve_start.empty() ? problem.start : to_vector(solve_start);
      if (static_cast<std::size_t>(x0.size()) != problem.n)
        throw DimensionError("start has " + std::to_string(x0.size()) + " entries, problem has n = " +
                             std::to_string(problem.n));
      RunTrace trace = run_homotopy(problem, hp, x0);
      out << "problem=" << problem.name << " reg=" << to_string(hp.kind) << " termination=" << to_string(trace.reason)
          << "\n";
      out << "x=" << join(trace.x) << "\n";
      out << "f=" << num(trace.objective) << "\n";
      out << "maxvio=" << num(trace.maxvio) << "\n";
      out << "iterations=" << trace.entries.size() << " t_final=" << num(trace.entries.back().t) << "\n";
      if (!solve_trace.empty()) write_file(solve_trace, trace_csv(trace));
      return trace.reason == Termination::TargetMet ? 0 : 2;
    }

    if (analyze->parsed()) {
      MpccProblem problem = load_problem(an_file);
      Vector x = to_vector(an_point);
      if (static_cast<std::size_t>(x.size()) != problem.n)
        throw DimensionError("point has " + std::to_string(x.size()) + " entries, problem has n = " +
                             std::to_string(problem.n));
      try {
        if (!an_traj.empty()) {
          auto shared = std::make_shared<const MpccProblem>(problem);
          std::vector<double> ts = an_traj;
          std::sort(ts.rbegin(), ts.rend());
          std::vector<std::pair<double, DisjSolution>> runs;
          for (double t : ts) {
            if (!(t > 0)) throw ParameterError("trajectory parameters must be positive");
            runs.emplace_back(t, solve_disjunctive(disjunctive(shared, t), problem.start, {}, parse_disj_mode(an_mode)));
          }
          TrajectoryReport rep = trajectory_diagnostics(problem, runs, x);
          out << summary_line(rep.limit) << "\n" << to_text(rep);
          return 0;
        }
        IndexReport r;
        if (an_t > 0.0) {
          r = analyze_disj_point(disjunctive(problem, an_t), x);
        } else {
          r = analyze_mpcc_point(problem, x);
        }
        out << summary_line(r) << "\n" << to_text(r);
        return 0;
      } catch (const ClassificationRefused& e) {
        err << "classification refused: " << e.what() << " (violation " << num(e.violation()) << ")\n";
        return 2;
      }
    }

    if (bench->parsed()) {
      std::vector<HomotopyParams> params;
      for (const auto& r : bench_regs) params.push_back(bench_ov.params(r));
      auto corpus = load_corpus(bench_dir);
      SuiteOptions opts;
      opts.repeats = bench_repeats;
      opts.workers = bench_workers;
      BenchReport report = run_suite(corpus, params, opts);
      write_file(bench_out, report_csv(report));
      std::size_t met = 0;
      for (const auto& row : report.rows) met += row.status == "target-met";
      out << "wrote " << report.rows.size() << " rows to " << bench_out << " (" << met << " target-met)\n";
      return 0;
    }

    if (profile->parsed()) {
      BenchReport report = parse_report_csv(read_file(prof_in));
      Profile prof = profile_from_report(report, prof_metric);
      write_file(prof_out, profile_csv(prof));
      std::string script = prof_script;
      if (script.empty()) {
        auto dir = std::filesystem::path(prof_out).parent_path();
        script = (dir / "plot_profile.py").string();
      }
      write_file(script, profile_plot_script());
      out << "wrote " << prof_out << " and " << script << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mpcc

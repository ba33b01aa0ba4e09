#include "mpcc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "mpcc/errors.hpp"

namespace mpcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ParseError("bad number '" + s + "'", 0, 0);
  return v;
}

}  // namespace

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("corpus directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".mpcc") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> out;
  for (const auto& f : files) {
    CorpusEntry c;
    c.problem = load_problem(f.string());
    c.path = f.string();
    if (auto it = c.problem.metadata.find("optimum"); it != c.problem.metadata.end())
      c.optimum = parse_double(it->second);
    if (auto it = c.problem.metadata.find("source"); it != c.problem.metadata.end()) c.source = it->second;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> normalized_relative_error(const std::vector<double>& values) {
  std::vector<double> out(values.size(), kInf);
  if (values.empty()) return out;
  const double m = *std::min_element(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (m == kInf) {
      out[i] = kInf;
    } else if (m == 0.0) {
      out[i] = values[i] / kMachineEps;
    } else {
      out[i] = (values[i] - m) / std::abs(m);
    }
  }
  return out;
}

std::vector<double> relative_time(const std::vector<double>& times) { return normalized_relative_error(times); }

std::vector<std::vector<ProfilePoint>> performance_profile(const std::vector<std::vector<double>>& metric) {
  std::vector<double> taus{0.0};
  std::size_t regs = metric.empty() ? 0 : metric.front().size();
  for (const auto& row : metric)
    for (double v : row)
      if (std::isfinite(v)) taus.push_back(v);
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  std::vector<std::vector<ProfilePoint>> out(regs);
  const double problems = static_cast<double>(metric.size());
  for (std::size_t r = 0; r < regs; ++r) {
    for (double tau : taus) {
      std::size_t count = 0;
      for (const auto& row : metric)
        if (row[r] <= tau) ++count;
      out[r].push_back({tau, problems > 0 ? static_cast<double>(count) / problems : 0.0});
    }
  }
  return out;
}

void compute_metrics(BenchReport& report) {
  std::map<std::string, std::vector<std::size_t>> by_problem;
  for (std::size_t i = 0; i < report.rows.size(); ++i) by_problem[report.rows[i].problem].push_back(i);
  for (const auto& [name, idx] : by_problem) {
    std::vector<double> fs, ts;
    for (auto i : idx) {
      fs.push_back(report.rows[i].f);
      ts.push_back(report.rows[i].time_ms_avg);
    }
    auto fb = normalized_relative_error(fs);
    auto tb = relative_time(ts);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      report.rows[idx[k]].fbar = fb[k];
      report.rows[idx[k]].taubar = tb[k];
    }
  }
}

BenchReport run_suite(const std::vector<CorpusEntry>& corpus, const std::vector<HomotopyParams>& params,
                      const SuiteOptions& options) {
  if (corpus.empty()) throw ParameterError("corpus is empty");
  if (params.empty()) throw ParameterError("no regularizations given");
  for (const auto& p : params) p.validate();

  const std::size_t tasks = corpus.size() * params.size();
  BenchReport report;
  report.rows.resize(tasks);
  std::atomic<std::size_t> next{0};
  const int repeats = std::max(1, options.repeats);

  auto work = [&]() {
    for (std::size_t k = next++; k < tasks; k = next++) {
      const CorpusEntry& entry = corpus[k / params.size()];
      const HomotopyParams& hp = params[k % params.size()];
      BenchRow row;
      row.problem = entry.problem.name;
      row.reg = to_string(hp.kind);
      try {
        double total = 0.0;
        RunTrace trace;
        for (int r = 0; r < repeats; ++r) {
          trace = run_homotopy(entry.problem, hp);
          total += trace.millis;
        }
        row.status = to_string(trace.reason);
        row.maxvio = trace.maxvio;
        if (trace.maxvio <= hp.eps && std::isfinite(trace.objective)) {
          row.f = trace.objective;
          row.time_ms_avg = total / repeats;
        } else {
          row.f = kInf;
          row.time_ms_avg = kInf;
        }
      } catch (const std::exception&) {
        row.status = "error";
        row.f = row.time_ms_avg = kInf;
        row.maxvio = kInf;
      }
      report.rows[k] = row;
    }
  };

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  compute_metrics(report);
  return report;
}

std::string report_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "problem,reg,status,f,maxvio,time_ms_avg,fbar,taubar\n";
  for (const auto& r : report.rows)
    os << r.problem << "," << r.reg << "," << r.status << "," << num(r.f) << "," << num(r.maxvio) << ","
       << num(r.time_ms_avg) << "," << num(r.fbar) << "," << num(r.taubar) << "\n";
  return os.str();
}

BenchReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "problem,reg,status,f,maxvio,time_ms_avg,fbar,taubar")
    throw ParseError("missing report header", 1, 1);
  BenchReport report;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 8) throw ParseError("expected 8 columns", lineno, 1);
    BenchRow r;
    r.problem = cols[0];
    r.reg = cols[1];
    r.status = cols[2];
    try {
      r.f = parse_double(cols[3]);
      r.maxvio = parse_double(cols[4]);
      r.time_ms_avg = parse_double(cols[5]);
      r.fbar = parse_double(cols[6]);
      r.taubar = parse_double(cols[7]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno, 1);
    }
    report.rows.push_back(r);
  }
  return report;
}

Profile profile_from_report(const BenchReport& report, const std::string& metric) {
  if (metric != "fbar" && metric != "taubar") throw ParameterError("unknown metric '" + metric + "' (valid: fbar, taubar)");
  Profile prof;
  std::vector<std::string> problems;
  std::map<std::pair<std::string, std::string>, double> value;
  for (const auto& r : report.rows) {
    if (std::find(prof.regs.begin(), prof.regs.end(), r.reg) == prof.regs.end()) prof.regs.push_back(r.reg);
    if (std::find(problems.begin(), problems.end(), r.problem) == problems.end()) problems.push_back(r.problem);
    value[{r.problem, r.reg}] = metric == "fbar" ? r.fbar : r.taubar;
  }
  std::vector<std::vector<double>> m;
  for (const auto& p : problems) {
    std::vector<double> row;
    for (const auto& reg : prof.regs) {
      auto it = value.find({p, reg});
      row.push_back(it == value.end() ? kInf : it->second);
    }
    m.push_back(row);
  }
  prof.curves = performance_profile(m);
  return prof;
}

std::string profile_csv(const Profile& profile) {
  std::ostringstream os;
  os << "reg,tau,fraction\n";
  for (std::size_t r = 0; r < profile.regs.size(); ++r)
    for (const auto& pt : profile.curves[r]) os << profile.regs[r] << "," << num(pt.tau) << "," << num(pt.fraction) << "\n";
  return os.str();
}

std::string profile_plot_script() {
  return R"(#!/usr/bin/env python3
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

src = sys.argv[1] if len(sys.argv) > 1 else "profile.csv"
out = sys.argv[2] if len(sys.argv) > 2 else "profile.png"

curves = defaultdict(list)
with open(src) as fh:
    for row in csv.DictReader(fh):
        curves[row["reg"]].append((float(row["tau"]), float(row["fraction"])))

fig, ax = plt.subplots()
for reg, pts in curves.items():
    pts.sort()
    taus = [max(t, 1e-16) for t, _ in pts]
    ax.step(taus, [f for _, f in pts], where="post", label=reg)
ax.set_xscale("log")
ax.set_xlabel("tau")
ax.set_ylabel("fraction of problems")
ax.set_ylim(0, 1.05)
ax.legend()
fig.savefig(out, dpi=150)
)";
}

}  // namespace mpcc

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpcc/homotopy.hpp"

namespace mpcc {

inline constexpr double kMachineEps = 0x1p-52;

struct CorpusEntry {
  MpccProblem problem;
  std::optional<double> optimum;  // from `#@ optimum`
  std::string source;  // from `#@ source`
  std::string path;
};

/// Every *.mpcc file in dir, sorted by file name.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

/// Three-case normalized error per entry: min = 0 -> v / eps_M; min = inf -> inf; else (v - min) / |min|.
std::vector<double> normalized_relative_error(const std::vector<double>& values);
/// Same three-case formula applied to average times.
std::vector<double> relative_time(const std::vector<double>& times);

struct ProfilePoint {
  double tau = 0.0;
  double fraction = 0.0;
};

/// metric[p][r]: problem p, regularization r. Breakpoints are 0 and every finite metric value.
std::vector<std::vector<ProfilePoint>> performance_profile(const std::vector<std::vector<double>>& metric);

struct BenchRow {
  std::string problem;
  std::string reg;
  std::string status;
  double f = 0.0;
  double maxvio = 0.0;
  double time_ms_avg = 0.0;
  double fbar = 0.0;
  double taubar = 0.0;

  bool operator==(const BenchRow&) const = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  bool operator==(const BenchReport&) const = default;
};

struct SuiteOptions {
  int repeats = 10;
  /// Zero picks the hardware concurrency.
  unsigned workers = 0;
};

/// Rows ordered by corpus entry, then by the order of params. Throws ParameterError on empty inputs.
BenchReport run_suite(const std::vector<CorpusEntry>& corpus, const std::vector<HomotopyParams>& params,
                      const SuiteOptions& options = {});

/// Fills fbar and taubar per problem from f and time_ms_avg.
void compute_metrics(BenchReport& report);

/// Columns problem,reg,status,f,maxvio,time_ms_avg,fbar,taubar.
std::string report_csv(const BenchReport& report);
BenchReport parse_report_csv(const std::string& text);

struct Profile {
  std::vector<std::string> regs;
  std::vector<std::vector<ProfilePoint>> curves;
};

/// metric is "fbar" or "taubar".
Profile profile_from_report(const BenchReport& report, const std::string& metric);
/// Columns reg,tau,fraction.
std::string profile_csv(const Profile& profile);
/// Python script that plots a profile CSV given as its first argument.
std::string profile_plot_script();

}  // namespace mpcc

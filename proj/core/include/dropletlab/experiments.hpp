#pragma once

#include <map>
#include <string>
#include <vector>

#include "dropletlab/common.hpp"
#include "dropletlab/medium.hpp"

namespace dlab {

inline constexpr const char* version_string = "dropletlab 0.1.0";

/// Validated experiment configuration. Every number is checked against the
/// owning module's preconditions before any solve starts.
struct ExperimentConfig {
  std::string experiment = "selftest";

  int grid_n = 12;

  // resonance / droplet family
  int n0 = 0;
  double c_n0 = -0.25;
  double k0 = 1.0;
  double rho0 = 1.0;
  double kappa = pi * pi * pi;
  double h = 0.0;
  double lattice_margin = 0.0;
  std::vector<double> a_list = {0.125, 0.0625, 0.03125};

  // effective-amplitude / CGO sweeps
  std::vector<double> p_list = {4.0, 8.0, 16.0, 32.0};
  double sigma = 1.0;
  int L = 2;
  double omega = 1.0;  // background frequency for linearize / reconstruct

  MediumSpec medium{1.0, {CosTerm{0.2, {1, 1, 0}}, CosTerm{0.1, {0, 2, 1}}}};

  // ball spectrum
  int spectra_resolution = 320;
  int spectra_lmax = 4;
  int spectra_nradial = 6;

  int pairs = 6;
  int nvox = 10;
  std::string mode = "oracle";  // reconstruct: oracle | measurement
  int n_meas = 24;

  int threads = 1;
  bool no_cache = false;
  std::string out_dir = "out";

  std::string canonical_json() const;
  std::uint64_t config_hash() const;
};

/// Parse + validate. Unknown keys and out-of-contract values are rejected
/// with precise messages.
ExperimentConfig parse_config(const std::string& json_text);

struct RunResult {
  int status = 0;  // nonzero on any invariant failure
  std::vector<std::string> artifacts;
  std::map<std::string, double> residuals;
};

RunResult run_experiment(const ExperimentConfig& cfg);

/// RFC-4180 CSV writer with the project float-formatting rule.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  static std::string cell(double v) { return format_double(v); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string buffer_;
  void flush();
  bool flushed_ = false;
};

/// Long-format plot data: one file per figure equivalent, columns
/// (x, quantity, value).
void emit_plotdata(const std::string& path, const std::vector<std::string>& x,
                   const std::vector<std::string>& quantity, const std::vector<double>& value);

}  // namespace dlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracrk/discretize.hpp"
#include "fracrk/poles.hpp"

namespace fracrk::experiments {

// One sweep description, fully defaulted so a minimal config file works.
// Grids drive the Mittag-Leffler parameters; the function kind selects
// what the convergence study approximates.
struct SweepConfig {
  std::string operator_kind = "fd2d";  // fd2d | fem1d | fem2d
  int operator_size = 31;

  std::string function_kind = "ml";  // ml | powpos | powneg

  std::vector<double> alpha = {1.0};
  std::vector<double> beta = {1.0};
  std::vector<double> t = {1.5};
  std::vector<double> s = {0.75};

  std::vector<poles::Strategy> strategies = {poles::Strategy::zolotarev};
  int k_min = 1;
  int k_max = 25;

  // Overrides the operator's spectral bounds when present, so certificate
  // sweeps can run on a reference interval directly.
  std::optional<discretize::SpectralInterval> interval;

  std::string out_path;
  double safety = 1.0;
};

// Grid nonemptiness, parameter ranges, k range within [0, 60].  Throws
// std::invalid_argument naming the offending field.
void validate(const SweepConfig& cfg);

// INI-style file: [section] headers, key = value lines, '#' comments.
// Lists are space or comma separated; a:step:b expands to an inclusive
// range.  Unknown sections or keys are rejected with file:line context.
SweepConfig parse_config(const std::string& path);

// Each runner returns the finished CSV text (schema comment, header row,
// data rows).  Identical configs produce byte-identical output.
std::string run_paramstudy(const SweepConfig& cfg);
std::string run_convergence(const SweepConfig& cfg);
std::string run_certificates(const SweepConfig& cfg);

// Worker pool size: FRACRK_WORKERS when set (clamped to >= 1), otherwise
// the hardware concurrency.
int worker_count();

}  // namespace fracrk::experiments

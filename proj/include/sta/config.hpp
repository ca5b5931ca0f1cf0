#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sta/core.hpp"
#include "sta/oracle.hpp"

namespace sta {

/// Experiment configuration, read from a sectioned key = value text file
/// (nested tables, # comments). The schema is versioned; unknown keys are
/// rejected. Numeric fields are in the units declared in [units].
struct ExperimentConfig {
  int schema_version = 1;

  // [units]
  std::string unit_system = "natural";  // natural (hbar=m=1 scale) or cgs

  // [system]
  std::string potential = "free";  // free | harmonic | quartic
  double mass = 1.0;
  double hbar = 1.0;
  double omega = 0.0;
  double quartic_g = 0.0;
  double horizon = 0.125;

  // [state]
  double width = 1.0;
  double center = 0.0;
  double momentum = 0.0;

  // [coarse] either a single interval or a partition
  std::optional<double> interval_center;
  std::optional<double> interval_width;
  std::optional<double> partition_x_min;
  std::optional<double> partition_x_max;
  std::optional<int> partition_cells;

  // [grid]
  double grid_x_min = -12.0;
  double grid_x_max = 12.0;
  int grid_n = 2048;

  // [plan]
  int n_slices = 256;
  bool richardson = true;
  std::optional<double> evo_x_min;
  std::optional<double> evo_x_max;
  std::optional<int> evo_n;

  // [kquad]
  double k_max = 0.0;
  double kq_rel_tol = 1e-7;
  int kq_initial_panels = 96;
  int kq_max_panels = 2048;
  int kq_slices_at_kmax = 1024;

  // [sweep]
  std::vector<double> sweep_hbar;
  std::vector<double> sweep_delta;

  // [output]
  std::string output_prefix = "run";

  SystemParams make_params() const;
  SystemParams make_params(double hbar_override) const;
  GaussianState make_state() const;
  GridSpec make_grid() const;
  oracle::PotentialSpec make_potential() const;
  oracle::EvolutionPlan make_plan() const;
  oracle::KQuadSpec make_kquad() const;
  Interval make_interval() const;  // throws if [coarse] lacks an interval
  Partition make_partition() const;

  std::string serialize() const;        // canonical round-trip form
  uint64_t hash() const;                // FNV-1a of the canonical form
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace sta

#pragma once

// Equivariance-error experiments and the built-in verification suites.

#include <iosfwd>
#include <string>
#include <vector>

#include "steerkit/conv.hpp"
#include "steerkit/filters.hpp"
#include "steerkit/layers.hpp"

namespace steerkit {

struct ScanConfig {
  int dim = 2;
  int cutoff = 4;
  int n_r = 2;
  int n_a = 16;
  double h = 2.0;
  /// Filter kinds to compare; `interp` in JSON may be a single name or a list.
  std::vector<FilterKind> filters{FilterKind::linear, FilterKind::cartesian};
  Quadrature quadrature = Quadrature::uniform;
  std::vector<std::int64_t> input_shape{16, 16};
  int angle_count = 72;
  /// Rotation axes for dim 3 ("y", "z"); dim 2 always uses "z".
  std::vector<std::string> axes{"z"};
  std::uint64_t seed = 0;
  int seeds = 1;
  int channels = 1;
  std::string output;

  void validate() const;
};

ScanConfig parse_scan_config(const std::string& json_text);
ScanConfig load_scan_config(const std::string& path);

/// conv_first -> normalize -> conv_higher -> flatten_invariant on a
/// zero-padded canvas large enough that every rotation of the input and all
/// nonzero activations stay inside the valid region. The single-layer
/// variant reads out energy_invariant(conv_first(f)).
struct Model {
  int dim = 2;
  Box canvas;
  KernelBank first;
  KernelBank higher;
  bool single_layer = false;

  std::vector<double> operator()(const ScalarGridField& f) const;
};

Box scan_canvas(int dim, const std::vector<std::int64_t>& input_shape, double h, int layers);
Model build_model(const ScanConfig& cfg, FilterKind kind, std::uint64_t seed, bool single_layer = false);
/// Gaussian input of cfg.input_shape centred in `canvas`.
ScalarGridField scan_input(const ScanConfig& cfg, const Box& canvas, std::uint64_t seed);

/// Rotation about the canvas centre; axis is "z" or "y" in 3D.
RigidMotion centre_rotation(const Box& canvas, double angle, const std::string& axis);
/// f rotated by `angle` (linear resampling onto the same canvas).
ScalarGridField rotate_input(const ScalarGridField& f, double angle, const std::string& axis);

/// |M(R f) - M(f)|_inf / |f|_1.
double equivariance_error(const Model& model, const ScalarGridField& f, double angle,
                          const std::string& axis);

struct ScanRow {
  double angle_deg;
  std::string axis;
  FilterKind filter;
  std::uint64_t seed;
  double error;
};

std::vector<ScanRow> scan(const ScanConfig& cfg);
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);

struct RateRow {
  int n_a;
  FilterKind filter;
  std::uint64_t seed;
  double error;
};

/// Single-layer model error at a fixed rotation for every n_a.
std::vector<RateRow> rate_study(const ScanConfig& cfg, const std::vector<int>& n_a_list,
                                double angle_deg = 30.0);
void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows);
/// Least-squares slope of log(mean error) against log(n_a) for one filter.
double rate_slope(const std::vector<RateRow>& rows, FilterKind filter);

struct CheckResult {
  std::string suite;
  std::string name;
  double residual;
  double tolerance;
  bool passed;
};

struct VerifyOptions {
  /// Negative control: perturbs the relative phase of one CG block.
  bool corrupt_cg = false;
};

/// Suites: all, cg, sht, steer, delta, oracle.
std::vector<CheckResult> verify(const std::string& suite, const VerifyOptions& options = {});
void print_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace steerkit

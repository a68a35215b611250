#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "steerkit/conv.hpp"
#include "steerkit/harness.hpp"
#include "steerkit/parallel.hpp"

using namespace steerkit;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw Error("bad integer list: " + s);
    out.push_back(v);
  }
  if (out.empty()) throw Error("empty integer list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SE(d)-steerable convolution with interpolation filter bases"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0: hardware default)");

  BasisParams bp;
  std::string interp = "linear", quadrature = "uniform", layer = "first", basis_out;
  auto* precompute = app.add_subcommand("precompute", "build a filter basis (STFB1)");
  precompute->add_option("--dim", bp.dim)->required()->check(CLI::IsMember({2, 3}));
  precompute->add_option("--cutoff", bp.cutoff)->required()->check(CLI::NonNegativeNumber);
  precompute->add_option("--radial", bp.n_r)->required()->check(CLI::PositiveNumber);
  precompute->add_option("--angular", bp.n_a)->required()->check(CLI::Range(2, 4096));
  precompute->add_option("--radius", bp.h)->required()->check(CLI::PositiveNumber);
  precompute->add_option("--interp", interp)->check(CLI::IsMember({"nearest", "linear", "cartesian"}));
  precompute->add_option("--quadrature", quadrature)->check(CLI::IsMember({"uniform", "dh"}));
  precompute->add_option("--layer", layer)->required()->check(CLI::IsMember({"first", "higher"}));
  precompute->add_option("--out", basis_out)->required();

  std::string w_filters, w_out;
  int w_in = 1, w_channels = 1;
  std::uint64_t w_seed = 0;
  auto* weights = app.add_subcommand("weights", "draw Gaussian weights for a basis (STFW1)");
  weights->add_option("--filters", w_filters)->required();
  weights->add_option("--in-channels", w_in)->check(CLI::PositiveNumber);
  weights->add_option("--out-channels", w_channels)->check(CLI::PositiveNumber);
  weights->add_option("--seed", w_seed);
  weights->add_option("--out", w_out)->required();

  std::string shape_arg, i_out;
  std::uint64_t i_seed = 0;
  auto* input = app.add_subcommand("input", "write a Gaussian scalar field (STFD1)");
  input->add_option("--shape", shape_arg, "comma-separated extents, e.g. 16,16")->required();
  input->add_option("--seed", i_seed);
  input->add_option("--out", i_out)->required();

  std::string c_filters, c_weights, c_input, c_out;
  auto* convolve = app.add_subcommand("convolve", "apply one steerable convolution");
  convolve->add_option("--filters", c_filters)->required();
  convolve->add_option("--weights", c_weights)->required();
  convolve->add_option("--input", c_input)->required();
  convolve->add_option("--out", c_out)->required();

  std::string s_config, s_out;
  auto* scan_cmd = app.add_subcommand("scan", "equivariance error over rotation angles");
  scan_cmd->add_option("--config", s_config)->required();
  scan_cmd->add_option("--out", s_out, "CSV path (default: config output)");

  std::string r_config, r_out, r_na = "8,16,32,64";
  double r_angle = 30.0;
  auto* rate = app.add_subcommand("rate", "single-layer error against n_a");
  rate->add_option("--config", r_config)->required();
  rate->add_option("--na", r_na);
  rate->add_option("--angle", r_angle, "rotation in degrees");
  rate->add_option("--out", r_out)->required();

  std::string suite = "all";
  bool corrupt = false;
  auto* check = app.add_subcommand("check", "run the verification suites");
  check->add_option("--suite", suite)->check(CLI::IsMember({"all", "cg", "sht", "steer", "delta", "oracle"}));
  check->add_flag("--corrupt-cg", corrupt, "perturb one CG block (negative control)");

  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  try {
    if (*precompute) {
      bp.kind = parse_filter_kind(interp);
      bp.quadrature = quadrature == "dh" ? Quadrature::driscoll_healy : Quadrature::uniform;
      save_basis(basis_out, build_basis(bp, layer == "first" ? LayerKind::first : LayerKind::higher));
    } else if (*weights) {
      save_weights(w_out, random_weights(load_basis(w_filters), w_in, w_channels, w_seed));
    } else if (*input) {
      Box box;
      for (int n : parse_int_list(shape_arg)) {
        if (n < 1) throw Error("shape extents must be positive");
        box.origin.push_back(0);
        box.shape.push_back(n);
      }
      ScalarGridField f = ScalarGridField::zeros(box);
      std::mt19937_64 rng(i_seed);
      std::normal_distribution<double> g;
      for (auto& v : f.values) v = g(rng);
      save_field(i_out, to_steerable(f));
    } else if (*convolve) {
      const FilterBasis basis = load_basis(c_filters);
      const KernelBank bank = assemble(basis, load_weights(c_weights));
      const SteerableField f = load_field(c_input);
      save_field(c_out, basis.layer == LayerKind::first ? conv_first(f, bank) : conv_higher(f, bank));
    } else if (*scan_cmd) {
      const ScanConfig cfg = load_scan_config(s_config);
      const std::string path = s_out.empty() ? cfg.output : s_out;
      if (path.empty()) throw Error("scan: no output path");
      std::ostringstream csv;
      write_scan_csv(csv, scan(cfg));
      write_text(path, csv.str());
    } else if (*rate) {
      const ScanConfig cfg = load_scan_config(r_config);
      const auto rows = rate_study(cfg, parse_int_list(r_na), r_angle);
      std::ostringstream csv;
      write_rate_csv(csv, rows);
      write_text(r_out, csv.str());
      for (FilterKind k : cfg.filters) std::cout << to_string(k) << " slope " << rate_slope(rows, k) << '\n';
    } else if (*check) {
      const auto results = verify(suite, {corrupt});
      print_report(std::cout, results);
      for (const auto& r : results)
        if (!r.passed) return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "steerkit: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

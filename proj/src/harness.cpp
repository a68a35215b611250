#include "steerkit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "steerkit/parallel.hpp"

namespace steerkit {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + tag + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BasisParams params_of(const ScanConfig& cfg, FilterKind kind) {
  BasisParams p;
  p.dim = cfg.dim;
  p.cutoff = cfg.cutoff;
  p.n_r = cfg.n_r;
  p.n_a = cfg.n_a;
  p.h = cfg.h;
  p.kind = kind;
  p.quadrature = kind == FilterKind::cartesian ? Quadrature::uniform : cfg.quadrature;
  if (kind == FilterKind::cartesian) p.taus = default_taus(cfg.dim, cfg.n_r);
  return p;
}

struct Bases {
  FilterBasis first;
  FilterBasis higher;
};

Bases make_bases(const ScanConfig& cfg, FilterKind kind, bool single_layer) {
  const BasisParams p = params_of(cfg, kind);
  Bases b{build_basis(p, LayerKind::first), {}};
  if (!single_layer) b.higher = build_basis(p, LayerKind::higher);
  return b;
}

Model model_from(const ScanConfig& cfg, const Bases& b, std::uint64_t seed, bool single_layer) {
  Model m;
  m.dim = cfg.dim;
  m.single_layer = single_layer;
  m.canvas = scan_canvas(cfg.dim, cfg.input_shape, cfg.h, single_layer ? 1 : 2);
  m.first = assemble(b.first, random_weights(b.first, 1, cfg.channels, mix(seed, 1)));
  if (!single_layer)
    m.higher = assemble(b.higher, random_weights(b.higher, cfg.channels, cfg.channels, mix(seed, 2)));
  return m;
}

Box input_region(const ScanConfig& cfg, const Box& canvas) {
  Box r;
  for (int k = 0; k < cfg.dim; ++k) {
    r.origin.push_back(canvas.origin[k] + (canvas.shape[k] - cfg.input_shape[k]) / 2);
    r.shape.push_back(cfg.input_shape[k]);
  }
  return r;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

FilterKind kind_from_json(const nlohmann::json& j) { return parse_filter_kind(j.get<std::string>()); }

}  // namespace

void ScanConfig::validate() const {
  if (dim != 2 && dim != 3) throw Error("scan config: dim must be 2 or 3");
  if (cutoff < 0 || n_r < 1 || n_a < 2 || !(h > 0)) throw Error("scan config: bad basis parameters");
  if (filters.empty()) throw Error("scan config: no filter kinds");
  if (static_cast<int>(input_shape.size()) != dim) throw Error("scan config: input_shape must have dim entries");
  const auto reach = static_cast<std::int64_t>(std::ceil(h)) + 1;
  for (auto s : input_shape)
    if (s < 2 * (2 * reach + 1)) throw Error("scan config: input_shape must be at least twice the footprint");
  if (angle_count < 1) throw Error("scan config: angle_count must be >= 1");
  if (seeds < 1 || channels < 1) throw Error("scan config: seeds and channels must be positive");
  for (const auto& a : axes) {
    if (a != "y" && a != "z") throw Error("scan config: axis must be y or z");
    if (dim == 2 && a != "z") throw Error("scan config: 2D scans rotate about z");
  }
}

ScanConfig parse_scan_config(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.is_object()) throw Error("scan config: expected a JSON object");
  ScanConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "dim") c.dim = v.get<int>();
    else if (key == "cutoff") c.cutoff = v.get<int>();
    else if (key == "n_r") c.n_r = v.get<int>();
    else if (key == "n_a") c.n_a = v.get<int>();
    else if (key == "h") c.h = v.get<double>();
    else if (key == "interp" || key == "filters") {
      c.filters.clear();
      if (v.is_array())
        for (const auto& e : v) c.filters.push_back(kind_from_json(e));
      else
        c.filters.push_back(kind_from_json(v));
    } else if (key == "quadrature") {
      const auto q = v.get<std::string>();
      if (q == "uniform") c.quadrature = Quadrature::uniform;
      else if (q == "dh") c.quadrature = Quadrature::driscoll_healy;
      else throw Error("scan config: unknown quadrature " + q);
    } else if (key == "input_shape") c.input_shape = v.get<std::vector<std::int64_t>>();
    else if (key == "angle_count") c.angle_count = v.get<int>();
    else if (key == "axis" || key == "axes") {
      c.axes.clear();
      if (v.is_array())
        for (const auto& e : v) c.axes.push_back(e.get<std::string>());
      else
        c.axes.push_back(v.get<std::string>());
    } else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "seeds") c.seeds = v.get<int>();
    else if (key == "channels") c.channels = v.get<int>();
    else if (key == "output") c.output = v.get<std::string>();
    else throw Error("scan config: unknown key " + key);
  }
  if (!j.contains("input_shape")) c.input_shape.assign(c.dim, 16);
  if (!j.contains("axis") && !j.contains("axes") && c.dim == 3) c.axes = {"y", "z"};
  c.validate();
  return c;
}

ScanConfig load_scan_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scan_config(ss.str());
}

std::vector<double> Model::operator()(const ScalarGridField& f) const {
  if (single_layer) return energy_invariant(conv_first(f, first));
  return flatten_invariant(conv_higher(normalize(conv_first(f, first)), higher));
}

Box scan_canvas(int dim, const std::vector<std::int64_t>& input_shape, double h, int layers) {
  double sq = 0.0;
  for (auto s : input_shape) sq += static_cast<double>(s * s);
  const auto reach = static_cast<std::int64_t>(std::ceil(h)) + 1;
  // Rotated input radius plus one, then two footprint reaches per layer.
  const auto half = static_cast<std::int64_t>(std::ceil(0.5 * std::sqrt(sq) + 1.0)) + 2 * layers * reach;
  Box b;
  for (int k = 0; k < dim; ++k) {
    b.origin.push_back(0);
    b.shape.push_back(2 * half + (input_shape[k] % 2));
  }
  return b;
}

Model build_model(const ScanConfig& cfg, FilterKind kind, std::uint64_t seed, bool single_layer) {
  return model_from(cfg, make_bases(cfg, kind, single_layer), seed, single_layer);
}

ScalarGridField scan_input(const ScanConfig& cfg, const Box& canvas, std::uint64_t seed) {
  ScalarGridField f = ScalarGridField::zeros(canvas);
  const Box region = input_region(cfg, canvas);
  std::mt19937_64 rng(mix(seed, 3));
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < region.sites(); ++i) f.values[canvas.index(region.point(i))] = g(rng);
  return f;
}

RigidMotion centre_rotation(const Box& canvas, double angle, const std::string& axis) {
  const int d = canvas.dim();
  RMat r;
  if (d == 2) r = rot2(angle);
  else if (d == 3 && axis == "z") r = rot_z(angle);
  else if (d == 3 && axis == "y") r = rot_y(angle);
  else throw Error("centre_rotation: unsupported axis " + axis);
  RVec c(d);
  for (int k = 0; k < d; ++k) c(k) = canvas.origin[k] + 0.5 * static_cast<double>(canvas.shape[k] - 1);
  return RigidMotion::from_matrix(r, c - r * c);
}

ScalarGridField rotate_input(const ScalarGridField& f, double angle, const std::string& axis) {
  // g(x) = f(R^{-1}(x - c) + c).
  const RigidMotion m = se_inverse(centre_rotation(f.box, angle, axis));
  return resample(f, {InterpKind::linear, f.dim()}, m, f.box);
}

double equivariance_error(const Model& model, const ScalarGridField& f, double angle, const std::string& axis) {
  const double l1 = f.l1_norm();
  if (l1 == 0.0) throw Error("equivariance_error: zero input");
  if (angle == 0.0) return 0.0;
  return max_diff(model(rotate_input(f, angle, axis)), model(f)) / l1;
}

std::vector<ScanRow> scan(const ScanConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> axes = cfg.dim == 2 ? std::vector<std::string>{"z"} : cfg.axes;
  std::vector<ScanRow> rows;
  for (FilterKind kind : cfg.filters) {
    const Bases bases = make_bases(cfg, kind, false);
    for (int s = 0; s < cfg.seeds; ++s) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
      const Model model = model_from(cfg, bases, seed, false);
      const ScalarGridField f = scan_input(cfg, model.canvas, seed);
      const std::vector<double> base = model(f);
      const double l1 = f.l1_norm();
      const std::size_t first = rows.size();
      for (const auto& axis : axes)
        for (int a = 0; a < cfg.angle_count; ++a)
          rows.push_back({360.0 * a / cfg.angle_count, axis, kind, seed, 0.0});
      parallel_for(rows.size() - first, [&](std::size_t i) {
        ScanRow& row = rows[first + i];
        if (row.angle_deg == 0.0) return;
        const auto out = model(rotate_input(f, row.angle_deg * kPi / 180.0, row.axis));
        row.error = max_diff(out, base) / l1;
      });
    }
  }
  return rows;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "angle_deg,axis,filter,seed,error\n";
  out << std::setprecision(17);
  for (const auto& r : rows)
    out << r.angle_deg << ',' << r.axis << ',' << to_string(r.filter) << ',' << r.seed << ',' << r.error << '\n';
}

std::vector<RateRow> rate_study(const ScanConfig& cfg, const std::vector<int>& n_a_list, double angle_deg) {
  cfg.validate();
  const std::string axis = "z";
  std::vector<RateRow> rows;
  for (FilterKind kind : cfg.filters)
    for (int s = 0; s < cfg.seeds; ++s)
      for (int n_a : n_a_list) rows.push_back({n_a, kind, cfg.seed + static_cast<std::uint64_t>(s), 0.0});
  parallel_for(rows.size(), [&](std::size_t i) {
    RateRow& row = rows[i];
    ScanConfig c = cfg;
    c.n_a = row.n_a;
    const Model model = build_model(c, row.filter, row.seed, true);
    const ScalarGridField f = scan_input(c, model.canvas, row.seed);
    row.error = equivariance_error(model, f, angle_deg * kPi / 180.0, axis);
  });
  return rows;
}

void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  out << "n_a,filter,seed,error\n";
  out << std::setprecision(17);
  for (const auto& r : rows) out << r.n_a << ',' << to_string(r.filter) << ',' << r.seed << ',' << r.error << '\n';
}

double rate_slope(const std::vector<RateRow>& rows, FilterKind filter) {
  std::vector<int> grid;
  for (const auto& r : rows)
    if (r.filter == filter && std::find(grid.begin(), grid.end(), r.n_a) == grid.end()) grid.push_back(r.n_a);
  if (grid.size() < 2) throw Error("rate_slope: need at least two n_a values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n : grid) {
    double sum = 0;
    int count = 0;
    for (const auto& r : rows)
      if (r.filter == filter && r.n_a == n) {
        sum += r.error;
        ++count;
      }
    const double x = std::log(static_cast<double>(n)), y = std::log(sum / count);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(grid.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

void print_report(std::ostream& out, const std::vector<CheckResult>& results) {
  out << std::scientific << std::setprecision(3);
  for (const auto& r : results)
    out << (r.passed ? "PASS " : "FAIL ") << r.suite << '.' << r.name << "  residual=" << r.residual
        << "  tolerance=" << r.tolerance << '\n';
  out << std::defaultfloat;
}

}  // namespace steerkit

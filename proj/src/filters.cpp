#include "steerkit/filters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "steerkit/io.hpp"
#include "steerkit/parallel.hpp"

namespace steerkit {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

void validate(const BasisParams& p) {
  if (p.dim < 2) throw Error("filter basis: dim must be >= 2");
  if (p.cutoff < 0) throw Error("filter basis: negative cutoff");
  if (p.n_r < 1) throw Error("filter basis: n_r must be >= 1");
  if (p.n_a < 2) throw Error("filter basis: n_a must be >= 2");
  if (!(p.h > 0)) throw Error("filter basis: h must be positive");
  if (p.kind == FilterKind::cartesian && static_cast<int>(p.taus.size()) != p.n_r)
    throw Error("filter basis: need one tau per shell");
}

InterpKernelSpec kernel_of(const BasisParams& p) {
  if (p.kind == FilterKind::cartesian) throw Error("Cartesian bases have no interpolation kernel");
  return {p.kind == FilterKind::nearest ? InterpKind::nearest : InterpKind::linear, p.dim};
}

CMat cartesian_shell(const BasisParams& p, int r, int degree, const Box& footprint) {
  const int dr = IrrepId::make(p.dim, degree).irrep_dim;
  CMat out = CMat::Zero(static_cast<Eigen::Index>(footprint.sites()), dr);
  const double radius = r * p.h / p.n_r;
  const double tau = p.taus[r - 1];
  for (std::size_t i = 0; i < footprint.sites(); ++i) {
    const Lattice y = footprint.point(i);
    RVec v(p.dim);
    for (int k = 0; k < p.dim; ++k) v(k) = static_cast<double>(y[k]);
    const double norm = v.norm();
    if (norm == 0.0) continue;
    const double radial = std::exp(-(norm - radius) * (norm - radius) / (2 * tau * tau));
    out.row(static_cast<Eigen::Index>(i)) = radial * harmonic_at(p.dim, degree, v / norm).transpose();
  }
  return out;
}

CMat shell(const BasisParams& p, int r, int degree, const Box& footprint) {
  return p.kind == FilterKind::cartesian ? cartesian_shell(p, r, degree, footprint)
                                         : first_layer_shell(p, r, degree, footprint);
}

FilterBasis make_first(const BasisParams& p) {
  validate(p);
  FilterBasis b{p, LayerKind::first, filter_footprint(p.dim, p.h), {}, {}};
  for (int l : degree_set(p.cutoff)) b.keys.push_back({l, 0, l});
  const std::size_t nk = b.keys.size();
  b.table.assign(p.n_r, std::vector<std::vector<CMat>>(nk));
  parallel_for(p.n_r * nk, [&](std::size_t job) {
    const int r = static_cast<int>(job / nk) + 1;
    const std::size_t key = job % nk;
    const CMat s = shell(p, r, b.keys[key][0], b.footprint);
    auto& slot = b.table[r - 1][key];
    slot.reserve(b.footprint.sites());
    for (Eigen::Index y = 0; y < s.rows(); ++y) slot.push_back(s.row(y).transpose());
  });
  return b;
}

FilterBasis make_higher(const BasisParams& p, const CGTable& cg) {
  validate(p);
  if (cg.dim() != p.dim) throw Error("filter basis: CG table dimension mismatch");
  const bool cartesian = p.kind == FilterKind::cartesian;
  FilterBasis b{p, LayerKind::higher, filter_footprint(p.dim, p.h), {}, {}};
  const auto degrees = degree_set(p.cutoff);
  for (int l : degrees)
    for (int l1 : degrees) {
      if (p.dim == 2) {
        const int l2 = cartesian ? l - l1 : mod(l - l1, p.n_a);
        if (!cg.get(l, l1, l2)) throw Error("filter basis: missing CG block");
        b.keys.push_back({l, l1, l2});
      } else {
        for (int l2 : degrees)
          if (cg.get(l, l1, l2)) b.keys.push_back({l, l1, l2});
      }
    }

  std::vector<int> needed;
  for (const auto& k : b.keys)
    if (std::find(needed.begin(), needed.end(), k[2]) == needed.end()) needed.push_back(k[2]);
  std::sort(needed.begin(), needed.end());
  std::vector<std::vector<CMat>> shells(p.n_r, std::vector<CMat>(needed.size()));
  parallel_for(p.n_r * needed.size(), [&](std::size_t job) {
    const int r = static_cast<int>(job / needed.size()) + 1;
    const std::size_t j = job % needed.size();
    shells[r - 1][j] = shell(p, r, needed[j], b.footprint);
  });

  const double scale = cartesian ? 1.0 : 1.0 / static_cast<double>(degrees.size());
  const std::size_t nk = b.keys.size();
  b.table.assign(p.n_r, std::vector<std::vector<CMat>>(nk));
  parallel_for(p.n_r * nk, [&](std::size_t job) {
    const int r = static_cast<int>(job / nk) + 1;
    const std::size_t key = job % nk;
    const auto& [l, l1, l2] = b.keys[key];
    const CGBlock& block = *cg.get(l, l1, l2);
    const auto j = std::find(needed.begin(), needed.end(), l2) - needed.begin();
    const CMat& m2 = shells[r - 1][j];
    auto& slot = b.table[r - 1][key];
    slot.reserve(b.footprint.sites());
    for (Eigen::Index y = 0; y < m2.rows(); ++y) {
      CMat mt(block.rho.irrep_dim, block.rho1.irrep_dim);
      for (int m = 0; m < block.rho.irrep_dim; ++m) mt.row(m) = scale * (m2.row(y) * block.tilde[m]);
      slot.push_back(std::move(mt));
    }
  });
  return b;
}

void write_header(ByteWriter& w, const char* magic, const BasisParams& p, LayerKind layer) {
  w.magic(magic);
  w.u32(static_cast<std::uint32_t>(p.dim));
  w.u32(static_cast<std::uint32_t>(p.cutoff));
  w.u32(static_cast<std::uint32_t>(p.n_r));
  w.u32(static_cast<std::uint32_t>(p.n_a));
  w.f64(p.h);
  w.u8(static_cast<std::uint8_t>(p.kind));
  w.u8(static_cast<std::uint8_t>(layer));
  w.u8(static_cast<std::uint8_t>(p.quadrature));
  if (p.kind == FilterKind::cartesian) {
    w.u32(static_cast<std::uint32_t>(p.taus.size()));
    for (double t : p.taus) w.f64(t);
  }
}

void write_keys(ByteWriter& w, const std::vector<DegreeTriple>& keys) {
  w.u32(static_cast<std::uint32_t>(keys.size()));
  for (const auto& k : keys)
    for (int v : k) w.i32(v);
}

std::vector<DegreeTriple> read_keys(ByteReader& r) {
  std::vector<DegreeTriple> keys(r.u32());
  for (auto& k : keys)
    for (int& v : k) v = r.i32();
  return keys;
}

void append_hash(ByteWriter& w) {
  const auto digest = sha256(w.bytes().data(), w.bytes().size());
  w.raw({digest.begin(), digest.end()});
}

void check_hash(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 32) throw Error("truncated input");
  const auto digest = sha256(bytes.data(), bytes.size() - 32);
  if (!std::equal(digest.begin(), digest.end(), bytes.end() - 32)) throw Error("content hash mismatch");
}

}  // namespace

const char* to_string(FilterKind k) {
  switch (k) {
    case FilterKind::nearest: return "nearest";
    case FilterKind::linear: return "linear";
    case FilterKind::cartesian: return "cartesian";
  }
  return "?";
}

FilterKind parse_filter_kind(const std::string& s) {
  if (s == "nearest") return FilterKind::nearest;
  if (s == "linear") return FilterKind::linear;
  if (s == "cartesian") return FilterKind::cartesian;
  throw Error("unknown filter kind: " + s);
}

std::vector<double> default_taus(int dim, int n_r) {
  std::vector<double> t(n_r, 0.6);
  if (dim == 2) t.back() = 0.4;
  return t;
}

Box filter_footprint(int dim, double h) {
  const auto reach = static_cast<std::int64_t>(std::ceil(h)) + 1;
  return {Lattice(dim, -reach), std::vector<std::int64_t>(dim, 2 * reach + 1)};
}

std::vector<int> degree_set(int cutoff) {
  std::vector<int> d;
  for (int l = 0; l <= cutoff; ++l) d.push_back(l);
  return d;
}

CMat first_layer_shell(const BasisParams& p, int r, int degree, const Box& offsets) {
  const auto spec = kernel_of(p);
  const auto grid = AngularGrid::make(p.dim, p.n_a, p.quadrature);
  const auto table = harmonic_table(grid, degree);
  const double radius = r * p.h / p.n_r;
  const double pref = std::pow(r, p.dim - 1) / (std::pow(p.n_r, p.dim) * std::pow(p.n_a, p.dim - 1));
  CMat out = CMat::Zero(static_cast<Eigen::Index>(offsets.sites()), table.values.cols());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RVec x = snap_to_lattice(radius * sphere_point(grid.nodes[i], p.dim));
    for (const auto& e : footprint(spec, x)) {
      if (!offsets.contains(e.y)) throw Error("filter basis: sample outside footprint");
      out.row(static_cast<Eigen::Index>(offsets.index(e.y))) +=
          (pref * grid.weights[i] * e.weight) * table.values.row(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

FilterBasis basis_first(const BasisParams& p) {
  if (p.kind == FilterKind::cartesian) throw Error("basis_first: use basis_cartesian");
  return make_first(p);
}

FilterBasis basis_higher(const BasisParams& p, const CGTable& cg) {
  if (p.kind == FilterKind::cartesian) throw Error("basis_higher: use basis_cartesian");
  return make_higher(p, cg);
}

FilterBasis basis_cartesian(const BasisParams& p, LayerKind layer, const CGTable* cg) {
  if (p.kind != FilterKind::cartesian) throw Error("basis_cartesian: kind must be cartesian");
  if (layer == LayerKind::first) return make_first(p);
  if (cg) return make_higher(p, *cg);
  return make_higher(p, CGTable(p.dim));
}

FilterBasis build_basis(const BasisParams& params, LayerKind layer) {
  BasisParams p = params;
  if (p.kind == FilterKind::cartesian && p.taus.empty()) p.taus = default_taus(p.dim, p.n_r);
  if (p.kind == FilterKind::cartesian) return basis_cartesian(p, layer);
  if (layer == LayerKind::first) return basis_first(p);
  return basis_higher(p, CGTable(p.dim, p.dim == 2 ? p.n_a : 0));
}

WeightSet WeightSet::zeros(const FilterBasis& basis, int in_channels, int out_channels) {
  if (in_channels < 1 || out_channels < 1) throw Error("weights: channel counts must be positive");
  WeightSet w{basis.layer, basis.params.dim, basis.params.n_r, in_channels, out_channels, basis.keys, {}};
  w.values.assign(static_cast<std::size_t>(w.n_r) * w.keys.size() * in_channels * out_channels, cplx{});
  return w;
}

WeightSet random_weights(const FilterBasis& basis, int in_channels, int out_channels,
                         std::uint64_t seed) {
  WeightSet w = WeightSet::zeros(basis, in_channels, out_channels);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (auto& v : w.values) {
    const double re = g(rng);
    v = cplx(re, g(rng));
  }
  return w;
}

KernelBank assemble(const FilterBasis& basis, const WeightSet& weights) {
  if (weights.keys != basis.keys || weights.n_r != basis.params.n_r || weights.layer != basis.layer ||
      weights.dim != basis.params.dim)
    throw Error("assemble: weights do not match the basis");
  const int dim = basis.params.dim;
  KernelBank bank{dim, basis.footprint, weights.in_channels, weights.out_channels, {}};
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t k = 0; k < basis.keys.size(); ++k) {
    const int l = basis.keys[k][0];
    const int l1 = basis.layer == LayerKind::first ? 0 : basis.keys[k][1];
    std::size_t e = 0;
    while (e < bank.entries.size() &&
           !(bank.entries[e].rho.degree == l && bank.entries[e].rho1.degree == l1))
      ++e;
    if (e == bank.entries.size()) {
      bank.entries.push_back({IrrepId::make(dim, l), IrrepId::make(dim, l1), {}});
      members.emplace_back();
    }
    members[e].push_back(k);
  }
  const std::size_t ny = basis.offsets();
  const int out = weights.out_channels, in = weights.in_channels;
  parallel_for(bank.entries.size(), [&](std::size_t e) {
    auto& entry = bank.entries[e];
    entry.k.assign(ny * out * in, CMat::Zero(entry.rho.irrep_dim, entry.rho1.irrep_dim));
    for (std::size_t y = 0; y < ny; ++y)
      for (int o = 0; o < out; ++o)
        for (int i = 0; i < in; ++i) {
          CMat& acc = entry.k[(y * out + o) * in + i];
          for (int r = 1; r <= basis.params.n_r; ++r)
            for (std::size_t key : members[e]) acc += weights.at(r, key, o, i) * basis.at(r, key, y);
        }
  });
  return bank;
}

std::vector<std::uint8_t> encode_basis(const FilterBasis& b) {
  ByteWriter w;
  write_header(w, "STFB1", b.params, b.layer);
  w.u32(static_cast<std::uint32_t>(b.offsets()));
  for (std::size_t i = 0; i < b.offsets(); ++i)
    for (auto c : b.footprint.point(i)) w.i64(c);
  write_keys(w, b.keys);
  for (const auto& shell : b.table)
    for (const auto& key : shell)
      for (const auto& m : key)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          for (Eigen::Index j = 0; j < m.cols(); ++j) w.c128(m(i, j));
  append_hash(w);
  return w.bytes();
}

FilterBasis decode_basis(const std::vector<std::uint8_t>& bytes) {
  check_hash(bytes);
  ByteReader r(bytes, bytes.size() - 32);
  r.expect_magic("STFB1");
  FilterBasis b;
  BasisParams& p = b.params;
  p.dim = static_cast<int>(r.u32());
  p.cutoff = static_cast<int>(r.u32());
  p.n_r = static_cast<int>(r.u32());
  p.n_a = static_cast<int>(r.u32());
  p.h = r.f64();
  const auto kind = r.u8(), layer = r.u8(), quad = r.u8();
  if (kind > 2 || layer > 1 || quad > 1) throw Error("STFB1: bad enum value");
  p.kind = static_cast<FilterKind>(kind);
  b.layer = static_cast<LayerKind>(layer);
  p.quadrature = static_cast<Quadrature>(quad);
  if (p.kind == FilterKind::cartesian) {
    p.taus.resize(r.u32());
    for (double& t : p.taus) t = r.f64();
  }
  validate(p);
  b.footprint = filter_footprint(p.dim, p.h);
  if (r.u32() != b.offsets()) throw Error("STFB1: offset count mismatch");
  for (std::size_t i = 0; i < b.offsets(); ++i)
    for (auto c : b.footprint.point(i))
      if (r.i64() != c) throw Error("STFB1: offset list mismatch");
  b.keys = read_keys(r);
  b.table.assign(p.n_r, std::vector<std::vector<CMat>>(b.keys.size()));
  for (auto& shell : b.table)
    for (std::size_t k = 0; k < b.keys.size(); ++k) {
      const int rows = IrrepId::make(p.dim, b.keys[k][0]).irrep_dim;
      const int cols = b.layer == LayerKind::first ? 1 : IrrepId::make(p.dim, b.keys[k][1]).irrep_dim;
      shell[k].resize(b.offsets());
      for (auto& m : shell[k]) {
        m.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
          for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r.c128();
      }
    }
  if (!r.at_end()) throw Error("STFB1: trailing bytes");
  return b;
}

void save_basis(const std::string& path, const FilterBasis& b) { write_file(path, encode_basis(b)); }
FilterBasis load_basis(const std::string& path) { return decode_basis(read_file(path)); }

std::vector<std::uint8_t> encode_weights(const WeightSet& ws) {
  ByteWriter w;
  w.magic("STFW1");
  w.u32(static_cast<std::uint32_t>(ws.dim));
  w.u8(static_cast<std::uint8_t>(ws.layer));
  w.u32(static_cast<std::uint32_t>(ws.n_r));
  w.u32(static_cast<std::uint32_t>(ws.in_channels));
  w.u32(static_cast<std::uint32_t>(ws.out_channels));
  write_keys(w, ws.keys);
  for (cplx v : ws.values) w.c128(v);
  append_hash(w);
  return w.bytes();
}

WeightSet decode_weights(const std::vector<std::uint8_t>& bytes) {
  check_hash(bytes);
  ByteReader r(bytes, bytes.size() - 32);
  r.expect_magic("STFW1");
  WeightSet ws;
  ws.dim = static_cast<int>(r.u32());
  const auto layer = r.u8();
  if (layer > 1) throw Error("STFW1: bad layer kind");
  ws.layer = static_cast<LayerKind>(layer);
  ws.n_r = static_cast<int>(r.u32());
  ws.in_channels = static_cast<int>(r.u32());
  ws.out_channels = static_cast<int>(r.u32());
  if (ws.n_r < 1 || ws.in_channels < 1 || ws.out_channels < 1) throw Error("STFW1: bad shape");
  ws.keys = read_keys(r);
  ws.values.resize(static_cast<std::size_t>(ws.n_r) * ws.keys.size() * ws.in_channels * ws.out_channels);
  for (auto& v : ws.values) v = r.c128();
  if (!r.at_end()) throw Error("STFW1: trailing bytes");
  return ws;
}

void save_weights(const std::string& path, const WeightSet& w) { write_file(path, encode_weights(w)); }
WeightSet load_weights(const std::string& path) { return decode_weights(read_file(path)); }

}  // namespace steerkit

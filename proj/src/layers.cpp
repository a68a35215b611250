#include "steerkit/layers.hpp"

#include <cmath>
#include <random>

#include "steerkit/parallel.hpp"

namespace steerkit {

std::vector<DegreeTriple> nonlinearity_keys(const SteerableField& f, const CGTable& cg) {
  std::vector<DegreeTriple> keys;
  for (const auto& b : f.blocks)
    for (const auto& b1 : f.blocks)
      for (const auto& b2 : f.blocks)
        if (cg.get(b.irrep.degree, b1.irrep.degree, b2.irrep.degree))
          keys.push_back({b.irrep.degree, b1.irrep.degree, b2.irrep.degree});
  return keys;
}

NonlinearityWeights random_nonlinearity(const SteerableField& f, const CGTable& cg, std::uint64_t seed) {
  NonlinearityWeights w{nonlinearity_keys(f, cg), {}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (std::size_t i = 0; i < w.keys.size(); ++i) {
    const double re = g(rng);
    w.eta.emplace_back(re, g(rng));
  }
  return w;
}

SteerableField cg_nonlinearity(const SteerableField& f, const NonlinearityWeights& w, const CGTable& cg) {
  if (w.keys.size() != w.eta.size()) throw Error("cg_nonlinearity: eta shape mismatch");
  if (cg.dim() != f.dim()) throw Error("cg_nonlinearity: CG table dimension mismatch");
  SteerableField out{f.box, {}};
  for (const auto& b : f.blocks) out.add_block(b.irrep, b.channels);
  struct Term {
    const CGBlock* block;
    const FieldBlock* a;
    const FieldBlock* b;
    cplx eta;
  };
  std::vector<std::vector<Term>> terms(out.blocks.size());
  for (std::size_t k = 0; k < w.keys.size(); ++k) {
    const auto& [l, l1, l2] = w.keys[k];
    const CGBlock* block = cg.get(l, l1, l2);
    const FieldBlock* a = f.find(l1);
    const FieldBlock* b = f.find(l2);
    FieldBlock* dst = out.find(l);
    if (!block || !a || !b || !dst) throw Error("cg_nonlinearity: eta key does not match the field");
    terms[static_cast<std::size_t>(dst - out.blocks.data())].push_back({block, a, b, w.eta[k]});
  }
  for (std::size_t k = 0; k < out.blocks.size(); ++k) {
    FieldBlock& dst = out.blocks[k];
    const int channels = dst.channels;
    parallel_for(f.box.sites(), [&](std::size_t site) {
      for (const Term& t : terms[k]) {
        const int d1 = t.a->irrep.irrep_dim, d2 = t.b->irrep.irrep_dim;
        for (int c = 0; c < channels; ++c)
          for (int m = 0; m < dst.irrep.irrep_dim; ++m) {
            cplx s{};
            for (int i1 = 0; i1 < d1; ++i1)
              for (int i2 = 0; i2 < d2; ++i2)
                s += std::conj(t.block->matrix(i1 * d2 + i2, m)) * t.a->values[t.a->offset(site, i1, c)] *
                     t.b->values[t.b->offset(site, i2, c)];
            dst.values[dst.offset(site, m, c)] += t.eta * s;
          }
      }
    });
  }
  return out;
}

SteerableField normalize(const SteerableField& f, double eps) {
  SteerableField out = f;
  if (f.blocks.empty()) return out;
  const int channels = f.blocks[0].channels;
  for (const auto& b : f.blocks)
    if (b.channels != channels) throw Error("normalize: blocks disagree on channel count");
  parallel_for(f.box.sites(), [&](std::size_t site) {
    for (int c = 0; c < channels; ++c) {
      double sq = 0.0;
      for (const auto& b : f.blocks)
        for (int m = 0; m < b.irrep.irrep_dim; ++m) sq += std::norm(b.values[b.offset(site, m, c)]);
      const double norm = std::sqrt(sq);
      if (norm < eps) continue;
      for (auto& b : out.blocks)
        for (int m = 0; m < b.irrep.irrep_dim; ++m) b.values[b.offset(site, m, c)] /= norm;
    }
  });
  return out;
}

SteerableField avg_pool(const SteerableField& f, const std::vector<std::int64_t>& window) {
  const int dim = f.dim();
  if (static_cast<int>(window.size()) != dim) throw Error("avg_pool: window dimension mismatch");
  Box box;
  for (int k = 0; k < dim; ++k) {
    if (window[k] < 1 || f.box.shape[k] % window[k] != 0) throw Error("avg_pool: window must divide the shape");
    box.origin.push_back(f.box.origin[k]);
    box.shape.push_back(f.box.shape[k] / window[k]);
  }
  Box cell{Lattice(dim, 0), window};
  const double inv = 1.0 / static_cast<double>(cell.sites());
  SteerableField out{box, {}};
  for (const auto& b : f.blocks) out.add_block(b.irrep, b.channels);
  for (std::size_t k = 0; k < f.blocks.size(); ++k) {
    const FieldBlock& src = f.blocks[k];
    FieldBlock& dst = out.blocks[k];
    const std::size_t width = static_cast<std::size_t>(src.irrep.irrep_dim) * src.channels;
    parallel_for(box.sites(), [&](std::size_t site) {
      const Lattice q = box.point(site);
      Lattice p(dim);
      for (std::size_t j = 0; j < cell.sites(); ++j) {
        const Lattice u = cell.point(j);
        for (int a = 0; a < dim; ++a) p[a] = f.box.origin[a] + (q[a] - box.origin[a]) * window[a] + u[a];
        const cplx* s = &src.values[f.box.index(p) * width];
        for (std::size_t v = 0; v < width; ++v) dst.values[site * width + v] += s[v];
      }
      for (std::size_t v = 0; v < width; ++v) dst.values[site * width + v] *= inv;
    });
  }
  return out;
}

std::vector<double> flatten_invariant(const SteerableField& f) {
  if (f.blocks.empty() || f.box.sites() == 0) throw Error("flatten_invariant: empty field");
  const int channels = f.blocks[0].channels;
  const double inv = 1.0 / static_cast<double>(f.box.sites());
  std::vector<double> out(channels, 0.0);
  for (const auto& b : f.blocks) {
    if (b.channels != channels) throw Error("flatten_invariant: blocks disagree on channel count");
    for (int c = 0; c < channels; ++c)
      for (int m = 0; m < b.irrep.irrep_dim; ++m) {
        cplx s{};
        for (std::size_t site = 0; site < f.box.sites(); ++site) s += b.values[b.offset(site, m, c)];
        out[c] += std::norm(s * inv);
      }
  }
  for (double& v : out) v = std::sqrt(v);
  return out;
}

std::vector<double> energy_invariant(const SteerableField& f) {
  std::vector<double> out;
  for (const auto& b : f.blocks) {
    std::vector<double> sq(b.channels, 0.0);
    for (std::size_t i = 0; i < b.values.size(); ++i) sq[i % b.channels] += std::norm(b.values[i]);
    for (double v : sq) out.push_back(std::sqrt(v));
  }
  return out;
}

}  // namespace steerkit

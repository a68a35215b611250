#include "steerkit/conv.hpp"

#include <cmath>

#include "steerkit/parallel.hpp"

namespace steerkit {

namespace {

struct Route {
  std::size_t entry;
  const FieldBlock* input;
  std::vector<cplx> packed;  ///< [y][o][i][m][j]
};

inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

SteerableField correlate(const SteerableField& in, const KernelBank& kernels) {
  if (in.dim() != kernels.dim) throw Error("conv: dimension mismatch");
  for (const auto& b : in.blocks) {
    if (b.channels != kernels.in_channels) throw Error("conv: input channel mismatch");
    bool used = false;
    for (const auto& e : kernels.entries) used = used || e.rho1 == b.irrep;
    if (!used) throw Error("conv: no kernel accepts input degree " + std::to_string(b.irrep.degree));
  }
  SteerableField out{valid_box(in.box, kernels.footprint), {}};
  std::vector<std::vector<Route>> routes;
  for (std::size_t e = 0; e < kernels.entries.size(); ++e) {
    const auto& entry = kernels.entries[e];
    const FieldBlock* src = in.find(entry.rho1.degree);
    if (!src) continue;
    FieldBlock* dst = out.find(entry.rho.degree);
    if (!dst) {
      out.add_block(entry.rho, kernels.out_channels);
      routes.emplace_back();
      dst = &out.blocks.back();
    }
    routes[static_cast<std::size_t>(dst - out.blocks.data())].push_back({e, src, {}});
  }

  const int dim = in.dim();
  const std::size_t ny = kernels.footprint.sites();
  const int n_out = kernels.out_channels, n_in = kernels.in_channels;
  // Row-major strides turn x + y into a base index plus a fixed shift.
  std::vector<std::int64_t> stride(dim, 1);
  for (int k = dim - 2; k >= 0; --k) stride[k] = stride[k + 1] * in.box.shape[k + 1];
  std::vector<std::int64_t> shift(ny, 0);
  for (std::size_t y = 0; y < ny; ++y) {
    const Lattice off = kernels.footprint.point(y);
    for (int k = 0; k < dim; ++k) shift[y] += off[k] * stride[k];
  }

  for (auto& block_routes : routes)
    for (Route& route : block_routes) {
      const auto& entry = kernels.entries[route.entry];
      const int dr = entry.rho.irrep_dim, d1 = entry.rho1.irrep_dim;
      route.packed.reserve(ny * n_out * n_in * dr * d1);
      for (std::size_t y = 0; y < ny; ++y)
        for (int o = 0; o < n_out; ++o)
          for (int i = 0; i < n_in; ++i) {
            const CMat& k = kernels.at(route.entry, y, o, i);
            for (int m = 0; m < dr; ++m)
              for (int j = 0; j < d1; ++j) route.packed.push_back(k(m, j));
          }
    }

  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    FieldBlock& dst = out.blocks[b];
    const int dr = dst.irrep.irrep_dim;
    parallel_for(out.box.sites(), [&](std::size_t site) {
      const Lattice x = out.box.point(site);
      const auto base = static_cast<std::int64_t>(in.box.index(x));
      cplx* acc = &dst.values[dst.offset(site, 0, 0)];
      for (const Route& route : routes[b]) {
        const FieldBlock& src = *route.input;
        const int d1 = src.irrep.irrep_dim;
        const std::int64_t site_len = d1 * n_in;
        const cplx* f0 = &src.values[src.offset(static_cast<std::size_t>(base), 0, 0)];
        const cplx* k = route.packed.data();
        if (dr == 1 && site_len == 1 && n_out == 1) {
          cplx s{};
          for (std::size_t y = 0; y < ny; ++y) s += mul(k[y], f0[shift[y]]);
          acc[0] += s;
          continue;
        }
        for (std::size_t y = 0; y < ny; ++y) {
          const cplx* f = f0 + shift[y] * site_len;
          for (int o = 0; o < n_out; ++o)
            for (int i = 0; i < n_in; ++i, k += dr * d1)
              for (int m = 0; m < dr; ++m) {
                cplx s{};
                for (int j = 0; j < d1; ++j) s += mul(k[m * d1 + j], f[j * n_in + i]);
                acc[m * n_out + o] += s;
              }
        }
      }
    });
  }
  return out;
}

}  // namespace

Box valid_box(const Box& in, const Box& footprint) {
  if (in.dim() != footprint.dim()) throw Error("conv: dimension mismatch");
  Box out;
  for (int k = 0; k < in.dim(); ++k) {
    const std::int64_t lo = footprint.origin[k], hi = footprint.origin[k] + footprint.shape[k] - 1;
    const std::int64_t shape = in.shape[k] - (hi - lo);
    if (shape <= 0) throw Error("conv: input smaller than the filter footprint");
    out.origin.push_back(in.origin[k] - lo);
    out.shape.push_back(shape);
  }
  return out;
}

SteerableField conv_first(const ScalarGridField& in, const KernelBank& kernels) {
  return conv_first(to_steerable(in), kernels);
}

SteerableField conv_first(const SteerableField& in, const KernelBank& kernels) {
  if (in.blocks.size() != 1 || in.blocks[0].irrep.degree != 0)
    throw Error("conv_first: input must be a scalar field");
  for (const auto& e : kernels.entries)
    if (e.rho1.degree != 0) throw Error("conv_first: kernels are not first-layer kernels");
  return correlate(in, kernels);
}

SteerableField conv_higher(const SteerableField& in, const KernelBank& kernels) {
  return correlate(in, kernels);
}

double oracle_rescale(const BasisParams& p) {
  return 2.0 * std::pow(kPi, p.dim - 1) * std::pow(p.h, p.dim) / harmonic_dims(p.dim, 0).area;
}

SteerableField conv_oracle_first(const ScalarGridField& in, const BasisParams& p,
                                 const WeightSet& weights) {
  if (p.kind == FilterKind::cartesian) throw Error("oracle: Cartesian filters have no Fourier path");
  if (weights.layer != LayerKind::first || weights.in_channels != 1)
    throw Error("oracle: expects single-channel first-layer weights");
  const Box footprint = filter_footprint(p.dim, p.h);
  const Box box = valid_box(in.box, footprint);
  const auto grid = AngularGrid::make(p.dim, p.n_a, p.quadrature);
  if (box.sites() * grid.size() * static_cast<std::size_t>(p.n_r) > 50'000'000)
    throw Error("oracle: instance too large");
  const InterpKernelSpec spec{p.kind == FilterKind::nearest ? InterpKind::nearest : InterpKind::linear,
                              p.dim};
  const auto degrees = degree_set(p.cutoff);
  if (weights.keys.size() != degrees.size()) throw Error("oracle: weight shape mismatch");

  SteerableField out{box, {}};
  for (int l : degrees) out.add_block(IrrepId::make(p.dim, l), weights.out_channels);
  const double dr = p.h / p.n_r;
  parallel_for(box.sites(), [&](std::size_t site) {
    const Lattice x = box.point(site);
    RVec origin(p.dim);
    for (int k = 0; k < p.dim; ++k) origin(k) = static_cast<double>(x[k]);
    for (int r = 1; r <= p.n_r; ++r) {
      const double radius = r * dr;
      std::vector<cplx> patch(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        patch[i] = interp_eval(in, spec, origin + snap_to_lattice(radius * sphere_point(grid.nodes[i], p.dim)));
      const Spectrum s = sht(patch, p.cutoff, grid);
      const double radial = dr * std::pow(radius, p.dim - 1);
      for (std::size_t k = 0; k < degrees.size(); ++k) {
        const CVec& c = *s.find(degrees[k]);
        FieldBlock& blk = out.blocks[k];
        for (int o = 0; o < weights.out_channels; ++o) {
          const cplx w = weights.at(r, k, o, 0);
          for (int m = 0; m < blk.irrep.irrep_dim; ++m) blk.values[blk.offset(site, m, o)] += radial * w * c(m);
        }
      }
    }
  });
  return out;
}

}  // namespace steerkit

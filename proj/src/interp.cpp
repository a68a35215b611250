#include "steerkit/interp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "steerkit/parallel.hpp"

namespace steerkit {

namespace {

void check_dim(const InterpKernelSpec& spec, Eigen::Index n) {
  if (spec.dim != n) throw Error("interpolation: dimension mismatch");
}

}  // namespace

RVec snap_to_lattice(RVec x, double tol) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = std::round(x(i));
    if (std::abs(x(i) - r) < tol) x(i) = r;
  }
  return x;
}

double kernel_weight(const InterpKernelSpec& spec, const RVec& x, const Lattice& y) {
  check_dim(spec, x.size());
  double w = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double yi = static_cast<double>(y[i]);
    if (spec.kind == InterpKind::nearest) {
      if (std::floor(x(i) + 0.5) != yi) return 0.0;
    } else {
      w *= std::max(0.0, 1.0 - std::abs(x(i) - yi));
    }
  }
  return w;
}

std::vector<FootprintEntry> footprint(const InterpKernelSpec& spec, const RVec& x) {
  check_dim(spec, x.size());
  const int d = spec.dim;
  if (spec.kind == InterpKind::nearest) {
    Lattice y(d);
    for (int i = 0; i < d; ++i) y[i] = static_cast<std::int64_t>(std::floor(x(i) + 0.5));
    return {{std::move(y), 1.0}};
  }
  Lattice base(d);
  std::vector<double> frac(d);
  for (int i = 0; i < d; ++i) {
    const double f = std::floor(x(i));
    base[i] = static_cast<std::int64_t>(f);
    frac[i] = x(i) - f;
  }
  std::vector<FootprintEntry> out;
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    Lattice y = base;
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const bool up = (corner >> (d - 1 - i)) & 1u;
      y[i] += up ? 1 : 0;
      w *= up ? frac[i] : 1.0 - frac[i];
    }
    if (w != 0.0) out.push_back({std::move(y), w});
  }
  return out;
}

cplx interp_eval(const ScalarGridField& f, const InterpKernelSpec& spec, const RVec& x) {
  cplx v{};
  for (const auto& e : footprint(spec, x)) v += e.weight * f.at(e.y);
  return v;
}

ScalarGridField resample(const ScalarGridField& f, const InterpKernelSpec& spec,
                         const RigidMotion& motion, std::optional<Box> out) {
  const int d = f.dim();
  check_dim(spec, d);
  if (motion.dim() != d) throw Error("resample: motion dimension mismatch");
  if (!out) {
    // Preimage x = R^T (p - t) of the input box corners.
    RVec lo = RVec::Constant(d, std::numeric_limits<double>::infinity());
    RVec hi = -lo;
    for (unsigned corner = 0; corner < (1u << d); ++corner) {
      RVec p(d);
      for (int i = 0; i < d; ++i)
        p(i) = static_cast<double>(f.box.origin[i] + (((corner >> i) & 1u) ? f.box.shape[i] - 1 : 0));
      const RVec x = motion.rotation().transpose() * (p - motion.t());
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    Box b;
    for (int i = 0; i < d; ++i) {
      const auto a = static_cast<std::int64_t>(std::floor(lo(i) - 1e-9)) - 1;
      const auto c = static_cast<std::int64_t>(std::ceil(hi(i) + 1e-9)) + 1;
      b.origin.push_back(a);
      b.shape.push_back(c - a + 1);
    }
    out = std::move(b);
  }
  ScalarGridField g = ScalarGridField::zeros(*out);
  parallel_for(g.values.size(), [&](std::size_t i) {
    const Lattice p = g.box.point(i);
    RVec x(d);
    for (int k = 0; k < d; ++k) x(k) = static_cast<double>(p[k]);
    g.values[i] = interp_eval(f, spec, snap_to_lattice(motion.apply(x)));
  });
  return g;
}

double delta(const InterpKernelSpec& spec, const RigidMotion& motion, int box_radius, int refinement) {
  const int d = spec.dim;
  if (motion.dim() != d) throw Error("delta: motion dimension mismatch");
  if (box_radius < spec.footprint_radius()) throw Error("delta: box radius below footprint");
  if (refinement < 1) throw Error("delta: refinement must be positive");
  const bool translation_only = motion.rotation().isIdentity(0.0);
  const int cells = translation_only ? 1 : 2 * box_radius;
  const int lo = translation_only ? 0 : -box_radius;
  const int per_axis = cells * refinement;
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(per_axis);

  std::vector<double> worst(count, 0.0);
  parallel_for(count, [&](std::size_t idx) {
    RVec x(d);
    std::size_t rest = idx;
    for (int i = d - 1; i >= 0; --i) {
      x(i) = lo + static_cast<double>(rest % per_axis) / refinement;
      rest /= per_axis;
    }
    std::map<Lattice, double> diff;
    for (const auto& e : footprint(spec, snap_to_lattice(motion.apply(x)))) diff[e.y] += e.weight;
    for (const auto& z : footprint(spec, x)) {
      RVec zr(d);
      for (int i = 0; i < d; ++i) zr(i) = static_cast<double>(z.y[i]);
      for (const auto& e : footprint(spec, snap_to_lattice(motion.apply(zr))))
        diff[e.y] -= z.weight * e.weight;
    }
    double m = 0.0;
    for (const auto& [y, v] : diff) m = std::max(m, std::abs(v));
    worst[idx] = m;
  });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace steerkit

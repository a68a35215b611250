#include "steerkit/field.hpp"

#include <cmath>

#include "steerkit/io.hpp"

namespace steerkit {

std::size_t Box::sites() const {
  std::size_t n = 1;
  for (auto s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

bool Box::contains(const Lattice& p) const {
  for (std::size_t i = 0; i < origin.size(); ++i)
    if (p[i] < origin[i] || p[i] >= origin[i] + shape[i]) return false;
  return true;
}

std::size_t Box::index(const Lattice& p) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < origin.size(); ++i)
    idx = idx * static_cast<std::size_t>(shape[i]) + static_cast<std::size_t>(p[i] - origin[i]);
  return idx;
}

Lattice Box::point(std::size_t index) const {
  Lattice p(origin.size());
  for (std::size_t i = origin.size(); i-- > 0;) {
    const auto s = static_cast<std::size_t>(shape[i]);
    p[i] = origin[i] + static_cast<std::int64_t>(index % s);
    index /= s;
  }
  return p;
}

ScalarGridField ScalarGridField::zeros(Box box) {
  ScalarGridField f{std::move(box), {}};
  f.values.assign(f.box.sites(), cplx{});
  return f;
}

cplx ScalarGridField::at(const Lattice& p) const {
  return box.contains(p) ? values[box.index(p)] : cplx{};
}

double ScalarGridField::l1_norm() const {
  double s = 0.0;
  for (cplx v : values) s += std::abs(v);
  return s;
}

std::size_t SteerableField::add_block(IrrepId irrep, int channels) {
  FieldBlock b{irrep, channels, {}};
  b.values.assign(box.sites() * irrep.irrep_dim * channels, cplx{});
  blocks.push_back(std::move(b));
  return blocks.size() - 1;
}

const FieldBlock* SteerableField::find(int degree) const {
  for (const auto& b : blocks)
    if (b.irrep.degree == degree) return &b;
  return nullptr;
}

FieldBlock* SteerableField::find(int degree) {
  for (auto& b : blocks)
    if (b.irrep.degree == degree) return &b;
  return nullptr;
}

std::vector<cplx> SteerableField::flat() const {
  std::vector<cplx> out;
  for (const auto& b : blocks) out.insert(out.end(), b.values.begin(), b.values.end());
  return out;
}

SteerableField to_steerable(const ScalarGridField& f) {
  SteerableField out{f.box, {}};
  out.blocks.push_back({IrrepId::make(f.dim(), 0), 1, f.values});
  return out;
}

ScalarGridField to_scalar(const SteerableField& f) {
  if (f.blocks.size() != 1 || f.blocks[0].irrep.degree != 0 || f.blocks[0].channels != 1)
    throw Error("field is not scalar");
  return {f.box, f.blocks[0].values};
}

std::vector<std::uint8_t> encode_field(const SteerableField& f) {
  ByteWriter w;
  w.magic("STFD1");
  w.u32(static_cast<std::uint32_t>(f.dim()));
  for (auto o : f.box.origin) w.i64(o);
  for (auto s : f.box.shape) w.u64(static_cast<std::uint64_t>(s));
  w.u32(static_cast<std::uint32_t>(f.blocks.size()));
  for (const auto& b : f.blocks) {
    w.i32(b.irrep.degree);
    w.u32(static_cast<std::uint32_t>(b.irrep.irrep_dim));
    w.u32(static_cast<std::uint32_t>(b.channels));
  }
  for (const auto& b : f.blocks)
    for (cplx v : b.values) w.c128(v);
  return w.bytes();
}

SteerableField decode_field(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_magic("STFD1");
  const int dim = static_cast<int>(r.u32());
  if (dim < 2 || dim > 8) throw Error("STFD1: unsupported dimension");
  SteerableField f;
  f.box.origin.resize(dim);
  f.box.shape.resize(dim);
  for (auto& o : f.box.origin) o = r.i64();
  for (auto& s : f.box.shape) {
    s = static_cast<std::int64_t>(r.u64());
    if (s <= 0) throw Error("STFD1: nonpositive shape");
  }
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const int degree = r.i32();
    const int irrep_dim = static_cast<int>(r.u32());
    const int channels = static_cast<int>(r.u32());
    const IrrepId id = IrrepId::make(dim, degree);
    if (id.irrep_dim != irrep_dim) throw Error("STFD1: irrep dimension mismatch");
    if (channels <= 0) throw Error("STFD1: nonpositive channel count");
    f.add_block(id, channels);
  }
  for (auto& b : f.blocks)
    for (auto& v : b.values) v = r.c128();
  if (!r.at_end()) throw Error("STFD1: trailing bytes");
  return f;
}

void save_field(const std::string& path, const SteerableField& f) { write_file(path, encode_field(f)); }

SteerableField load_field(const std::string& path) { return decode_field(read_file(path)); }

}  // namespace steerkit

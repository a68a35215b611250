#pragma once

// Finite-support lattice fields and the STFD1 file format.

#include <string>
#include <vector>

#include "steerkit/common.hpp"
#include "steerkit/group.hpp"

namespace steerkit {

/// Axis-aligned lattice box; sites are enumerated row-major (last axis fastest).
struct Box {
  Lattice origin;
  std::vector<std::int64_t> shape;

  int dim() const { return static_cast<int>(origin.size()); }
  std::size_t sites() const;
  bool contains(const Lattice& p) const;
  std::size_t index(const Lattice& p) const;
  Lattice point(std::size_t index) const;
  friend bool operator==(const Box&, const Box&) = default;
};

/// Scalar field on Z^d, zero outside its box.
struct ScalarGridField {
  Box box;
  std::vector<cplx> values;

  static ScalarGridField zeros(Box box);
  int dim() const { return box.dim(); }
  cplx at(const Lattice& p) const;
  double l1_norm() const;
};

/// One irrep component of a steerable field, values indexed (site, m, channel).
struct FieldBlock {
  IrrepId irrep;
  int channels = 1;
  std::vector<cplx> values;

  std::size_t offset(std::size_t site, int m, int channel) const {
    return (site * irrep.irrep_dim + m) * channels + channel;
  }
};

struct SteerableField {
  Box box;
  std::vector<FieldBlock> blocks;

  int dim() const { return box.dim(); }
  /// Adds a zero block; returns its position.
  std::size_t add_block(IrrepId irrep, int channels);
  const FieldBlock* find(int degree) const;
  FieldBlock* find(int degree);
  /// All values with the field's block order and layout.
  std::vector<cplx> flat() const;
};

SteerableField to_steerable(const ScalarGridField& f);
/// Requires a single degree-0 block with one channel.
ScalarGridField to_scalar(const SteerableField& f);

std::vector<std::uint8_t> encode_field(const SteerableField& f);
SteerableField decode_field(const std::vector<std::uint8_t>& bytes);
void save_field(const std::string& path, const SteerableField& f);
SteerableField load_field(const std::string& path);

}  // namespace steerkit

#pragma once

#include <filesystem>

#include "cfrg/lattice.hpp"

namespace cfrg {

/// Binary field dump.  Header: magic "CFRG", version u32, n u32, L f64,
/// component count u32 (1 scalar / 6 symmetric tensor); then little-endian
/// f64 values in storage order (x1 fastest, tensors component-major).
void dump_field(const ScalarField& f, const std::filesystem::path& path);
void dump_field(const SymTensorField& f, const std::filesystem::path& path);

ScalarField load_scalar_field(const std::filesystem::path& path);
SymTensorField load_tensor_field(const std::filesystem::path& path);

/// CSV export of the plane x3 = index i3: first line "plane,<i3>", then n rows
/// of n comma-separated values (row i2, column i1).
void write_csv_slice(const ScalarField& f, int i3, const std::filesystem::path& path);

} // namespace cfrg

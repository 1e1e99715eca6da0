#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

// Binary field dumps: `<name>.bin` holds little-endian doubles (f64) or
// interleaved real/imaginary pairs (c128), row-major with the leading
// component axes first; `<name>.json` is the sidecar header
// {name, shape, axes, dtype, ambient, n, points, symmetry}.

void write_field(const std::filesystem::path& dir, const std::string& name, const ScalarField& f);
void write_vector(const std::filesystem::path& dir, const std::string& name,
                  const std::vector<ScalarField>& components);
void write_matrix(const std::filesystem::path& dir, const std::string& name, const MatrixField& m);

ScalarField read_field(const std::filesystem::path& dir, const std::string& name);
std::vector<ScalarField> read_vector(const std::filesystem::path& dir, const std::string& name);
MatrixField read_matrix(const std::filesystem::path& dir, const std::string& name);

/// Real parts along `axis` through the grid centre, as "x,value[,imag]" rows.
void write_slice_csv(const std::filesystem::path& path, const ScalarField& f, int axis);

/// Reads a whole text file; io error when it cannot be opened.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace s2hess

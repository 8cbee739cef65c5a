#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "netexplain/tensor.hpp"

namespace netexplain {

// Restricted NPY v1.0 reader/writer: little-endian <f4 / <f8, C order only.

/// Parses an in-memory .npy image.
///
/// Errors: FormatError (magic, version, header dict), UnsupportedLayout
/// (fortran_order True), UnsupportedDtype (anything but <f4/<f8),
/// TruncatedFile (payload shorter or longer than the shape implies),
/// ValueError (NaN/Inf payload).
Tensor parse_npy(std::span<const std::byte> bytes);

/// Serializes to NPY v1.0. The preamble is space padded to a multiple of 64
/// bytes and ends in '\n'. Output is a pure function of (t, dtype).
/// Throws RangeError when a value does not fit in float32.
std::vector<std::byte> write_npy(const Tensor& t, DType dtype);

Tensor read_npy_file(const std::filesystem::path& path);
void write_npy_file(const std::filesystem::path& path, const Tensor& t,
                    DType dtype);

}  // namespace netexplain

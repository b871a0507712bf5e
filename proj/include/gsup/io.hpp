#pragma once

#include <filesystem>
#include <iosfwd>

#include "gsup/reduce.hpp"
#include "gsup/types.hpp"

namespace gsup::io {

enum class MatrixFormat { csv, raw };

/// ".csv" -> csv, anything else -> raw.
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Header row f0,...,f{p-1}, then one row per point in shortest round-trip decimal.
void write_csv(const std::filesystem::path& path, const DataMatrix& m);
DataMatrix read_csv(const std::filesystem::path& path);

/// "GSUP", u32 version, u64 n, u64 p, then n*p little-endian doubles row-major.
/// Version 2 adds u64 d1, u64 d2 after p for image stacks (p = d1 * d2).
void write_raw(std::ostream& os, const DataMatrix& m);
void write_raw(const std::filesystem::path& path, const DataMatrix& m);
DataMatrix read_raw(std::istream& is);
DataMatrix read_raw(const std::filesystem::path& path);

void write_image_stack(const std::filesystem::path& path, const ImageStack& stack);
/// Accepts version 2 files; a version 1 file with square rows is read as side x side.
ImageStack read_image_stack(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const DataMatrix& m);
DataMatrix read_matrix(const std::filesystem::path& path);

/// One integer per line.
void write_labels(const std::filesystem::path& path, const Labels& labels);
Labels read_labels(const std::filesystem::path& path);

/// Three consecutive raw records: left factors, right factors, mean image.
void write_mpca_model(const std::filesystem::path& path, const MpcaModel& model);
MpcaModel read_mpca_model(const std::filesystem::path& path);

}  // namespace gsup::io

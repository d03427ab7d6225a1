#pragma once

#include "g2l/features.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace g2l {

enum class VectorFormat { csv, jsonl };

VectorFormat parse_vector_format(std::string_view name);

/// Guess the format from the file extension (.csv / .jsonl); throws for
/// anything else.
VectorFormat vector_format_for_path(const std::filesystem::path& path);

/// Reads a dataset from disk, preserving row order. CSV: optional header,
/// first column is the id, remaining columns numeric; JSONL: one
/// {"id": ..., "v": [...]} object per line. Missing or empty ids become
/// "row_<k>". Ragged or non-numeric rows are reported with their row number.
Dataset load_vectors(const std::filesystem::path& path, VectorFormat format);

void save_vectors(const Dataset& ds, const std::filesystem::path& path, VectorFormat format);

AnchorSet load_anchor_set(const std::filesystem::path& path);
void save_anchor_set(const AnchorSet& anchors, const std::filesystem::path& path);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// Replaces the final extension of `path` with `suffix` (e.g. "heat.csv",
/// ".policies.csv" -> "heat.policies.csv"). Used for companion files.
std::filesystem::path companion_path(const std::filesystem::path& path, const std::string& suffix);

} // namespace g2l

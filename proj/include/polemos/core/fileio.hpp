#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace polemos {

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers see either the old
/// or the new content. Throws StorageError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Appends content in one write. On any failure the file is truncated back to
/// its previous size and StorageError is thrown.
void append_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace polemos

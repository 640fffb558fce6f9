#pragma once

#include "mmgeo/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace mmgeo {

// MMEB layout, little-endian throughout:
//   offset 0   char[4]  "MMEB"
//   offset 4   u32      version (1)
//   offset 8   u64      rows
//   offset 16  u64      cols
//   offset 24  u32      dtype tag (1 = float32)
//   offset 28  f32[rows * cols] row-major payload
inline constexpr std::uint32_t kMmebVersion = 1;
inline constexpr std::uint32_t kMmebFloat32 = 1;
inline constexpr std::size_t kMmebHeaderBytes = 28;

enum class EmbeddingFormat { mmeb, csv };

enum class IoErrorCode {
    open_failed,
    bad_magic,
    bad_version,
    bad_dtype,
    truncated_header,
    truncated_payload,
    trailing_bytes,
    non_finite,
    ragged_csv,
    parse_error,
    empty_input,
    write_failed,
};

std::string to_string(IoErrorCode code);

class IoError : public std::runtime_error {
public:
    IoError(IoErrorCode code, const std::string& what)
        : std::runtime_error(to_string(code) + ": " + what), code_(code) {}
    IoErrorCode code() const noexcept { return code_; }

private:
    IoErrorCode code_;
};

EmbeddingFormat parse_format(const std::string& name);

// In-memory forms of ingest/export; source names the input in error messages.
std::string encode(const Matrix& m, EmbeddingFormat format);
EmbeddingMatrix decode(const std::string& bytes, EmbeddingFormat format, const std::string& source = "<memory>");

// CSV: one row per line, comma-separated decimals; a first line that does not
// parse as numbers is treated as a header.
EmbeddingMatrix ingest(const std::filesystem::path& path, EmbeddingFormat format);

// MMEB stores float32, so values are rounded on export. CSV uses 17
// significant digits. Files are written to a temporary name and renamed.
void export_embeddings(const Matrix& m, const std::filesystem::path& path, EmbeddingFormat format);

// Writes bytes atomically (temporary file in the same directory, then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

} // namespace mmgeo

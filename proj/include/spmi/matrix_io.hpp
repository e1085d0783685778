#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "spmi/types.hpp"

namespace spmi {

// Binary matrix container, format version 1:
//   bytes 0..3   magic "SPMI"
//   u32          format version (1)
//   u32          kind (0 = dense, 1 = masked)
//   u32          scalar type (0 = float64)
//   u32          reserved (0)
//   u64, u64     rows, cols
//   payload      rows*cols little-endian float64, row-major
//   mask         (masked kind only) ceil(rows*cols/8) bytes; bit i of byte b
//                is entry b*8+i in row-major order, 1 = missing
//   u64          metadata byte length
//   metadata     UTF-8 JSON object
// Round trips are bitwise exact, including NaN payloads and the mask.

inline constexpr std::uint32_t kMatrixFormatVersion = 1;

void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 const nlohmann::json& metadata = nlohmann::json::object());

// The masked overload records shift_k in the metadata ("shift_k") so the
// mask's semantics survive the round trip.
void save_matrix(const std::filesystem::path& path, const MaskedMatrix& m,
                 nlohmann::json metadata = nlohmann::json::object());

struct LoadedMatrix {
  Matrix values;
  std::optional<MaskMatrix> missing;
  nlohmann::json metadata;

  bool is_masked() const { return missing.has_value(); }
  MaskedMatrix as_masked() const;  // FormatError if the file was dense
  const Matrix& as_dense() const { return values; }
};

LoadedMatrix load_matrix(const std::filesystem::path& path);

// FNV-1a over the raw payload bytes; stable content fingerprint for headers.
std::uint64_t matrix_fingerprint(const Matrix& m);

}  // namespace spmi

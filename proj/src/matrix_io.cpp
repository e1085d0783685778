#include "spmi/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "spmi/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "the matrix container is defined little-endian; byte-swapping "
              "for big-endian hosts is not implemented");
static_assert(sizeof(double) == 8);

namespace spmi {
namespace {

constexpr char kMagic[4] = {'S', 'P', 'M', 'I'};
constexpr std::uint32_t kKindDense = 0;
constexpr std::uint32_t kKindMasked = 1;
constexpr std::uint32_t kScalarF64 = 0;

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::filesystem::path& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("truncated matrix file: " + path.string());
  return value;
}

void write_file(const std::filesystem::path& path, const Matrix& m,
                const MaskMatrix* mask, const nlohmann::json& metadata) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  out.write(kMagic, 4);
  write_pod(out, kMatrixFormatVersion);
  write_pod(out, mask ? kKindMasked : kKindDense);
  write_pod(out, kScalarF64);
  write_pod(out, std::uint32_t{0});
  write_pod(out, static_cast<std::uint64_t>(m.rows()));
  write_pod(out, static_cast<std::uint64_t>(m.cols()));

  // Row-major payload regardless of Eigen's in-memory order.
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      write_pod(out, m(i, j));
    }
  }

  if (mask) {
    const std::uint64_t cells =
        static_cast<std::uint64_t>(m.rows()) *
        static_cast<std::uint64_t>(m.cols());
    std::vector<unsigned char> bits((cells + 7) / 8, 0);
    std::uint64_t cell = 0;
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j, ++cell) {
        if ((*mask)(i, j)) {
          bits[cell / 8] |= static_cast<unsigned char>(1u << (cell % 8));
        }
      }
    }
    out.write(reinterpret_cast<const char*>(bits.data()),
              static_cast<std::streamsize>(bits.size()));
  }

  const std::string blob = metadata.dump();
  write_pod(out, static_cast<std::uint64_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 const nlohmann::json& metadata) {
  write_file(path, m, nullptr, metadata);
}

void save_matrix(const std::filesystem::path& path, const MaskedMatrix& m,
                 nlohmann::json metadata) {
  if (m.values.rows() != m.missing.rows() ||
      m.values.cols() != m.missing.cols()) {
    throw ShapeMismatchError("save_matrix: values/mask shapes differ");
  }
  metadata["shift_k"] = m.shift_k;
  write_file(path, m.values, &m.missing, metadata);
}

MaskedMatrix LoadedMatrix::as_masked() const {
  if (!missing) {
    throw FormatError("matrix file carries no missing-entry mask");
  }
  MaskedMatrix out;
  out.values = values;
  out.missing = *missing;
  out.shift_k = metadata.value("shift_k", 1);
  return out;
}

LoadedMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not a matrix file (bad magic): " + path.string());
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kMatrixFormatVersion) {
    throw VersionError("unsupported matrix format version " +
                       std::to_string(version) + ": " + path.string());
  }
  const auto kind = read_pod<std::uint32_t>(in, path);
  if (kind != kKindDense && kind != kKindMasked) {
    throw FormatError("unknown matrix kind: " + path.string());
  }
  const auto scalar = read_pod<std::uint32_t>(in, path);
  if (scalar != kScalarF64) {
    throw FormatError("unknown scalar type: " + path.string());
  }
  (void)read_pod<std::uint32_t>(in, path);  // reserved
  const auto rows = read_pod<std::uint64_t>(in, path);
  const auto cols = read_pod<std::uint64_t>(in, path);
  if (rows > (1u << 20) || cols > (1u << 20)) {
    throw FormatError("implausible matrix shape: " + path.string());
  }

  LoadedMatrix loaded;
  loaded.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      loaded.values(static_cast<Index>(i), static_cast<Index>(j)) =
          read_pod<double>(in, path);
    }
  }

  if (kind == kKindMasked) {
    const std::uint64_t cells = rows * cols;
    std::vector<unsigned char> bits((cells + 7) / 8);
    in.read(reinterpret_cast<char*>(bits.data()),
            static_cast<std::streamsize>(bits.size()));
    if (!in) throw FormatError("truncated matrix file: " + path.string());
    MaskMatrix mask(static_cast<Index>(rows), static_cast<Index>(cols));
    std::uint64_t cell = 0;
    for (std::uint64_t i = 0; i < rows; ++i) {
      for (std::uint64_t j = 0; j < cols; ++j, ++cell) {
        mask(static_cast<Index>(i), static_cast<Index>(j)) =
            (bits[cell / 8] >> (cell % 8)) & 1u;
      }
    }
    loaded.missing = std::move(mask);
  }

  const auto blob_len = read_pod<std::uint64_t>(in, path);
  if (blob_len > (1u << 26)) {
    throw FormatError("implausible metadata length: " + path.string());
  }
  std::string blob(blob_len, '\0');
  in.read(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!in) throw FormatError("truncated matrix file: " + path.string());
  try {
    loaded.metadata = nlohmann::json::parse(blob);
  } catch (const nlohmann::json::exception&) {
    throw FormatError("metadata is not valid JSON: " + path.string());
  }

  // The metadata blob is the final section; anything after it is corruption.
  in.peek();
  if (!in.eof()) {
    throw FormatError("trailing bytes after metadata: " + path.string());
  }
  return loaded;
}

std::uint64_t matrix_fingerprint(const Matrix& m) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a offset basis
  auto mix_bytes = [&h](const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  mix_bytes(&rows, sizeof rows);
  mix_bytes(&cols, sizeof cols);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double value = m(i, j);
      mix_bytes(&value, sizeof value);
    }
  }
  return h;
}

}  // namespace spmi

#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fpprep {

using Bytes = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Built-in deduplication compressor.
//
// Each 32-bit word is split into a base (its `base_bits` most significant
// bits) and a deviation (the rest). Distinct bases go to a dictionary in order
// of first occurrence; every word stores a dictionary index and its raw
// deviation. Blob layout, all integers little-endian:
//
//   "FPGD" | version u8 | base_bits u8 | word count u64 | dictionary size u32
//   dictionary entries, ceil(base_bits / 8) bytes each
//   indices, ceil(log2(dictionary size)) bits per word, packed, byte padded
//   deviations, 32 - base_bits bits per word, packed, byte padded
// ---------------------------------------------------------------------------

inline constexpr std::size_t kGdHeaderBytes = 18;

struct GdLayout {
  int base_bits = 32;
  std::vector<std::uint32_t> dictionary;
  std::vector<std::uint32_t> indices;
  std::vector<std::uint32_t> deviations;

  int deviation_bits() const { return 32 - base_bits; }
};

/// Splits words into the layout above. base_bits in [1, 32].
GdLayout gd_layout(std::span<const std::uint32_t> words, int base_bits);

/// Bits needed for an index into a dictionary of `entries` values.
int index_bits(std::uint64_t entries);

/// Exact blob size for the given shape.
std::uint64_t gd_blob_size(std::uint64_t words, std::uint64_t dictionary_entries, int base_bits);

Bytes gd_compress(std::span<const std::uint32_t> words, int base_bits);

/// Throws Error{corrupt_blob} on a bad magic, version or length.
std::vector<std::uint32_t> gd_decompress(std::span<const std::uint8_t> blob);

/// base_bits in [1, 31] minimising gd_blob_size; the smallest wins ties.
/// Throws Error{invalid_argument} for empty input.
int choose_base_bits(std::span<const std::uint32_t> words);

// ---------------------------------------------------------------------------
// External compressors: child processes that read raw bytes on stdin and
// write the compressed stream to stdout, exiting 0 on success.
// ---------------------------------------------------------------------------

struct CommandSpec {
  std::string name;
  std::vector<std::string> compress_argv;
  std::vector<std::string> decompress_argv;  // empty disables verification
  std::chrono::milliseconds timeout{60000};
};

/// "gzip -9" style command line; the decompressor defaults to the program
/// name with "-d" appended, which suits gzip, bzip2, xz, zstd and lz4.
CommandSpec command_from_string(const std::string& command_line,
                                const std::string& decompress_line = {});

/// Runs argv with `input` on stdin and returns its stdout. Throws
/// Error{config} if the program cannot be found and Error{process} on a
/// non-zero exit, a signal or a timeout.
Bytes run_filter(const std::vector<std::string>& argv, std::span<const std::uint8_t> input,
                 std::chrono::milliseconds timeout);

struct ExternalResult {
  std::uint64_t compressed_bytes = 0;
  Bytes blob;
};

/// Compresses `input` with the command; when `verify` is set and a
/// decompressor is configured the output must decompress to `input` exactly.
ExternalResult external_compress(std::span<const std::uint8_t> input, const CommandSpec& spec,
                                 bool verify);

Bytes external_decompress(std::span<const std::uint8_t> blob, const CommandSpec& spec);

/// Words as little-endian bytes.
Bytes words_to_bytes(std::span<const std::uint32_t> words);
std::vector<std::uint32_t> bytes_to_words(std::span<const std::uint8_t> bytes);

}  // namespace fpprep

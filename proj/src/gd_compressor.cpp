#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "fpprep/compressors.hpp"
#include "fpprep/error.hpp"

namespace fpprep {

namespace {

constexpr std::uint8_t kGdVersion = 1;
constexpr char kGdMagic[4] = {'F', 'P', 'G', 'D'};

std::uint64_t packed_bytes(std::uint64_t count, int bits) {
  return (count * static_cast<std::uint64_t>(bits) + 7) / 8;
}

int entry_bytes(int base_bits) { return (base_bits + 7) / 8; }

class BitWriter {
 public:
  explicit BitWriter(Bytes& out) : out_(out) {}

  void put(std::uint32_t value, int bits) {
    for (int i = 0; i < bits; ++i) {
      if (used_ == 0) out_.push_back(0);
      if ((value >> i) & 1u) out_.back() |= static_cast<std::uint8_t>(1u << used_);
      used_ = (used_ + 1) % 8;
    }
  }

  void pad() { used_ = 0; }

 private:
  Bytes& out_;
  int used_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> in, std::size_t offset) : in_(in), pos_(offset * 8) {}

  std::uint32_t get(int bits) {
    std::uint32_t v = 0;
    for (int i = 0; i < bits; ++i, ++pos_) {
      if ((in_[pos_ / 8] >> (pos_ % 8)) & 1u) v |= 1u << i;
    }
    return v;
  }

  std::size_t byte_offset() const { return (pos_ + 7) / 8; }
  void pad() { pos_ = byte_offset() * 8; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_;
};

template <typename T>
void put_le(Bytes& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[offset + i]) << (8 * i);
  return v;
}

void require_base_bits(int base_bits, int max) {
  if (base_bits < 1 || base_bits > max) {
    throw Error(ErrorCode::invalid_argument,
                "base_bits must be in [1, " + std::to_string(max) + "], got " +
                    std::to_string(base_bits));
  }
}

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::corrupt_blob, "gd_decompress: " + why);
}

}  // namespace

int index_bits(std::uint64_t entries) {
  if (entries <= 1) return 0;
  return std::bit_width(entries - 1);
}

std::uint64_t gd_blob_size(std::uint64_t words, std::uint64_t dictionary_entries, int base_bits) {
  return kGdHeaderBytes + dictionary_entries * static_cast<std::uint64_t>(entry_bytes(base_bits)) +
         packed_bytes(words, index_bits(dictionary_entries)) + packed_bytes(words, 32 - base_bits);
}

GdLayout gd_layout(std::span<const std::uint32_t> words, int base_bits) {
  require_base_bits(base_bits, 32);
  GdLayout layout;
  layout.base_bits = base_bits;
  const int dev_bits = 32 - base_bits;
  const std::uint32_t dev_mask = dev_bits == 0 ? 0u : (0xffffffffu >> (32 - dev_bits));
  std::unordered_map<std::uint32_t, std::uint32_t> slot;
  layout.indices.reserve(words.size());
  layout.deviations.reserve(words.size());
  for (std::uint32_t w : words) {
    const std::uint32_t base = dev_bits == 32 ? 0u : (w >> dev_bits);
    auto [it, inserted] = slot.try_emplace(base, static_cast<std::uint32_t>(layout.dictionary.size()));
    if (inserted) layout.dictionary.push_back(base);
    layout.indices.push_back(it->second);
    layout.deviations.push_back(w & dev_mask);
  }
  return layout;
}

Bytes gd_compress(std::span<const std::uint32_t> words, int base_bits) {
  const GdLayout layout = gd_layout(words, base_bits);
  const int ib = index_bits(layout.dictionary.size());

  Bytes out;
  out.reserve(gd_blob_size(words.size(), layout.dictionary.size(), base_bits));
  out.insert(out.end(), std::begin(kGdMagic), std::end(kGdMagic));
  out.push_back(kGdVersion);
  out.push_back(static_cast<std::uint8_t>(base_bits));
  put_le<std::uint64_t>(out, words.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layout.dictionary.size()));

  for (std::uint32_t base : layout.dictionary) {
    for (int i = 0; i < entry_bytes(base_bits); ++i) {
      out.push_back(static_cast<std::uint8_t>(base >> (8 * i)));
    }
  }
  BitWriter writer(out);
  for (std::uint32_t idx : layout.indices) writer.put(idx, ib);
  writer.pad();
  for (std::uint32_t dev : layout.deviations) writer.put(dev, layout.deviation_bits());
  return out;
}

std::vector<std::uint32_t> gd_decompress(std::span<const std::uint8_t> blob) {
  if (blob.size() < kGdHeaderBytes) corrupt("blob shorter than header");
  if (std::memcmp(blob.data(), kGdMagic, 4) != 0) corrupt("bad magic");
  if (blob[4] != kGdVersion) corrupt("unsupported version " + std::to_string(blob[4]));
  const int base_bits = blob[5];
  if (base_bits < 1 || base_bits > 32) corrupt("base_bits out of range");
  const auto count = get_le<std::uint64_t>(blob, 6);
  const auto entries = get_le<std::uint32_t>(blob, 14);
  if (count > (std::uint64_t{1} << 32) || entries > count) corrupt("implausible header");
  if (gd_blob_size(count, entries, base_bits) != blob.size()) corrupt("length mismatch");

  const int dev_bits = 32 - base_bits;
  std::vector<std::uint32_t> dictionary(entries);
  std::size_t pos = kGdHeaderBytes;
  for (auto& base : dictionary) {
    base = 0;
    for (int i = 0; i < entry_bytes(base_bits); ++i) {
      base |= static_cast<std::uint32_t>(blob[pos++]) << (8 * i);
    }
  }
  const int ib = index_bits(entries);
  BitReader reader(blob, pos);
  std::vector<std::uint32_t> indices(count);
  for (auto& idx : indices) {
    idx = reader.get(ib);
    if (idx >= entries) corrupt("index out of range");
  }
  reader.pad();
  std::vector<std::uint32_t> words(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t base = dictionary[indices[i]];
    const std::uint32_t dev = reader.get(dev_bits);
    words[i] = (dev_bits == 32 ? 0u : (base << dev_bits)) | dev;
  }
  return words;
}

int choose_base_bits(std::span<const std::uint32_t> words) {
  if (words.empty()) throw Error(ErrorCode::invalid_argument, "choose_base_bits: empty input");
  std::vector<std::uint32_t> sorted(words.begin(), words.end());
  std::sort(sorted.begin(), sorted.end());

  int best_bits = 1;
  std::uint64_t best_size = std::numeric_limits<std::uint64_t>::max();
  for (int b = 1; b <= 31; ++b) {
    const int shift = 32 - b;
    // Sorted words have sorted prefixes, so distinct prefixes are transitions.
    std::uint64_t distinct = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if ((sorted[i] >> shift) != (sorted[i - 1] >> shift)) ++distinct;
    }
    const auto size = gd_blob_size(words.size(), distinct, b);
    if (size < best_size) {
      best_size = size;
      best_bits = b;
    }
  }
  return best_bits;
}

Bytes words_to_bytes(std::span<const std::uint32_t> words) {
  Bytes out;
  out.reserve(words.size() * 4);
  for (std::uint32_t w : words) put_le<std::uint32_t>(out, w);
  return out;
}

std::vector<std::uint32_t> bytes_to_words(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) {
    throw Error(ErrorCode::corrupt_blob, "byte stream length is not a multiple of 4");
  }
  std::vector<std::uint32_t> words(bytes.size() / 4);
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = get_le<std::uint32_t>(bytes, 4 * i);
  return words;
}

}  // namespace fpprep

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fpprep/addition.hpp"
#include "fpprep/compressors.hpp"
#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"

using namespace fpprep;

namespace {

std::vector<std::uint32_t> words_of(const std::vector<float>& v) {
  std::vector<std::uint32_t> w;
  for (float f : v) w.push_back(to_bits(f));
  return w;
}

std::uint64_t distinct_prefixes(const std::vector<std::uint32_t>& w, int b) {
  std::vector<std::uint32_t> p;
  for (auto x : w) p.push_back(b == 32 ? x : x >> (32 - b));
  std::sort(p.begin(), p.end());
  return static_cast<std::uint64_t>(std::unique(p.begin(), p.end()) - p.begin());
}

}  // namespace

TEST_CASE("gd round trip and exact size") {
  std::mt19937 rng(8);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint32_t> w(rng() % 300);
    const std::uint32_t mask = trial % 3 == 0 ? 0xffffffffu : 0xff00ff0fu;
    for (auto& x : w) x = bits(rng) & mask;
    for (int b = 1; b <= 32; ++b) {
      const auto blob = gd_compress(w, b);
      CHECK(blob.size() == gd_blob_size(w.size(), distinct_prefixes(w, b), b));
      CHECK(gd_decompress(blob) == w);
    }
  }
}

TEST_CASE("gd layout") {
  const std::vector<std::uint32_t> w{0xaabb0001u, 0xccdd0002u, 0xaabb0003u};
  const auto layout = gd_layout(w, 16);
  CHECK(layout.dictionary == std::vector<std::uint32_t>{0xaabbu, 0xccddu});
  CHECK(layout.indices == std::vector<std::uint32_t>{0, 1, 0});
  CHECK(layout.deviations == std::vector<std::uint32_t>{1, 2, 3});
  CHECK(layout.deviation_bits() == 16);
  CHECK_THROWS_AS(gd_layout(w, 0), Error);
  CHECK_THROWS_AS(gd_layout(w, 33), Error);
}

TEST_CASE("gd degenerate inputs") {
  const std::vector<std::uint32_t> same(1000, 0x43a1b2c3u);
  const auto blob = gd_compress(same, 32);
  CHECK(blob.size() == kGdHeaderBytes + 4);
  CHECK(gd_decompress(blob) == same);

  const auto empty = gd_compress(std::vector<std::uint32_t>{}, 12);
  CHECK(empty.size() == kGdHeaderBytes);
  CHECK(gd_decompress(empty).empty());
}

TEST_CASE("gd rejects corrupt blobs") {
  const std::vector<std::uint32_t> w{1, 2, 3, 4, 5};
  auto blob = gd_compress(w, 24);
  auto bad = blob;
  bad[0] = 'X';
  CHECK_THROWS_AS(gd_decompress(bad), Error);
  bad = blob;
  bad.pop_back();
  CHECK_THROWS_AS(gd_decompress(bad), Error);
  bad = blob;
  bad[4] = 9;
  CHECK_THROWS_AS(gd_decompress(bad), Error);
  CHECK_THROWS_AS(gd_decompress(Bytes{1, 2, 3}), Error);
  try {
    gd_decompress(Bytes(5, 0));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::corrupt_blob);
  }
}

TEST_CASE("choose_base_bits minimises the exact size") {
  std::mt19937 rng(12);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::uint32_t> w(1 + rng() % 500);
    for (auto& x : w) x = (bits(rng) >> (trial % 20)) | 0x40000000u;
    const int chosen = choose_base_bits(w);
    const auto best = gd_compress(w, chosen).size();
    for (int b = 1; b <= 31; ++b) CHECK(best <= gd_compress(w, b).size());
  }
}

TEST_CASE("choose_base_bits examples") {
  CHECK(choose_base_bits(std::vector<std::uint32_t>(100, 0x12345678u)) == 31);
  CHECK_THROWS_AS(choose_base_bits(std::vector<std::uint32_t>{}), Error);

  std::mt19937 rng(4);
  std::vector<std::uint32_t> noise(4000);
  for (auto& x : noise) x = rng();
  CHECK(choose_base_bits(noise) <= 8);

  std::vector<std::uint32_t> two;
  for (int i = 0; i < 1000; ++i) two.push_back(i % 2 ? 0xf0f0f0f0u : 0x0f0f0f0fu);
  const int b = choose_base_bits(two);
  CHECK(b == 31);
  CHECK(gd_layout(two, b).dictionary.size() == 2);

  // Words that differ only in the last bit share every 31-bit prefix.
  std::vector<std::uint32_t> close;
  for (int i = 0; i < 1000; ++i) close.push_back(i % 2 ? 0xf0f0f0f0u : 0xf0f0f0f1u);
  CHECK(choose_base_bits(close) == 31);
  CHECK(gd_layout(close, 31).dictionary.size() == 1);
}

TEST_CASE("addition-transformed words compress smaller at the same base_bits") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<float> dist(50.0f, 350.0f);
  std::vector<float> x(5000);
  for (auto& v : x) v = dist(rng);
  const auto plan = select_addition_parameter(x, ErrorBound::relative(0.01));
  const auto y = apply_addition(x, plan);
  for (int b : {9, 12, 16, 20}) {
    CAPTURE(b);
    CHECK(gd_compress(words_of(y), b).size() < gd_compress(words_of(x), b).size());
  }
}

TEST_CASE("word serialisation is little-endian") {
  const std::vector<std::uint32_t> w{0x04030201u, 0xddccbbaau};
  const auto bytes = words_to_bytes(w);
  CHECK(bytes == Bytes{1, 2, 3, 4, 0xaa, 0xbb, 0xcc, 0xdd});
  CHECK(bytes_to_words(bytes) == w);
  CHECK_THROWS_AS(bytes_to_words(Bytes{1, 2, 3}), Error);
}

TEST_CASE("external commands") {
  const Bytes input(10000, 'a');
  const auto cat = command_from_string("cat", "cat");
  CHECK(cat.name == "cat");
  CHECK(external_compress(input, cat, true).compressed_bytes == input.size());

  const auto gzip = command_from_string("gzip -9");
  CHECK(gzip.decompress_argv == std::vector<std::string>{"gzip", "-d"});
  const auto r = external_compress(input, gzip, true);
  CHECK(r.compressed_bytes < input.size() / 20);
  CHECK(external_decompress(r.blob, gzip) == input);

  CHECK(run_filter({"cat"}, Bytes{}, std::chrono::milliseconds(5000)).empty());

  try {
    external_compress(input, command_from_string("no-such-compressor-xyz"), true);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
  }
  try {
    run_filter({"false"}, input, std::chrono::milliseconds(5000));
    FAIL("expected a process error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::process);
  }
  try {
    run_filter({"sleep", "5"}, Bytes{}, std::chrono::milliseconds(200));
    FAIL("expected a timeout");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::process);
  }
  // A "compressor" that does not round-trip fails verification.
  try {
    external_compress(input, command_from_string("gzip -1", "cat"), true);
    FAIL("expected a round-trip mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::process);
  }
  CHECK_THROWS_AS(command_from_string("   "), Error);
}

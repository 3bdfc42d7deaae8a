#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lofdrf {

// Little-endian binary buffer behind the model file formats. Doubles travel
// as IEEE-754 bit patterns, so round trips are bit-exact.
class ByteWriter {
 public:
  void u8(uint8_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i32(int32_t v);
  void f64(double v);
  void str(std::string_view s);  // u64 length + raw bytes
  const std::vector<uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<uint8_t> bytes) : buf_(std::move(bytes)) {}
  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  int32_t i32();
  double f64();
  std::string str();
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(size_t n);
  std::vector<uint8_t> buf_;
  size_t pos_ = 0;
};

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::span<const uint8_t> bytes);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// FNV-1a, used as an integrity tag on parent-forest references.
uint64_t fnv1a64(std::span<const uint8_t> bytes);
std::string hex64(uint64_t v);

// Locale-independent; returns nothing unless the whole string parses.
std::optional<double> parse_double(std::string_view s);
// Fixed-point rendering for report tables ("91.33"); flushes negative zero.
std::string fixed(double v, int decimals = 2);

}  // namespace lofdrf

#include "lofdrf/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "lofdrf/error.hpp"

namespace lofdrf {

void ByteWriter::u8(uint8_t v) { buf_.push_back(v); }

void ByteWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
}

void ByteWriter::i32(int32_t v) { u32(std::bit_cast<uint32_t>(v)); }

void ByteWriter::f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u64(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteReader::need(size_t n) {
  if (buf_.size() - pos_ < n) throw InputError("corrupt model file: truncated record");
}

uint8_t ByteReader::u8() {
  need(1);
  return buf_[pos_++];
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(buf_[pos_++]) << (8 * i);
  return v;
}

uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(buf_[pos_++]) << (8 * i);
  return v;
}

int32_t ByteReader::i32() { return std::bit_cast<int32_t>(u32()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
  uint64_t n = u64();
  if (n > buf_.size() - pos_) throw InputError("corrupt model file: truncated record");
  std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), size_t(n));
  pos_ += size_t(n);
  return s;
}

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::vector<uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw RuntimeError("read failed: " + path.string());
  return bytes;
}

void write_binary_file(const std::filesystem::path& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  out.flush();
  if (!out) throw RuntimeError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  auto bytes = read_binary_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_binary_file(path, std::span<const uint8_t>(
                              reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

uint64_t fnv1a64(std::span<const uint8_t> bytes) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(v));
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string fixed(double v, int decimals) {
  if (v == 0) v = 0;  // never print "-0.00"
  char out[64];
  std::snprintf(out, sizeof out, "%.*f", decimals, v);
  return out;
}

}  // namespace lofdrf

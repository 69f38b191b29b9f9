#include "llc/bits.h"

#include <stdexcept>

namespace llc {

void BitWriter::put(uint32_t value, int width)
{
  if (width < 0 || width > 32) {
    throw std::invalid_argument("BitWriter::put: bad width");
  }
  if (width < 32 && value >= (1u << width)) {
    throw std::invalid_argument("BitWriter::put: value does not fit width");
  }
  for (int i = width - 1; i >= 0; --i) {
    bits_.push_back(static_cast<uint8_t>((value >> i) & 1u));
  }
}

uint32_t BitReader::get(int width)
{
  if (width < 0 || width > 32) {
    throw std::invalid_argument("BitReader::get: bad width");
  }
  if (pos_ + static_cast<size_t>(width) > bits_.size()) {
    throw std::out_of_range("BitReader::get: past end of bitstring");
  }
  uint32_t v = 0;
  for (int i = 0; i < width; ++i) {
    v = (v << 1) | bits_[pos_++];
  }
  return v;
}

uint16_t crc16(const BitString& bits)
{
  uint16_t crc = 0xFFFF;
  for (uint8_t b : bits) {
    const uint16_t in = static_cast<uint16_t>(b & 1u);
    const uint16_t msb = static_cast<uint16_t>((crc >> 15) & 1u);
    crc = static_cast<uint16_t>(crc << 1);
    if (msb ^ in) {
      crc ^= 0x1021;
    }
  }
  return crc;
}

std::vector<uint8_t> pack_bits(const BitString& bits)
{
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) {
      out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    }
  }
  return out;
}

BitString unpack_bits(const std::vector<uint8_t>& bytes, size_t n_bits)
{
  if (n_bits > bytes.size() * 8) {
    throw std::out_of_range("unpack_bits: not enough bytes");
  }
  BitString out(n_bits, 0);
  for (size_t i = 0; i < n_bits; ++i) {
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return out;
}

std::string to_hex(const BitString& bits)
{
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (uint8_t byte : pack_bits(bits)) {
    s.push_back(digits[byte >> 4]);
    s.push_back(digits[byte & 0x0F]);
  }
  return s;
}

}  // namespace llc

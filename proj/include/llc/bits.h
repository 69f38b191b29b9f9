#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace llc {

// One bit per element, MSB-first message order. Sizes here are tens of bits,
// so the flat representation is deliberate.
using BitString = std::vector<uint8_t>;

class BitWriter {
public:
  void put(uint32_t value, int width);
  const BitString& bits() const { return bits_; }
  BitString take() { return std::move(bits_); }

private:
  BitString bits_;
};

class BitReader {
public:
  explicit BitReader(const BitString& bits) : bits_(bits) {}

  uint32_t get(int width);
  bool exhausted() const { return pos_ >= bits_.size(); }
  size_t remaining() const { return bits_.size() - pos_; }

private:
  const BitString& bits_;
  size_t pos_ = 0;
};

// CRC-16/CCITT-FALSE over the bit sequence (poly 0x1021, init 0xFFFF).
uint16_t crc16(const BitString& bits);

// MSB-first packing; the last byte is zero-padded.
std::vector<uint8_t> pack_bits(const BitString& bits);
BitString unpack_bits(const std::vector<uint8_t>& bytes, size_t n_bits);

std::string to_hex(const BitString& bits);

}  // namespace llc

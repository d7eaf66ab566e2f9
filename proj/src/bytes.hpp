#pragma once

// Little-endian encode/decode for the binary sidecars.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tfcl/file_io.hpp"

namespace tfcl::detail {

template <typename Word>
constexpr Word to_little(Word w) noexcept {
  if constexpr (std::endian::native == std::endian::little) {
    return w;
  } else {
    Word out = 0;
    for (std::size_t i = 0; i < sizeof(Word); ++i) {
      out = static_cast<Word>((out << 8) | (w & 0xFF));
      w = static_cast<Word>(w >> 8);
    }
    return out;
  }
}

template <typename T>
using word_for = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

template <typename T>
std::vector<char> encode_le(std::span<const T> values) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  std::vector<char> bytes(values.size() * sizeof(T));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto word = to_little(std::bit_cast<word_for<T>>(values[i]));
    std::memcpy(bytes.data() + i * sizeof(T), &word, sizeof(T));
  }
  return bytes;
}

template <typename T>
std::vector<T> decode_le(std::span<const char> bytes) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  std::vector<T> values(bytes.size() / sizeof(T));
  for (std::size_t i = 0; i < values.size(); ++i) {
    word_for<T> word;
    std::memcpy(&word, bytes.data() + i * sizeof(T), sizeof(T));
    values[i] = std::bit_cast<T>(to_little(word));
  }
  return values;
}

}  // namespace tfcl::detail

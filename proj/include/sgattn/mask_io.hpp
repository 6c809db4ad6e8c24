#pragma once

#include "sgattn/local_range.hpp"
#include "sgattn/soft_mask.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>

namespace sgattn {

// SGAM binary mask record, little-endian throughout:
//   magic   4 bytes  "SGAM"
//   version u32      1
//   n       u32      token count
//   dtype   u8       0 = hard mask, 1 = soft mask
//   payload          hard: n rows, each padded to ceil(n/8) bytes, bit j of
//                    a row stored LSB-first (bit j of byte j/8 = column j);
//                    soft: n*n float32, row-major.
// A file may hold any number of consecutive records; each is self-delimiting.

inline constexpr std::array<unsigned char, 4> kMaskMagic = {'S', 'G', 'A', 'M'};
inline constexpr std::uint32_t kMaskFormatVersion = 1;

enum class MaskDType : std::uint8_t { hard = 0, soft = 1 };

using MaskVariant = std::variant<LocalRangeMask, SoftMask>;

void write_mask(std::ostream& out, const LocalRangeMask& mask);
void write_mask(std::ostream& out, const SoftMask& mask);
void write_mask(std::ostream& out, const MaskVariant& mask);

// Reads the next record. Returns nullopt at a clean end-of-stream; throws
// sgattn::Error on bad magic, version, dtype or a truncated payload.
std::optional<MaskVariant> read_mask(std::istream& in);

} // namespace sgattn

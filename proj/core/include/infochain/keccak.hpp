#pragma once

#include <cstdint>
#include <span>

#include "infochain/bytes.hpp"

namespace infochain {

/// Keccak-256 with the original 0x01 multi-rate padding (the Ethereum
/// `keccak256`), not the FIPS-202 SHA3-256 padding.
Digest256 keccak256(std::span<const std::uint8_t> data);

}  // namespace infochain

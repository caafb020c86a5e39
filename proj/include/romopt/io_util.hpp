#pragma once

#include "romopt/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace romopt {

/// Shortest round-trip decimal representation of a double. Reparsing the
/// string recovers the exact bit pattern, so text artifacts stay both
/// readable and reproducible.
std::string format_double(double value);

/// Strict double parser; the whole token must be consumed.
double parse_double(std::string_view token, const std::string& context);

/// Strict non-negative integer parser.
long parse_long(std::string_view token, const std::string& context);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, const void* data, std::size_t size);

/// Little-endian scalar encoding for binary payloads.
void append_f64_le(std::string& out, double value);
void append_u64_le(std::string& out, std::uint64_t value);
double read_f64_le(const std::uint8_t* p);
std::uint64_t read_u64_le(const std::uint8_t* p);

/// FNV-1a 64-bit hash, rendered as 16 hex digits. Used for provenance
/// stamps, not security.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(std::string_view data);
std::string hash_file_hex(const std::filesystem::path& path);

/// Deterministic 64-bit stream generator (splitmix64). Used everywhere a
/// seeded random draw is needed so results do not depend on the standard
/// library's distribution implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double next_double();

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi);

private:
    std::uint64_t state_;
};

}  // namespace romopt

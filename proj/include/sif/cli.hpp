#pragma once

#include <cstdint>
#include <string_view>

namespace sif {

/// Entry point of the `sif` tool. Returns the process exit code:
/// 0 ok, 2 configuration error, 3 numerical failure, 4 condition-check failure.
int run_cli(int argc, char** argv);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

inline constexpr const char* sif_version = "1.0.0";

} // namespace sif

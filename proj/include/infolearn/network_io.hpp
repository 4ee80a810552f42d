#pragma once

#include <filesystem>
#include <string>

#include "infolearn/dgp.hpp"

namespace infolearn {

inline constexpr int kNetworkFormatVersion = 1;

/// Versioned JSON document:
///   {"format": "infolearn-network", "version": 1, "kind", "prior", "input_dim",
///    "bias_input", "seed", "block_ends": [...],
///    "layers": [{"rows", "cols", "relu", "weights": [row-major], "bias": [...]}]}
/// Doubles are written in shortest round-trip form, so load(save(n)) == n bit for bit.
std::string network_to_json(const TeacherNetwork& net);
TeacherNetwork network_from_json(const std::string& text);

void save_network(const TeacherNetwork& net, const std::filesystem::path& path);
TeacherNetwork load_network(const std::filesystem::path& path);

}  // namespace infolearn

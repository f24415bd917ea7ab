#pragma once

#include <string>
#include <vector>

#include "trl/nn/network.hpp"

namespace trl::nn {

// Binary model format: "TRLQ" magic, format version, head kind, layer table,
// then all parameters as little-endian 64-bit floats in parameter order
// (per layer: weights row-major, then biases).
std::vector<unsigned char> serialize_network(const Network& net);
Network deserialize_network(const std::vector<unsigned char>& bytes);

void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace trl::nn

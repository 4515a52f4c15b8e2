#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rqv/ctmc.hpp"

namespace rqv {

/// Parses the JSON model format:
///
///   {"states":[{"id":0,"labels":["a"]}, ...], "initial":0,
///    "transitions":[{"from":0,"to":1,"rate":2.5,"rewards":{"energy":1}},
///                   {"from":0,"to":2,"rate":{"lo":1,"hi":2,"param":"r"}}],
///    "state_rewards":{"time":{"0":1}}}
///
/// Unknown fields are rejected. Self-loops are ignored. Throws ParseError with
/// a line/column or a field path.
IntervalCtmc load_model(std::string_view text);
IntervalCtmc load_model_file(const std::filesystem::path& path);

/// Serializes with shortest round-trip decimal numbers, so load(save(m)) == m.
std::string save_model(const IntervalCtmc& model);
std::string save_model(const Ctmc& model);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rqv

#pragma once

#include <cstdint>
#include <random>

#include "bngnn/numerics/matrix.hpp"

namespace bngnn {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream); streams separate purposes so that
// draws in one part of a run never shift another part.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

double uniform01(Rng& rng);
std::size_t uniform_index(Rng& rng, std::size_t n);

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

namespace streams {
inline constexpr std::uint64_t kGnnInit = 1;
inline constexpr std::uint64_t kGnnDropout = 2;
inline constexpr std::uint64_t kGnnShuffle = 3;
inline constexpr std::uint64_t kPolicyInit = 4;
inline constexpr std::uint64_t kExploration = 5;
inline constexpr std::uint64_t kReplay = 6;
inline constexpr std::uint64_t kTransition = 7;
inline constexpr std::uint64_t kRandomDepth = 8;
inline constexpr std::uint64_t kSplit = 9;
inline constexpr std::uint64_t kSynthetic = 10;
}  // namespace streams

}  // namespace bngnn

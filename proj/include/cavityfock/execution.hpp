#pragma once

#include <cstdint>
#include <random>

namespace cavityfock {

// Selects the OpenMP kernel or the serial reference loop. Both produce the
// same numbers: parallel kernels write into per-index slots and reduce in
// index order.
enum class Execution { serial, parallel };

// Engine for one independent random stream. Seeding depends only on
// (seed, stream), never on which thread draws from it.
std::mt19937_64 make_stream_engine(std::uint64_t seed, std::uint64_t stream);

}  // namespace cavityfock

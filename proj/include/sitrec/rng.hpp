#pragma once

#include <random>

namespace sitrec {

using Rng = std::mt19937_64;

}  // namespace sitrec

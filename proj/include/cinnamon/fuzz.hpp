#pragma once

#include "cinnamon/model.hpp"

#include <cstdint>

namespace cinnamon {

struct RandomCinnamonOptions {
    Mode mode = Mode::Nat;
    bool inc_only = false; // only inc and if nonEq among primitives
    bool macros = true;
    bool calls = true;
    std::size_t max_subnets = 3;
    std::size_t max_states = 4;
    std::size_t max_arrows = 7;
    std::size_t max_label = 3;
};

/// Deterministic random cinnamon that passes validate().
Cinnamon random_cinnamon(std::uint64_t seed, const RandomCinnamonOptions& options = {});

} // namespace cinnamon

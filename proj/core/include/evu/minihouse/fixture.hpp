#pragma once

#include <string>

#include "evu/minihouse/world.hpp"

namespace evu::minihouse {

/// World fixtures for golden tests: the entity tables plus the goal,
/// serialized as stable JSON (sorted keys, schema-versioned).
struct WorldFixture {
    WorldState world;
    TaskSpec task;
    int horizon = 40;

    bool operator==(const WorldFixture&) const = default;
};

std::string fixture_to_json(const WorldFixture& f);
WorldFixture fixture_from_json(const std::string& text);

void save_fixture(const WorldFixture& f, const std::string& path);
WorldFixture load_fixture(const std::string& path);

}  // namespace evu::minihouse

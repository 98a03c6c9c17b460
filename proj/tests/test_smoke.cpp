#include <catch2/catch_amalgamated.hpp>

#include "lod2/lod2.hpp"

TEST_CASE("umbrella header compiles and basic types construct") {
    lod2::Mask m(4, 4);
    m.at(1, 1) = 1;
    REQUIRE(m.count_set() == 1);
    lod2::Config cfg;
    REQUIRE(cfg.T_l == 90.0);
    REQUIRE(cfg.T_d == 10.0);
    REQUIRE(cfg.T_h1 == 0.5);
    REQUIRE(cfg.T_h2 == 0.1);
}

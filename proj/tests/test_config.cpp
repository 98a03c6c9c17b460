#include <catch2/catch_amalgamated.hpp>

#include "lod2/config.hpp"

using namespace lod2;

TEST_CASE("defaults are the documented working point and validate cleanly") {
    Config cfg;
    REQUIRE(cfg.T_l == 90.0);
    REQUIRE(cfg.T_d == 10.0);
    REQUIRE(cfg.T_h1 == 0.5);
    REQUIRE(cfg.T_h2 == 0.1);
    std::vector<std::string> warnings;
    REQUIRE_NOTHROW(validate_config(cfg, &warnings));
    REQUIRE(warnings.empty());
}

TEST_CASE("range bounds are inclusive") {
    Config cfg;
    cfg.T_l = 45.0;
    cfg.T_d = 6.0;
    cfg.T_h1 = 0.5;
    cfg.T_h2 = 0.1;
    REQUIRE_NOTHROW(validate_config(cfg));
    cfg.T_l = 150.0;
    cfg.T_d = 20.0;
    cfg.T_h1 = 1.5;
    cfg.T_h2 = 0.3;
    REQUIRE_NOTHROW(validate_config(cfg));
}

TEST_CASE("out-of-range thresholds are rejected with the range in the message") {
    struct Case {
        double Config::* field;
        double value;
        const char* range;
    };
    std::vector<Case> cases{
        {&Config::T_l, 44.9, "[45, 150]"},   {&Config::T_l, 150.1, "[45, 150]"},
        {&Config::T_d, 5.0, "[6, 20]"},      {&Config::T_d, 25.0, "[6, 20]"},
        {&Config::T_h1, 0.49, "[0.5, 1.5]"}, {&Config::T_h1, 2.0, "[0.5, 1.5]"},
        {&Config::T_h2, 0.0, "[0.1, 0.3]"},  {&Config::T_h2, 0.5, "[0.1, 0.3]"},
    };
    for (const auto& cs : cases) {
        Config cfg;
        cfg.*(cs.field) = cs.value;
        try {
            validate_config(cfg);
            FAIL("expected ConfigOutOfRange");
        } catch (const ConfigOutOfRange& e) {
            std::string msg = e.what();
            INFO(msg);
            REQUIRE(msg.find(cs.range) != std::string::npos);
        }
    }
}

TEST_CASE("nan never passes the range check") {
    Config cfg;
    cfg.T_d = std::nan("");
    REQUIRE_THROWS_AS(validate_config(cfg), ConfigOutOfRange);
}

TEST_CASE("engineering parameters far from defaults only warn") {
    Config cfg;
    cfg.road_d_max_m = 200.0;  // > 4x default of 30
    cfg.z_step_m = 0.05;       // < 1/4 default of 0.25
    std::vector<std::string> warnings;
    REQUIRE_NOTHROW(validate_config(cfg, &warnings));
    REQUIRE(warnings.size() == 2);
    REQUIRE(warnings[0].find("road_d_max_m") != std::string::npos);
    REQUIRE(warnings[1].find("z_step_m") != std::string::npos);
}

TEST_CASE("structural parameters still have hard floors") {
    Config cfg;
    cfg.epsilon_dp_px = 0.0;
    REQUIRE_THROWS_AS(validate_config(cfg), ConfigOutOfRange);
    Config cfg2;
    cfg2.jobs = 0;
    REQUIRE_THROWS_AS(validate_config(cfg2), ConfigOutOfRange);
}

#include <doctest.h>

#include <cmath>

#include "searcheq/demand.hpp"
#include "searcheq/errors.hpp"
#include "oracles.hpp"

using namespace searcheq;

TEST_CASE("linear demand monopoly point and surplus map") {
    SurplusMap m(make_demand(DemandFamily::linear, {1.0, 1.0}));
    CHECK(m.p_m() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(m.pi_m() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m.v0() == doctest::Approx(0.5).epsilon(1e-14));
    for (double pi : {0.01, 0.1, 0.2, 0.249}) {
        CHECK(m.v(pi) == doctest::Approx(oracle::lin_v(pi)).epsilon(1e-12));
        CHECK(-m.v_prime(pi) == doctest::Approx(oracle::lin_minus_v_prime(pi)).epsilon(1e-9));
    }
    CHECK(m.v(0.0) == doctest::Approx(m.v0()));
    CHECK(m.price_for_revenue(m.pi_m()) == m.p_m());
}

TEST_CASE("v' is -1 at zero revenue and diverges toward pi_m") {
    for (auto [family, params] : {std::pair{DemandFamily::linear, std::vector<double>{2.0, 0.5}},
                                  std::pair{DemandFamily::quadratic, std::vector<double>{1.0, 1.0}},
                                  std::pair{DemandFamily::truncated_isoelastic, std::vector<double>{1.0, 2.0}}}) {
        SurplusMap m(make_demand(family, params));
        CHECK(m.v_prime(0.0) == doctest::Approx(-1.0));
        double prev = 0.0;
        for (int i = 0; i <= 50; ++i) {
            double vp = m.v_prime(m.pi_m() * i / 51.0);
            CHECK(vp < prev);
            prev = vp;
        }
        CHECK_THROWS_AS(m.v_prime(m.pi_m()), DomainError);
    }
}

TEST_CASE("demand validation") {
    CHECK_THROWS_AS(make_demand(DemandFamily::linear, {1.0, -1.0}), InvalidDemand);
    CHECK_THROWS_AS(make_demand(DemandFamily::linear, {1.0, 0.0}), InvalidDemand);
    CHECK_THROWS_AS(make_demand(DemandFamily::linear, {1.0}), InvalidDemand);
    CHECK_THROWS_AS(make_demand(DemandFamily::quadratic, {0.0, 1.0}), InvalidDemand);
    CHECK_THROWS_AS(make_demand(DemandFamily::truncated_isoelastic, {1.0, std::nan("")}), InvalidDemand);
    CHECK_THROWS_AS(parse_demand_family("cubic"), InvalidDemand);
    CHECK(parse_demand_family("truncated-isoelastic") == DemandFamily::truncated_isoelastic);
}

TEST_CASE("surplus outside the price domain is rejected") {
    auto d = make_demand(DemandFamily::linear, {1.0, 1.0});
    CHECK_THROWS_AS(surplus_at_price(d, -0.1), DomainError);
    CHECK_THROWS_AS(surplus_at_price(d, 1.1), DomainError);
    CHECK(surplus_at_price(d, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("property: v is decreasing and concave on random demand curves") {
    std::uint64_t state = 12345;
    auto next = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 20; ++trial) {
        double a = 0.5 + 2.0 * next();
        double b = 0.2 + 3.0 * next();
        auto family = trial % 3 == 0 ? DemandFamily::linear
                      : trial % 3 == 1 ? DemandFamily::quadratic
                                       : DemandFamily::truncated_isoelastic;
        SurplusMap m(make_demand(family, {a, b}));
        double prev_v = m.v0();
        double prev_slope = m.v_prime(0.0);
        for (int i = 1; i < 30; ++i) {
            double pi = m.pi_m() * i / 30.0;
            double v = m.v(pi);
            double slope = m.v_prime(pi);
            CHECK(v < prev_v);
            CHECK(slope < prev_slope);
            prev_v = v;
            prev_slope = slope;
        }
    }
}

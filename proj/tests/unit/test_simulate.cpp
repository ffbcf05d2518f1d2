#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "searcheq/errors.hpp"
#include "searcheq/simulate.hpp"
#include "searcheq/welfare.hpp"

using namespace searcheq;

namespace {

SurplusMap linear_map() { return SurplusMap(make_demand(DemandFamily::linear, {1.0, 1.0})); }

SimConfig small_config(int threads = 1) {
    SimConfig c;
    c.master_seed = 99;
    c.replications = 8;
    c.consumers_per_replication = 5000;
    c.threads = threads;
    return c;
}

bool same(const SimResult& a, const SimResult& b) {
    if (a.replications.size() != b.replications.size()) return false;
    for (std::size_t i = 0; i < a.replications.size(); ++i) {
        const auto& x = a.replications[i];
        const auto& y = b.replications[i];
        if (x.industry_profit != y.industry_profit || x.consumer_surplus != y.consumer_surplus ||
            x.firm_profit != y.firm_profit || x.searches != y.searches) {
            return false;
        }
    }
    return a.industry_profit.mean == b.industry_profit.mean && a.industry_profit.se == b.industry_profit.se &&
           a.ks_distance == b.ks_distance;
}

} // namespace

TEST_CASE("random stream is a pure function of seed, replication and counter") {
    RandomStream a(7, 3), b(7, 3), c(7, 4);
    for (int i = 0; i < 100; ++i) {
        double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(RandomStream(7, 3).next_u64() != c.next_u64());
    RandomStream d(1, 1);
    for (int i = 0; i < 1000; ++i) CHECK(d.below(3) < 3);
}

TEST_CASE("nearby seeds do not share replication streams") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        for (std::uint64_t rep = 0; rep < 32; ++rep) firsts.insert(RandomStream(seed, rep).next_u64());
    }
    CHECK(firsts.size() == 4 * 32);
}

TEST_CASE("results are identical across thread counts") {
    auto eq = solve_linear({3, 0.4, 0.05}, linear_map());
    CHECK(same(simulate_sequential(eq, small_config(1)), simulate_sequential(eq, small_config(5))));
    auto noisy = solve_noisy_two_part({{0.5, 0.5}, 0.1}, linear_map());
    CHECK(same(simulate_noisy(noisy, small_config(1)), simulate_noisy(noisy, small_config(3))));
}

TEST_CASE("boundary two-part market: profit 0.25 and no second searches") {
    auto m = linear_map();
    MarketParams p{2, 0.5, 0.3};
    auto fee = solve_two_part(p, m);
    auto cfg = small_config(4);
    cfg.replications = 20;
    cfg.consumers_per_replication = 20000;
    auto r = simulate_sequential(fee, cfg);
    CHECK(std::abs(r.industry_profit.mean - 0.25) <= 3.0 * r.industry_profit.se);
    CHECK(r.second_round_searches == 0);
    CHECK(r.purchases == r.consumers);
    CHECK(r.ks_pass());
    for (const auto& firm : r.firm_profit) {
        CHECK(std::abs(firm.mean - fee.per_firm_profit) <= 3.0 * firm.se);
    }
}

TEST_CASE("noisy buyers all purchase in the first round") {
    auto m = linear_map();
    auto fee = solve_noisy_two_part({{0.5, 0.5}, 0.3}, m);
    auto r = simulate_noisy(fee, small_config(2));
    CHECK(r.second_round_searches == 0);
    CHECK(r.purchases == r.consumers);
    CHECK(r.searches.mean == 1.0);
}

TEST_CASE("nonshoppers search on when offers exceed the reservation value") {
    auto m = linear_map();
    auto eq = solve_two_part({2, 0.5, 0.1}, m);
    eq.reservation = 0.5 * (eq.lower + eq.upper); // deliberately off-equilibrium
    auto r = simulate_sequential(eq, small_config());
    CHECK(r.second_round_searches > 0);
    CHECK(r.purchases == r.consumers);
    eq.reservation = 0.0; // nobody acceptable: buy at the best offer after visiting all firms
    auto all = simulate_sequential(eq, small_config());
    CHECK(all.searches.mean == 2.0);
    CHECK(all.purchases == all.consumers);
}

TEST_CASE("near-competitive market has vanishing profit") {
    auto eq = solve_two_part({2, 1.0 - 1e-9, 0.1}, linear_map());
    auto r = simulate_sequential(eq, small_config());
    CHECK(r.industry_profit.mean < 1e-6);
}

TEST_CASE("configuration errors") {
    auto eq = solve_two_part({2, 0.5, 0.1}, linear_map());
    SimConfig c = small_config();
    c.replications = 0;
    CHECK_THROWS_AS(simulate_sequential(eq, c), ConfigError);
    c = small_config();
    c.consumers_per_replication = 0;
    CHECK_THROWS_AS(simulate_sequential(eq, c), ConfigError);
    c = small_config();
    c.threads = 0;
    CHECK_THROWS_AS(simulate_sequential(eq, c), ConfigError);
    c = small_config();
    c.consumers_per_replication = 100;
    CHECK(c.undersized());
    CHECK(simulate_sequential(eq, c).undersized);
}

TEST_CASE("replication CSV has one row per replication") {
    auto eq = solve_two_part({2, 0.5, 0.1}, linear_map());
    auto r = simulate_sequential(eq, small_config());
    std::ostringstream out;
    write_replications_csv(out, r);
    std::string s = out.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 9);
    CHECK(s.rfind("replication,industry_profit", 0) == 0);
}

TEST_CASE("ks distance of exact quantiles is small") {
    std::vector<double> xs;
    for (int i = 0; i < 1000; ++i) xs.push_back((i + 0.5) / 1000.0);
    CHECK(ks_distance(xs, [](double x) { return x; }) == doctest::Approx(0.0005));
}

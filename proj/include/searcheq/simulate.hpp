#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "searcheq/noisy.hpp"
#include "searcheq/stahl.hpp"

namespace searcheq {

/// Counter-based stream: draw i of a replication is a pure function of
/// (master seed, replication index, i), so results do not depend on how
/// replications are scheduled across threads.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t replication);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

struct SimConfig {
    std::uint64_t master_seed = 1;
    int replications = 20;
    long long consumers_per_replication = 50'000;
    int threads = 1;
    int max_rounds = 10'000; // noisy search: rounds before a buyer gives up

    /// Throws ConfigError on non-positive counts.
    void validate() const;
    /// replications * consumers below 1e4: standard errors are not meaningful.
    bool undersized() const;
};

struct Estimate {
    double mean = 0.0;
    double se = 0.0; // across replications; nan with a single replication
};

/// Raw per-replication averages over consumers.
struct ReplicationStats {
    double industry_profit = 0.0;
    double consumer_surplus = 0.0;
    double paid_shoppers = 0.0;    // mean offer paid by shoppers (sequential)
    double paid_nonshoppers = 0.0; // mean offer paid by nonshoppers / noisy buyers
    double searches = 0.0;         // mean firms visited (nonshoppers) or rounds (noisy)
    long long second_round_searches = 0;
    long long purchases = 0;
    std::vector<double> firm_profit; // sequential only, per consumer
};

struct SimResult {
    Estimate industry_profit;
    Estimate consumer_surplus;
    Estimate paid_shoppers;
    Estimate paid_nonshoppers;
    Estimate searches;
    std::vector<Estimate> firm_profit;
    long long consumers = 0;
    long long purchases = 0;
    long long second_round_searches = 0;
    /// KS distance between the first offer drawn per consumer and the
    /// analytic CDF, with the 1% critical value 1.63 / sqrt(N).
    double ks_distance = 0.0;
    double ks_critical = 0.0;
    long long ks_samples = 0;
    bool undersized = false;
    std::vector<ReplicationStats> replications;

    bool ks_pass() const { return ks_distance <= ks_critical; }
};

/// Each consumer meets a fresh draw of n equilibrium offers. Shoppers buy at
/// the minimum; nonshoppers visit firms in random order, buy at the first
/// offer within the reservation value and otherwise pay s per extra visit.
/// Offers are fees (two-part) or per-consumer revenues (linear).
SimResult simulate_sequential(const SequentialEquilibrium& eq, const SimConfig& cfg);

/// Each round a buyer receives k ~ mu offers; the first round is free.
SimResult simulate_noisy(const NoisyEquilibrium& eq, const SimConfig& cfg);

/// One row per replication.
void write_replications_csv(std::ostream& out, const SimResult& r);

/// Kolmogorov-Smirnov distance of samples from cdf; sorts `samples`.
double ks_distance(std::vector<double>& samples, const std::function<double(double)>& cdf);

} // namespace searcheq

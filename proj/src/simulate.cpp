#include "searcheq/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "searcheq/errors.hpp"
#include "searcheq/format.hpp"

namespace searcheq {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

Estimate estimate_of(const std::vector<double>& values) {
    Estimate e;
    std::size_t n = values.size();
    e.mean = pairwise_sum(values.data(), n) / static_cast<double>(n);
    if (n < 2) {
        e.se = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
    double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    e.se = std::sqrt(var / static_cast<double>(n));
    return e;
}

template <class Field>
Estimate collect(const std::vector<ReplicationStats>& reps, Field&& field) {
    std::vector<double> v;
    v.reserve(reps.size());
    for (const auto& r : reps) v.push_back(field(r));
    return estimate_of(v);
}

// Runs body(rep, stats, first_offers) for every replication on cfg.threads
// workers; outputs land in index order so the schedule never matters.
template <class Body>
SimResult run_replications(const SimConfig& cfg, const std::function<double(double)>& cdf,
                           Body&& body) {
    cfg.validate();
    std::size_t reps = static_cast<std::size_t>(cfg.replications);
    std::vector<ReplicationStats> stats(reps);
    std::vector<std::vector<double>> first_offers(reps);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < reps; i = next++) {
            body(i, stats[i], first_offers[i]);
        }
    };
    int threads = std::min<int>(cfg.threads, cfg.replications);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SimResult r;
    r.industry_profit = collect(stats, [](const auto& s) { return s.industry_profit; });
    r.consumer_surplus = collect(stats, [](const auto& s) { return s.consumer_surplus; });
    r.paid_shoppers = collect(stats, [](const auto& s) { return s.paid_shoppers; });
    r.paid_nonshoppers = collect(stats, [](const auto& s) { return s.paid_nonshoppers; });
    r.searches = collect(stats, [](const auto& s) { return s.searches; });
    std::size_t firms = stats.front().firm_profit.size();
    for (std::size_t j = 0; j < firms; ++j) {
        r.firm_profit.push_back(collect(stats, [j](const auto& s) { return s.firm_profit[j]; }));
    }
    r.consumers = cfg.consumers_per_replication * cfg.replications;
    for (const auto& s : stats) {
        r.purchases += s.purchases;
        r.second_round_searches += s.second_round_searches;
    }
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(r.consumers));
    for (const auto& f : first_offers) pooled.insert(pooled.end(), f.begin(), f.end());
    r.ks_samples = static_cast<long long>(pooled.size());
    r.ks_distance = ks_distance(pooled, cdf);
    r.ks_critical = 1.63 / std::sqrt(static_cast<double>(r.ks_samples));
    r.undersized = cfg.undersized();
    r.replications = std::move(stats);
    return r;
}

double mean_or_nan(double sum, long long count) {
    return count > 0 ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t replication)
    : key_(mix64(mix64(master_seed) + (replication + 1) * kGolden)) {}

std::uint64_t RandomStream::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double RandomStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RandomStream::below(std::uint64_t bound) {
    // Rejection keeps the draw unbiased for bounds that do not divide 2^64.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        std::uint64_t x = next_u64();
        if (x < limit) return x % bound;
    }
}

void SimConfig::validate() const {
    if (replications < 1) {
        throw ConfigError("simulation.replications must be >= 1 (got " + std::to_string(replications) + ")");
    }
    if (consumers_per_replication < 1) {
        throw ConfigError("simulation.consumers_per_replication must be >= 1 (got " +
                          std::to_string(consumers_per_replication) + ")");
    }
    if (threads < 1) throw ConfigError("simulation.threads must be >= 1 (got " + std::to_string(threads) + ")");
    if (max_rounds < 1) throw ConfigError("simulation.max_rounds must be >= 1");
}

bool SimConfig::undersized() const {
    return static_cast<double>(replications) * static_cast<double>(consumers_per_replication) < 1e4;
}

double ks_distance(std::vector<double>& samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

SimResult simulate_sequential(const SequentialEquilibrium& eq, const SimConfig& cfg) {
    const MarketParams& params = eq.params;
    const SurplusMap& m = eq.surplus;
    const bool fees = eq.regime == Regime::two_part;
    const std::size_t n = static_cast<std::size_t>(params.n);
    auto surplus_of = [&](double offer) { return fees ? m.v0() - offer : m.v(offer); };

    auto body = [&](std::size_t rep, ReplicationStats& st, std::vector<double>& first) {
        RandomStream rng(cfg.master_seed, rep);
        std::vector<double> offers(n);
        std::vector<std::size_t> order(n);
        std::vector<double> firm_revenue(n, 0.0);
        double profit = 0.0, cs = 0.0, paid_s = 0.0, paid_ns = 0.0, visits = 0.0;
        long long shoppers = 0, nonshoppers_bought = 0, nonshoppers = 0;
        first.reserve(static_cast<std::size_t>(cfg.consumers_per_replication));
        for (long long c = 0; c < cfg.consumers_per_replication; ++c) {
            for (auto& x : offers) x = eq.quantile(rng.uniform());
            first.push_back(offers[0]);
            bool shopper = rng.uniform() < params.lambda;
            std::size_t chosen = n;
            double search_cost = 0.0;
            if (shopper) {
                ++shoppers;
                chosen = static_cast<std::size_t>(std::min_element(offers.begin(), offers.end()) -
                                                  offers.begin());
            } else {
                ++nonshoppers;
                for (std::size_t i = 0; i < n; ++i) order[i] = i;
                for (std::size_t i = n - 1; i > 0; --i) {
                    std::swap(order[i], order[rng.below(i + 1)]);
                }
                std::size_t visited = 0;
                for (; visited < n; ++visited) {
                    if (visited > 0) {
                        search_cost += params.s;
                        ++st.second_round_searches;
                    }
                    if (offers[order[visited]] <= eq.reservation) {
                        chosen = order[visited];
                        break;
                    }
                }
                if (chosen == n) {
                    visited = n;
                    std::size_t best = static_cast<std::size_t>(
                        std::min_element(offers.begin(), offers.end()) - offers.begin());
                    if (surplus_of(offers[best]) > 0.0) chosen = best;
                } else {
                    ++visited;
                }
                visits += static_cast<double>(visited);
            }
            cs -= search_cost;
            if (chosen == n) continue;
            double x = offers[chosen];
            ++st.purchases;
            profit += x;
            firm_revenue[chosen] += x;
            cs += surplus_of(x);
            if (shopper) {
                paid_s += x;
            } else {
                paid_ns += x;
                ++nonshoppers_bought;
            }
        }
        double consumers = static_cast<double>(cfg.consumers_per_replication);
        st.industry_profit = profit / consumers;
        st.consumer_surplus = cs / consumers;
        st.paid_shoppers = mean_or_nan(paid_s, shoppers);
        st.paid_nonshoppers = mean_or_nan(paid_ns, nonshoppers_bought);
        st.searches = mean_or_nan(visits, nonshoppers);
        st.firm_profit.resize(n);
        for (std::size_t j = 0; j < n; ++j) st.firm_profit[j] = firm_revenue[j] / consumers;
    };
    return run_replications(cfg, [&eq](double x) { return eq.cdf_extended(x); }, body);
}

SimResult simulate_noisy(const NoisyEquilibrium& eq, const SimConfig& cfg) {
    const NoisyParams& p = eq.params;
    const SurplusMap& m = eq.surplus;
    const bool fees = eq.regime == Regime::two_part;
    auto surplus_of = [&](double offer) { return fees ? m.v0() - offer : m.v(offer); };
    std::vector<double> mu_cum;
    double acc = 0.0;
    for (int k = 1; k <= p.m(); ++k) mu_cum.push_back(acc += p.mu_at(k));

    auto body = [&](std::size_t rep, ReplicationStats& st, std::vector<double>& first) {
        RandomStream rng(cfg.master_seed, rep);
        double profit = 0.0, cs = 0.0, paid = 0.0, rounds_total = 0.0;
        first.reserve(static_cast<std::size_t>(cfg.consumers_per_replication));
        for (long long c = 0; c < cfg.consumers_per_replication; ++c) {
            double search_cost = 0.0;
            bool bought = false;
            int round = 0;
            while (!bought && round < cfg.max_rounds) {
                if (round > 0) {
                    search_cost += p.s;
                    ++st.second_round_searches;
                }
                ++round;
                double u = rng.uniform();
                int k = 1;
                while (k < p.m() && u >= mu_cum[static_cast<std::size_t>(k - 1)]) ++k;
                double best = std::numeric_limits<double>::infinity();
                for (int i = 0; i < k; ++i) {
                    double x = eq.quantile(rng.uniform());
                    if (round == 1 && i == 0) first.push_back(x);
                    best = std::min(best, x);
                }
                if (best <= eq.reservation) {
                    bought = true;
                    ++st.purchases;
                    profit += best;
                    paid += best;
                    cs += surplus_of(best);
                }
            }
            cs -= search_cost;
            rounds_total += round;
        }
        double consumers = static_cast<double>(cfg.consumers_per_replication);
        st.industry_profit = profit / consumers;
        st.consumer_surplus = cs / consumers;
        st.paid_shoppers = std::numeric_limits<double>::quiet_NaN();
        st.paid_nonshoppers = mean_or_nan(paid, st.purchases);
        st.searches = rounds_total / consumers;
    };
    return run_replications(cfg, [&eq](double x) { return eq.cdf_extended(x); }, body);
}

void write_replications_csv(std::ostream& out, const SimResult& r) {
    out << "replication,industry_profit,consumer_surplus,paid_shoppers,paid_nonshoppers,searches,"
           "second_round_searches,purchases\n";
    for (std::size_t i = 0; i < r.replications.size(); ++i) {
        const auto& s = r.replications[i];
        out << i << ',' << format_double(s.industry_profit) << ',' << format_double(s.consumer_surplus)
            << ',' << format_double(s.paid_shoppers) << ',' << format_double(s.paid_nonshoppers) << ','
            << format_double(s.searches) << ',' << s.second_round_searches << ',' << s.purchases
            << '\n';
    }
}

} // namespace searcheq

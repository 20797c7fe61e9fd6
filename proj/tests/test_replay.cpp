#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "delayarb/json_io.hpp"
#include "delayarb/replay.hpp"
#include "oracles.hpp"

using namespace delayarb;

namespace {

PoolStats stats(const char* id, std::int64_t volume, std::int64_t liquidity) {
    return PoolStats{id, Fixed(volume), Fixed(liquidity)};
}

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
};

BriberyScenario replay_scenario() {
    NetworkParams params;
    params.validator_count = 600'000;
    return BriberyScenario::canonical(params, *Fixed::parse("0.2"), Fixed(0), Fixed(0));
}

ReplayConfig replay_config() {
    ReplayConfig config;
    config.scenario = replay_scenario();
    config.bribable_fraction = *Fixed::parse("0.4");
    config.proposer_bribable = false;
    config.base_asset = "A";
    config.target = Fixed(0);
    config.gas_price_gwei = Fixed(30);
    config.gas_per_hop = 120'000;
    return config;
}

//! Slot-2 snapshot with one exact opportunity (virtual pool (50,200)).
MarketState opportunity_market() {
    MarketState state;
    state.add_pool({"p1", "v", "A", "B", Fixed(100), Fixed(300), Fixed(0)});
    state.add_pool({"p2", "v", "B", "A", Fixed(300), Fixed(400), Fixed(0)});
    return state;
}

MarketState flat_market() {
    MarketState state;
    state.add_pool({"q1", "v", "A", "B", Fixed(100), Fixed(100), Fixed(0)});
    state.add_pool({"q2", "v", "B", "A", Fixed(100), Fixed(100), Fixed(0)});
    return state;
}

}  // namespace

TEST_CASE("pool selection heuristics") {
    SUBCASE("lower liquidity wins at equal volume") {
        const auto picked = select_pools({stats("deep", 100, 100), stats("shallow", 100, 10)}, 1);
        CHECK(picked == std::vector<std::string>{"shallow"});
    }
    SUBCASE("higher volume wins at equal liquidity") {
        const auto picked = select_pools({stats("quiet", 10, 100), stats("busy", 1000, 100)}, 1);
        CHECK(picked == std::vector<std::string>{"busy"});
    }
    SUBCASE("k = 0 selects nothing") {
        CHECK(select_pools({stats("a", 1, 1)}, 0).empty());
    }
    SUBCASE("k beyond the list is an error") {
        CHECK_THROWS_AS(select_pools({stats("a", 1, 1)}, 2), std::invalid_argument);
        CHECK_THROWS_AS(select_pools_random({stats("a", 1, 1)}, 2, 1), std::invalid_argument);
    }
    SUBCASE("score ties break by pool id") {
        const auto picked = select_pools({stats("b", 100, 10), stats("a", 200, 20)}, 2);
        CHECK(picked == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("the random baseline is seed-deterministic") {
        const std::vector<PoolStats> pools = {stats("a", 1, 1), stats("b", 1, 1),
                                              stats("c", 1, 1), stats("d", 1, 1)};
        CHECK(select_pools_random(pools, 2, 42) == select_pools_random(pools, 2, 42));
        CHECK(select_pools_random(pools, 4, 1).size() == 4);
    }
}

TEST_CASE("fixture loading") {
    SUBCASE("valid pools file") {
        TempFile file("pools-ok.json", R"([
            {"pool_id":"p1","venue":"v","token0":"A","token1":"B","reserve0":"100","reserve1":"300","fee":"0"},
            {"pool_id":"p2","venue":"v","token0":"B","token1":"A","reserve0":"300","reserve1":"400","fee":"0.003"}
        ])");
        const MarketState state = load_pools(file.path);
        CHECK(state.size() == 2);
        CHECK(state.pool("p2").fee == *Fixed::parse("0.003"));
    }
    SUBCASE("a malformed reserve names the field") {
        TempFile file("pools-bad.json",
                      R"([{"pool_id":"p1","venue":"v","token0":"A","token1":"B","reserve0":"abc","reserve1":"1","fee":"0"}])");
        CHECK_THROWS_WITH_AS(load_pools(file.path),
                             doctest::Contains("reserve0"), SchemaError);
    }
    SUBCASE("duplicate pool ids are rejected") {
        TempFile file("pools-dup.json", R"([
            {"pool_id":"p1","venue":"v","token0":"A","token1":"B","reserve0":"1","reserve1":"1","fee":"0"},
            {"pool_id":"p1","venue":"v","token0":"A","token1":"B","reserve0":"2","reserve1":"2","fee":"0"}
        ])");
        CHECK_THROWS_WITH_AS(load_pools(file.path), doctest::Contains("duplicate"), SchemaError);
    }
    SUBCASE("mempool lines parse with line numbers in errors") {
        TempFile good("mempool-ok.jsonl",
                      "{\"tx_id\":\"t1\",\"observed_ms\":100,\"pool_id\":\"p\",\"input_token\":\"A\",\"amount_in\":\"5\"}\n"
                      "{\"tx_id\":\"t2\",\"observed_ms\":200,\"pool_id\":\"p\",\"input_token\":\"B\",\"amount_in\":\"7\"}\n");
        CHECK(load_mempool(good.path).size() == 2);

        TempFile bad("mempool-bad.jsonl",
                     "{\"tx_id\":\"t1\",\"observed_ms\":100,\"pool_id\":\"p\",\"input_token\":\"A\",\"amount_in\":\"5\"}\n"
                     "{\"tx_id\":\"t2\"}\n");
        CHECK_THROWS_WITH_AS(load_mempool(bad.path), doctest::Contains(":2"), SchemaError);

        TempFile dup("mempool-dup.jsonl",
                     "{\"tx_id\":\"t1\",\"observed_ms\":100,\"pool_id\":\"p\",\"input_token\":\"A\",\"amount_in\":\"5\"}\n"
                     "{\"tx_id\":\"t1\",\"observed_ms\":200,\"pool_id\":\"p\",\"input_token\":\"B\",\"amount_in\":\"7\"}\n");
        CHECK_THROWS_WITH_AS(load_mempool(dup.path), doctest::Contains("duplicate"), SchemaError);
    }
    SUBCASE("stats csv") {
        TempFile file("stats.csv", "pool_id,volume,liquidity\np1,100,10\np2,50,100\n");
        const auto loaded = load_pool_stats_csv(file.path);
        REQUIRE(loaded.size() == 2);
        CHECK(loaded[0].pool_id == "p1");
        CHECK(loaded[1].liquidity == Fixed(100));

        TempFile bad("stats-bad.csv", "pool_id,volume,liquidity\np1,xx,10\n");
        CHECK_THROWS_WITH_AS(load_pool_stats_csv(bad.path), doctest::Contains("volume"),
                             SchemaError);
    }
}

TEST_CASE("strategy validation against gas") {
    ArbitrageStrategy strategy;
    strategy.path.assets = {"A", "B", "A"};
    strategy.path.pools = {"p1", "p2"};
    strategy.revenue = *Fixed::parse("0.1");  // 1e8 GWei

    SUBCASE("hand-checked net") {
        // gas = 12.5 GWei * 120k gas * 2 hops = 3e6 GWei
        const Fixed net = validate_strategy(strategy, *Fixed::parse("12.5"), 120'000);
        CHECK(net == Fixed(97'000'000));
    }
    SUBCASE("revenue below gas is rejected") {
        strategy.revenue = *Fixed::parse("0.000001");
        const Fixed net = validate_strategy(strategy, *Fixed::parse("12.5"), 120'000);
        CHECK_FALSE(net.is_positive());
    }
    SUBCASE("zero gas price passes revenue through") {
        CHECK(validate_strategy(strategy, Fixed(0), 120'000) == Fixed(100'000'000));
    }
}

TEST_CASE("capital requirement") {
    ArbitrageStrategy strategy;
    strategy.amount = Fixed(50);
    CHECK(capital_requirement(strategy, false, Fixed(0), Fixed(0)) == Fixed(50));
    CHECK(capital_requirement(strategy, true, Fixed(0), Fixed(0)) == Fixed(0));
    strategy.amount = Fixed(1000);
    const Fixed fee = *Fixed::parse("0.0009");
    const Fixed gas = *Fixed::parse("0.01");
    CHECK(capital_requirement(strategy, true, fee, gas) == *Fixed::parse("0.9") + gas);
}

TEST_CASE("replay over a three-slot fixture") {
    std::map<std::int64_t, MarketState> snapshots;
    snapshots.emplace(1, flat_market());
    snapshots.emplace(2, opportunity_market());
    snapshots.emplace(3, flat_market());

    const ReplayReport report = replay(snapshots, {}, replay_config());
    REQUIRE(report.slots.size() == 3);

    SUBCASE("only the opportunity slot executes") {
        CHECK(report.slots[0].decision == "honest");
        CHECK(report.slots[0].strategies == 0);
        CHECK(report.slots[2].strategies == 0);

        const ReplaySlotRecord& hit = report.slots[1];
        CHECK(hit.decision == "bribe_validators");
        CHECK(hit.strategies == 1);
        CHECK(hit.gross_revenue == Fixed(50));
        // 30 GWei * 120k * 2 hops = 7.2e6 GWei = 0.0072 A
        CHECK(hit.gas_cost == *Fixed::parse("0.0072"));
        // 3750 bribees: fee 3750 GWei + withdrawal 3750*501 GWei
        CHECK(hit.bribery_cost == *Fixed::parse("0.0018825"));
        CHECK(hit.net_profit == *Fixed::parse("49.9909175"));
        CHECK(hit.capital_required == *Fixed::parse("50.0072"));
        CHECK(hit.capital_with_flash_loan == *Fixed::parse("0.0072"));
    }
    SUBCASE("totals are exact sums of the rows") {
        Fixed gross(0), gas(0), bribery(0), net(0);
        for (const ReplaySlotRecord& record : report.slots) {
            gross += record.gross_revenue;
            gas += record.gas_cost;
            bribery += record.bribery_cost;
            net += record.net_profit;
        }
        CHECK(report.total_gross == gross);
        CHECK(report.total_net == net);
        CHECK(report.total_net == report.total_gross - report.total_gas - report.total_bribery);
        CHECK(report.total_strategies == 1);
    }
    SUBCASE("csv and json render without losing the totals") {
        const std::string csv = report_to_csv(report);
        CHECK(csv.find("49.9909175") != std::string::npos);
        const std::string json_text = to_json(report);
        CHECK(json_text.find("\"net_profit\": \"49.9909175\"") != std::string::npos);
    }
}

TEST_CASE("replay edge cases") {
    SUBCASE("empty mempool and flat markets stay honest") {
        std::map<std::int64_t, MarketState> snapshots;
        snapshots.emplace(1, flat_market());
        const ReplayReport report = replay(snapshots, {}, replay_config());
        REQUIRE(report.slots.size() == 1);
        CHECK(report.slots[0].decision == "honest");
        CHECK(report.total_net == Fixed(0));
    }
    SUBCASE("a missing snapshot is skipped with a warning record") {
        std::map<std::int64_t, MarketState> snapshots;
        snapshots.emplace(1, flat_market());
        snapshots.emplace(3, flat_market());
        const ReplayReport report = replay(snapshots, {}, replay_config());
        REQUIRE(report.slots.size() == 3);
        CHECK(report.slots[1].snapshot_missing);
    }
    SUBCASE("revenue below the bribery cost stays honest and costs nothing") {
        // scale the opportunity down until it cannot pay for 3750 bribees
        MarketState tiny;
        tiny.add_pool({"p1", "v", "A", "B", *Fixed::parse("0.0001"), *Fixed::parse("0.0003"),
                       Fixed(0)});
        tiny.add_pool({"p2", "v", "B", "A", *Fixed::parse("0.0003"), *Fixed::parse("0.0004"),
                       Fixed(0)});
        std::map<std::int64_t, MarketState> snapshots;
        snapshots.emplace(1, tiny);
        ReplayConfig config = replay_config();
        config.gas_price_gwei = Fixed(0);
        const ReplayReport report = replay(snapshots, {}, config);
        REQUIRE(report.slots.size() == 1);
        CHECK(report.slots[0].decision == "honest");
        CHECK(report.slots[0].bribery_cost == Fixed(0));
        CHECK(report.slots[0].strategies == 0);
    }
    SUBCASE("mempool window honours the 8-second cut-off") {
        std::map<std::int64_t, MarketState> snapshots;
        snapshots.emplace(0, test::motivating_market());
        MempoolTx tx = test::motivating_user_tx();
        tx.observed_ms = 8'000;  // arrives after the ordering search started
        ReplayConfig config = replay_config();
        config.gas_price_gwei = Fixed(0);
        const ReplayReport inside = replay(snapshots, {test::motivating_user_tx()}, config);
        const ReplayReport outside = replay(snapshots, {tx}, config);
        CHECK(inside.total_strategies == 1);
        CHECK(outside.total_strategies == 0);
    }
}

TEST_CASE("bribing validators nets more than bribing the proposer at equal revenue") {
    std::map<std::int64_t, MarketState> snapshots;
    snapshots.emplace(1, opportunity_market());

    ReplayConfig validators = replay_config();
    const ReplayReport with_validators = replay(snapshots, {}, validators);

    ReplayConfig proposer = replay_config();
    proposer.bribable_fraction = Fixed(0);  // below the required 1/4
    proposer.proposer_bribable = true;
    const ReplayReport with_proposer = replay(snapshots, {}, proposer);

    REQUIRE(with_validators.slots[0].decision == "bribe_validators");
    REQUIRE(with_proposer.slots[0].decision == "bribe_proposer");
    CHECK(with_validators.total_gross == with_proposer.total_gross);
    CHECK(with_validators.total_net > with_proposer.total_net);
}

TEST_CASE("heuristic pool selection beats the random baseline on a planted fixture") {
    // p1/p2 carry the opportunity and the best volume/liquidity scores
    const std::vector<PoolStats> pool_stats = {stats("p1", 5000, 10), stats("p2", 4000, 10),
                                               stats("q1", 10, 1000), stats("q2", 5, 1000)};
    const MarketState with_opportunity = opportunity_market();
    const MarketState without = flat_market();
    MarketState all;
    for (const auto& [id, pool] : with_opportunity.pools()) all.add_pool(pool);
    for (const auto& [id, pool] : without.pools()) all.add_pool(pool);

    const auto run_with = [&](const std::vector<std::string>& selected) {
        MarketState filtered;
        for (const std::string& id : selected) filtered.add_pool(all.pool(id));
        std::map<std::int64_t, MarketState> snapshots;
        snapshots.emplace(1, filtered);
        return replay(snapshots, {}, replay_config()).total_net;
    };

    const auto heuristic = select_pools(pool_stats, 2);
    CHECK(heuristic == std::vector<std::string>{"p1", "p2"});
    const auto random = select_pools_random(pool_stats, 2, 9);
    CHECK(run_with(heuristic) >= run_with(random));
}

TEST_CASE("builder-ordering simulation") {
    const MarketState state = test::motivating_market();
    const StrategySequence sequence =
        run_dtoa(state, {test::motivating_user_tx()}, DtoaConfig{"A", Fixed(0), 4});
    REQUIRE(sequence.size() == 1);
    const ArbitrageStrategy& strategy = sequence[0];

    SUBCASE("mean matches the exhaustive two-ordering average within 3 sigma") {
        // k = 1 prefix tx: the two orderings are (prefix, arb) and (arb, prefix)
        const OrderingResult ordered = order_transactions(strategy.path, state,
                                                          strategy.ordered_prefix);
        const Fixed good = simulate_path(strategy.path, ordered.state, strategy.amount) -
                           strategy.amount;
        MarketState arb_first = state;
        Fixed flow = strategy.amount;
        for (std::size_t i = 0; i < strategy.path.hops(); ++i) {
            SwapResult swapped = apply_swap(arb_first, strategy.path.pools[i],
                                            strategy.path.assets[i], flow);
            arb_first = std::move(swapped.state);
            flow = swapped.amount_out;
        }
        const Fixed bad = flow - strategy.amount;

        const PbsSummary summary = pbs_simulate(state, strategy, 10'000, 5);
        const double expected = (good.to_double() + bad.to_double()) / 2;
        const double spread = std::abs(good.to_double() - bad.to_double()) / 2;
        const double sigma = spread / 100.0;  // sd of the mean over 1e4 coin flips
        CHECK(std::abs(summary.mean_profit.to_double() - expected) <= 3 * sigma);
        CHECK(summary.mean_profit <= summary.controlled_profit);
        CHECK(summary.min_profit == min(good, bad));
        CHECK(summary.max_profit == max(good, bad));
        CHECK(summary.controlled_profit == good);
    }
    SUBCASE("gas is charged on losing orderings") {
        const PbsSummary summary = pbs_simulate(state, strategy, 64, 5, Fixed(1));
        const PbsSummary free = pbs_simulate(state, strategy, 64, 5);
        CHECK(summary.min_profit == free.min_profit - Fixed(1));
        CHECK(summary.controlled_profit == free.controlled_profit - Fixed(1));
    }
    SUBCASE("no prefix means every ordering is the intended one") {
        ArbitrageStrategy bare = strategy;
        bare.ordered_prefix.clear();
        const PbsSummary summary = pbs_simulate(state, bare, 100, 11);
        CHECK(summary.intended_order_fraction == Fixed(1));
        CHECK(summary.mean_profit == summary.controlled_profit);
        CHECK(summary.min_profit == summary.max_profit);
    }
    SUBCASE("the intended-order fraction approaches 1/(k+1)") {
        ArbitrageStrategy padded = strategy;
        for (int i = 0; i < 2; ++i) {
            MempoolTx extra = test::motivating_user_tx();
            extra.tx_id = "pad" + std::to_string(i);
            extra.amount_in = Fixed(1'000);
            padded.ordered_prefix.push_back(extra);
        }
        // k = 3: P(arbitrage last) = 1/4; 3 sigma ~ 0.013 at 1e4 trials
        const PbsSummary summary = pbs_simulate(state, padded, 10'000, 13);
        CHECK(std::abs(summary.intended_order_fraction.to_double() - 0.25) < 0.013);
    }
    SUBCASE("zero trials are rejected") {
        CHECK_THROWS_AS(pbs_simulate(state, strategy, 0, 1), std::invalid_argument);
    }
}

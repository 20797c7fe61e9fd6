#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "delayarb/bribery.hpp"
#include "delayarb/dtoa.hpp"
#include "delayarb/fixed.hpp"

namespace delayarb {

struct PoolStats {
    std::string pool_id;
    Fixed volume;     // 24h volume, quote units
    Fixed liquidity;  // quote units
};

//! Top-k pools by volume/liquidity score (high turnover, shallow pools move
//! most). Ties break by pool_id. Throws when k exceeds the stats size.
std::vector<std::string> select_pools(std::vector<PoolStats> stats, std::size_t k);

//! Seeded uniform baseline selector.
std::vector<std::string> select_pools_random(const std::vector<PoolStats>& stats, std::size_t k,
                                             std::uint64_t seed);

//! Gas charged for one strategy: gas_price * gas_per_hop * hops, in GWei.
Fixed strategy_gas_cost_gwei(const ArbitrageStrategy& strategy, const Fixed& gas_price_gwei,
                             std::int64_t gas_per_hop);

//! Net profit in GWei (revenue at 10^9 GWei per base unit, minus gas).
//! Strategies with net <= 0 are rejected by the replay.
Fixed validate_strategy(const ArbitrageStrategy& strategy, const Fixed& gas_price_gwei,
                        std::int64_t gas_per_hop);

//! Up-front capital in base-asset units: the traded amount plus gas, or with
//! a flash loan only the loan fee plus gas.
Fixed capital_requirement(const ArbitrageStrategy& strategy, bool flash_loan,
                          const Fixed& flash_fee, const Fixed& gas_cost_base);

struct ReplayConfig {
    BriberyScenario scenario;
    Fixed bribable_fraction;
    bool proposer_bribable = false;
    std::string base_asset = "ETH";
    Fixed target;  // minimum revenue per strategy, base units
    Fixed gas_price_gwei = Fixed(30);
    std::int64_t gas_per_hop = 120'000;
    Fixed flash_fee;
    int max_cycle_len = 4;
};

struct ReplaySlotRecord {
    std::int64_t slot = 0;
    bool snapshot_missing = false;
    std::string decision = "honest";
    std::int64_t strategies = 0;  // executed
    Fixed gross_revenue;          // base units
    Fixed gas_cost;
    Fixed bribery_cost;
    Fixed net_profit;  // gross - gas - bribery
    Fixed capital_required;
    Fixed capital_with_flash_loan;
    StrategySequence executed;
};

struct ReplayReport {
    std::vector<ReplaySlotRecord> slots;
    std::int64_t total_strategies = 0;
    Fixed total_gross;
    Fixed total_gas;
    Fixed total_bribery;
    Fixed total_net;
};

//! Block-by-block replay: per slot, run the delayed-ordering search on the
//! snapshot and the mempool window [slot start, slot start + 8 s), validate
//! against gas, and execute only when the adaptive bribery strategy covers
//! its cost. Missing snapshots produce a skip-with-warning record.
ReplayReport replay(const std::map<std::int64_t, MarketState>& snapshots_by_slot,
                    const std::vector<MempoolTx>& mempool, const ReplayConfig& config);

struct PbsSummary {
    std::int64_t trials = 0;
    Fixed mean_profit;  // base units, net of gas
    Fixed min_profit;
    Fixed max_profit;
    Fixed intended_order_fraction;  // arbitrage transaction executed last
    Fixed controlled_profit;        // prefix first, arbitrage last
};

//! Builder-ordering model: each trial executes a uniformly random
//! interleaving of the strategy's prefix transactions and the arbitrage
//! transaction; gas is charged on losing orderings too.
PbsSummary pbs_simulate(const MarketState& state, const ArbitrageStrategy& strategy,
                        std::int64_t trials, std::uint64_t seed,
                        const Fixed& gas_cost_base = Fixed(0));

}  // namespace delayarb

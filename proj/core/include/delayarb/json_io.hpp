#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "delayarb/amm.hpp"
#include "delayarb/bribery.hpp"
#include "delayarb/consensus.hpp"
#include "delayarb/dtoa.hpp"
#include "delayarb/replay.hpp"

namespace delayarb {

//! Raised for malformed fixtures; the message names the offending file,
//! line and field.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

//! pools.json: a top-level array of
//! {pool_id, venue, token0, token1, reserve0, reserve1, fee}
//! with amounts as decimal strings. Duplicate pool ids are rejected.
MarketState load_pools(const std::filesystem::path& path);

//! mempool.jsonl: one JSON object per line with
//! {tx_id, observed_ms, pool_id, input_token, amount_in, gas_price, gas_limit}.
//! Duplicate tx ids are rejected.
std::vector<MempoolTx> load_mempool(const std::filesystem::path& path);

//! pool_stats.csv with header pool_id,volume,liquidity.
std::vector<PoolStats> load_pool_stats_csv(const std::filesystem::path& path);

//! Scenario file with optional sections:
//!   params  — NetworkParams (consumed by every section)
//!   bribery — BriberyScenario fields
//!   sim     — SimScenario (committee, attack, delays, horizon, seed)
//!   replay  — replay knobs (base_asset, target, gas, selector inputs)
struct ScenarioFile {
    NetworkParams params;
    std::optional<BriberyScenario> bribery;
    std::optional<SimScenario> sim;
    std::optional<ReplayConfig> replay;
};

ScenarioFile load_scenario(const std::filesystem::path& path);

//! Per-slot snapshots from a directory of slot-<n>.json files. (For a single
//! pools.json the replay tool applies the one snapshot to every slot of the
//! mempool stream.)
std::map<std::int64_t, MarketState> load_snapshot_dir(const std::filesystem::path& path);

struct PbsInput {
    MarketState state;
    ArbitrageStrategy strategy;
    Fixed gas_cost_base;
};

PbsInput load_pbs_input(const std::filesystem::path& path);

std::string to_json(const SimOutcome& outcome);
std::string to_json(const ReplayReport& report);
std::string report_to_csv(const ReplayReport& report);
std::string to_json(const StrategySequence& sequence, const std::string& base_asset);
std::string to_json(const PbsSummary& summary);
std::string pbs_input_to_json(const MarketState& state, const ArbitrageStrategy& strategy,
                              const Fixed& gas_cost_base);

//! Quote + both cost breakdowns for the bribery-cost subcommand.
std::string bribery_quote_to_json(const BriberyScenario& scenario);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace delayarb

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delayarb/amm.hpp"
#include "delayarb/fixed.hpp"

namespace delayarb {

//! A simple cycle through the base asset: assets c1..ck with ck == c1, one
//! pool per hop, all hop pools distinct.
struct ArbPath {
    std::vector<std::string> assets;  // hops() + 1 entries, first == last
    std::vector<std::string> pools;   // one per hop

    std::size_t hops() const { return pools.size(); }
    const std::string& base_asset() const { return assets.front(); }
    std::string signature() const;

    void validate() const;
};

//! Two-asset pool equivalent of a whole constant-product path. The effective
//! fee is the first hop's fee; later hops' fees are folded into the reserves.
struct VirtualPool {
    Fixed reserve_in;   // of the base asset
    Fixed reserve_out;  // of the path's final asset
    Fixed fee;
};

struct MempoolTx {
    std::string tx_id;
    std::int64_t observed_ms = 0;
    std::string pool_id;
    std::string input_token;
    Fixed amount_in;
    Fixed gas_price_gwei;
    std::int64_t gas_limit = 0;
};

//! Other users' transactions to front-load, the cycle to trade, the input
//! amount and the gross revenue (simulated on the state after the prefix).
struct ArbitrageStrategy {
    std::vector<MempoolTx> ordered_prefix;  // T_others, in inclusion order
    ArbPath path;
    Fixed amount;
    Fixed revenue;
};

using StrategySequence = std::vector<ArbitrageStrategy>;

//! Exact product of the path's edge reserve ratios on the given state.
Rational path_weight_product(const ArbPath& path, const MarketState& state);

//! All simple cycles through `base_asset` with 2..max_len hops, found by
//! depth-first search over the best-price edges. Every cycle is emitted in
//! both traversal directions (the reverse reuses the same pools), so when a
//! cycle's weight product differs from 1 one of the two directions
//! exceeds 1.
std::vector<ArbPath> get_cycles(const TokenGraph& graph, const std::string& base_asset,
                                int max_len = 4);

struct OrderingResult {
    std::vector<MempoolTx> included;  // in inclusion order
    MarketState state;                // after executing the included txs
};

//! Greedy prefix selection: scan the mempool in (observed_ms, tx_id) order
//! and keep every transaction whose execution strictly increases the path's
//! weight product on the tentative state.
OrderingResult order_transactions(const ArbPath& path, const MarketState& state,
                                  const std::vector<MempoolTx>& mempool);

//! Left fold of the path's pools into one virtual pool. Returns nullopt for
//! a hop whose curve the fold cannot express (callers fall back to the
//! hill-climb search).
std::optional<VirtualPool> compose_virtual_pool(const ArbPath& path, const MarketState& state);

//! Revenue-maximising input: max(0, (sqrt(Qv0*Qv0'*(1-f)) - Qv0) / (1-f)).
Fixed optimal_amount(const VirtualPool& pool);

//! Output of trading `amount` of the base asset along the path, hop by hop.
Fixed simulate_path(const ArbPath& path, const MarketState& state, const Fixed& amount);

//! (amount, revenue) for the path: closed form via the virtual pool when all
//! hops are constant product, otherwise golden-section ascent. Revenue is
//! always re-simulated hop by hop; (0, 0) when nothing profitable exists.
std::pair<Fixed, Fixed> search(const ArbPath& path, const MarketState& state);

//! Derivative-free variant: expands an upper bracket, then golden-section
//! ascent on simulated revenue to 1e-9 relative width (at most 200
//! iterations).
std::pair<Fixed, Fixed> search_ascent(const ArbPath& path, const MarketState& state);

struct DtoaConfig {
    std::string base_asset;
    Fixed target;     // minimum revenue per strategy, in base-asset units
    int max_cycle_len = 4;
    int max_rounds = 256;  // safety stop for the outer loop
};

//! The full delayed-ordering loop: rebuild the graph, enumerate cycles, order
//! transactions per path, optimise the amount, keep the best strategy above
//! target, execute it, repeat until nothing clears the target. Each mempool
//! transaction is consumed by at most one strategy.
StrategySequence run_dtoa(const MarketState& initial_state, std::vector<MempoolTx> mempool,
                          const DtoaConfig& config);

//! State after executing the strategy (ordered prefix, then the cycle trade).
MarketState execute_strategy(const ArbitrageStrategy& strategy, const MarketState& state);

}  // namespace delayarb

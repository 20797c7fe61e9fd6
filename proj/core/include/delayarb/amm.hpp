#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "delayarb/fixed.hpp"

namespace delayarb {

//! One constant-product pool. Reserves are fixed point with 18 fractional
//! digits; swap outputs truncate toward zero so the reserve product never
//! decreases.
struct LiquidityPool {
    std::string pool_id;
    std::string venue;
    std::string token0;
    std::string token1;
    Fixed reserve0;
    Fixed reserve1;
    Fixed fee;  // in [0, 0.1)

    bool has_token(const std::string& token) const { return token == token0 || token == token1; }
    const Fixed& reserve_of(const std::string& token) const;
    const std::string& other_token(const std::string& token) const;

    void validate() const;
};

class MarketState;
struct SwapResult;
SwapResult apply_swap(const MarketState& state, const std::string& pool_id,
                      const std::string& input_token, const Fixed& amount_in);

//! Immutable snapshot of all pools; every mutation returns a new value and
//! bumps the version counter.
class MarketState {
public:
    void add_pool(LiquidityPool pool);  // throws on duplicate pool_id
    bool has_pool(const std::string& pool_id) const { return pools_.count(pool_id) != 0; }
    const LiquidityPool& pool(const std::string& pool_id) const;

    const std::map<std::string, LiquidityPool>& pools() const { return pools_; }
    std::uint64_t version() const { return version_; }
    std::size_t size() const { return pools_.size(); }

    //! All distinct asset symbols, sorted.
    std::vector<std::string> assets() const;

private:
    friend SwapResult apply_swap(const MarketState& state, const std::string& pool_id,
                                 const std::string& input_token, const Fixed& amount_in);

    std::map<std::string, LiquidityPool> pools_;
    std::uint64_t version_ = 0;
};

//! Directed best-price edge: weight is the exact reserve ratio
//! reserve(to) / reserve(from) of the backing pool.
struct TokenEdge {
    std::string from;
    std::string to;
    std::string pool_id;
    Rational weight;
};

struct TokenGraph {
    std::vector<std::string> assets;
    //! Keyed by (from, to); absence encodes weight zero.
    std::map<std::pair<std::string, std::string>, TokenEdge> edges;

    const TokenEdge* edge(const std::string& from, const std::string& to) const;
    std::vector<const TokenEdge*> edges_from(const std::string& from) const;
};

//! Output amount for swapping `amount_in` of `input_token` into the pool:
//! Q_out - Q_in*Q_out / (Q_in + (1-f)*amount_in), truncated toward zero.
//! Always strictly less than the output reserve.
Fixed swap_out(const LiquidityPool& pool, const std::string& input_token, const Fixed& amount_in);

//! Result of apply_swap: a new snapshot (the input reserve grows by the full
//! input since fees stay in the pool, the output reserve shrinks by
//! swap_out()) plus the amount paid out. The original snapshot is untouched.
struct SwapResult {
    MarketState state;
    Fixed amount_out;
};

//! Best-price graph over the requested assets: for every ordered pair served
//! by at least one pool, the edge records the pool with the maximal reserve
//! ratio (ties broken by lexicographic pool_id).
TokenGraph build_graph(const MarketState& state, const std::vector<std::string>& assets);

}  // namespace delayarb

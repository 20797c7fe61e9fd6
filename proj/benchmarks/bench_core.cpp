#include <benchmark/benchmark.h>

#include "delayarb/consensus.hpp"
#include "delayarb/dtoa.hpp"
#include "delayarb/rewards.hpp"

namespace {

using namespace delayarb;

MarketState pair_market() {
    MarketState state;
    state.add_pool({"p0", "v", "A", "B", Fixed(100), Fixed(300), *Fixed::parse("0.003")});
    state.add_pool({"p1", "v", "B", "A", Fixed(300), Fixed(400), *Fixed::parse("0.003")});
    return state;
}

void BM_SwapOut(benchmark::State& state) {
    const MarketState market = pair_market();
    const LiquidityPool& pool = market.pool("p0");
    const Fixed amount(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(swap_out(pool, "A", amount));
    }
}
BENCHMARK(BM_SwapOut);

void BM_PathSearch(benchmark::State& state) {
    const MarketState market = pair_market();
    ArbPath path;
    path.assets = {"A", "B", "A"};
    path.pools = {"p0", "p1"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(search(path, market));
    }
}
BENCHMARK(BM_PathSearch);

void BM_OrderingLoop(benchmark::State& state) {
    const MarketState market = pair_market();
    const DtoaConfig config{"A", Fixed(0), 4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_dtoa(market, {}, config));
    }
}
BENCHMARK(BM_OrderingLoop);

void BM_AttackScenario(benchmark::State& state) {
    SimScenario scenario;
    scenario.params.validator_count = 2048;
    scenario.committee = CommitteeSpec{13, 13, 38, 0};
    scenario.attack.kind = BriberyDecision::Kind::kBribeValidators;
    scenario.attack.fee_per_validator_gwei = Fixed(1);
    scenario.attack.bribee_count = 13;
    scenario.horizon_slots = 8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_scenario(scenario));
    }
}
BENCHMARK(BM_AttackScenario);

}  // namespace

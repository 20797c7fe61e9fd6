#include <doctest.h>

#include <cmath>
#include <random>

#include "delayarb/consensus.hpp"
#include "delayarb/json_io.hpp"

using namespace delayarb;

namespace {

NetworkParams small_net() {
    NetworkParams params;
    params.validator_count = 2048;  // committee of 64
    return params;
}

SimScenario canonical_scenario(std::int64_t bribed_count, std::uint64_t seed = 7) {
    SimScenario scenario;
    scenario.params = small_net();
    scenario.committee = CommitteeSpec{13, 13, 38, 0};
    scenario.attack.kind = BriberyDecision::Kind::kBribeValidators;
    scenario.attack.fee_per_validator_gwei = Fixed(1);
    scenario.attack.bribee_count = bribed_count;
    scenario.message_delay_ms = 3'000;
    scenario.horizon_slots = 8;
    scenario.seed = seed;
    return scenario;
}

Block make_block(std::uint64_t id, std::uint64_t parent, std::int64_t slot,
                 std::int64_t publish_ms) {
    return Block{id, parent, slot, publish_ms, 1000 + id, {}};
}

}  // namespace

TEST_CASE("fork choice head") {
    const NetworkParams params = small_net();

    SUBCASE("single chain walks to the tip") {
        ChainView view;
        view.blocks[0] = make_block(0, 0, -1, 0);
        view.blocks[1] = make_block(1, 0, 0, 0);
        view.blocks[2] = make_block(2, 1, 1, 12'000);
        view.received_ms[0] = 0;
        view.received_ms[1] = 0;
        view.received_ms[2] = 12'000;
        CHECK(fork_choice_head(view, 20'000, 1, params) == 2);
    }
    SUBCASE("a timely current-slot block outweighs a heavier fork via the boost") {
        // fork A: 20 votes; fork B: 10 votes + boost 16 (committee 64 / 4)
        ChainView view;
        view.blocks[0] = make_block(0, 0, -1, 0);
        view.blocks[1] = make_block(1, 0, 4, 4 * 12'000);  // fork A tip
        view.blocks[2] = make_block(2, 0, 5, 5 * 12'000);  // fork B, current slot
        view.received_ms[0] = 0;
        view.received_ms[1] = 4 * 12'000 + 500;
        view.received_ms[2] = 5 * 12'000 + 500;  // within the attest window
        for (std::uint64_t v = 0; v < 20; ++v)
            view.latest_votes[v] = Vote{v, 4, 1, 4 * 12'000 + 4'000};
        for (std::uint64_t v = 20; v < 30; ++v)
            view.latest_votes[v] = Vote{v, 5, 2, 5 * 12'000 + 4'000};
        CHECK(fork_choice_head(view, 5 * 12'000 + 4'000, 5, params) == 2);
        // one slot later the boost is gone
        CHECK(fork_choice_head(view, 6 * 12'000, 6, params) == 1);
        // a late arrival earns no boost
        view.received_ms[2] = 5 * 12'000 + 4'001;
        CHECK(fork_choice_head(view, 5 * 12'000 + 4'000, 5, params) == 1);
    }
    SUBCASE("equal weights break toward the smaller block id") {
        ChainView view;
        view.blocks[0] = make_block(0, 0, -1, 0);
        view.blocks[1] = make_block(1, 0, 3, 36'000);
        view.blocks[2] = make_block(2, 0, 3, 36'000);
        view.received_ms = {{0, 0}, {1, 36'000}, {2, 36'000}};
        CHECK(fork_choice_head(view, 50'000, 4, params) == 1);
    }
    SUBCASE("an empty view is rejected") {
        CHECK_THROWS_AS(fork_choice_head(ChainView{}, 0, 0, params), std::invalid_argument);
    }
}

TEST_CASE("attestation policies") {
    const NetworkParams params = small_net();
    ChainView view;
    view.blocks[0] = make_block(0, 0, -1, 0);
    view.blocks[1] = make_block(1, 0, 1, 12'000);  // honest head
    view.received_ms = {{0, 0}, {1, 12'100}};

    SUBCASE("altruistic validators vote the fork-choice head") {
        const auto vote = attest(5, view, AttestContext{}, 16'000, 1, params);
        REQUIRE(vote);
        CHECK(vote->target_block == 1);
        CHECK(vote->slot == 1);
    }
    SUBCASE("bribable validators follow the offer only once the block arrived") {
        AttestContext ctx;
        ctx.role = ValidatorRole::kBribableRational;
        ctx.bribery_offer_active = true;
        ctx.briber_block = 7;  // not in view yet
        const auto honest = attest(5, view, ctx, 16'000, 1, params);
        REQUIRE(honest);
        CHECK(honest->target_block == 1);

        view.blocks[7] = make_block(7, 0, 0, 12'001);
        view.received_ms[7] = 12'050;
        const auto bribed = attest(5, view, ctx, 16'000, 1, params);
        REQUIRE(bribed);
        CHECK(bribed->target_block == 7);
    }
    SUBCASE("without an active offer the vote stays honest") {
        AttestContext ctx;
        ctx.role = ValidatorRole::kBribableRational;
        ctx.bribery_offer_active = false;
        view.blocks[7] = make_block(7, 0, 0, 12'001);
        view.received_ms[7] = 12'050;
        const auto vote = attest(5, view, ctx, 16'000, 1, params);
        REQUIRE(vote);
        CHECK(vote->target_block == 1);
    }
    SUBCASE("campaign validators defer until their block arrives") {
        AttestContext ctx;
        ctx.role = ValidatorRole::kMaliciousA;
        ctx.delayed_campaign = true;
        CHECK_FALSE(attest(5, view, ctx, 16'000, 1, params));
        ctx.briber_block = 1;
        const auto vote = attest(5, view, ctx, 16'000, 1, params);
        REQUIRE(vote);
        CHECK(vote->target_block == 1);
    }
}

TEST_CASE("attack scenarios around the bribed-committee threshold") {
    SUBCASE("13 of 38 bribed rational validators flips the fork") {
        const SimOutcome outcome = run_scenario(canonical_scenario(13));
        CHECK(outcome.attack_succeeded);
        CHECK(outcome.slashing_violations.empty());
        // fork weights: delayed side 13+13+13+later slots, honest side 13+25
        REQUIRE(outcome.fork_weights.size() == 2);
    }
    SUBCASE("11 bribed validators are not enough") {
        const SimOutcome outcome = run_scenario(canonical_scenario(11));
        CHECK_FALSE(outcome.attack_succeeded);
        CHECK(outcome.slashing_violations.empty());
    }
    SUBCASE("an honest run keeps one chain and no delayed block") {
        SimScenario scenario = canonical_scenario(0);
        scenario.attack = BriberyDecision{};
        const SimOutcome outcome = run_scenario(scenario);
        CHECK_FALSE(outcome.attack_succeeded);
        CHECK(outcome.fork_weights.size() == 1);
        for (const TraceEvent& event : outcome.trace) CHECK(event.kind != "ordering_run");
    }
    SUBCASE("a fee below the acceptance threshold bribes nobody") {
        SimScenario scenario = canonical_scenario(13);
        scenario.attack.fee_per_validator_gwei = Fixed(0);
        const SimOutcome outcome = run_scenario(scenario);
        CHECK_FALSE(outcome.attack_succeeded);
    }
}

TEST_CASE("success flips exactly at the required-fraction ceiling") {
    // committee 64: 13 malicious each side, 38 bribable rational
    const Fixed committee(64);
    const Fixed beta =
        required_bribed_fraction(Fixed(13) / committee, Fixed(13) / committee);
    const std::int64_t threshold =
        static_cast<std::int64_t>((beta * 38).ceil_int());
    CHECK(threshold == 13);
    for (std::int64_t bribed = 0; bribed <= 38; ++bribed) {
        const SimOutcome outcome = run_scenario(canonical_scenario(bribed));
        CHECK(outcome.attack_succeeded == (bribed >= threshold));
    }
}

TEST_CASE("bribing the proposer defeats the boost it gives up") {
    SimScenario scenario;
    scenario.params = small_net();
    scenario.committee = CommitteeSpec{13, 0, 1, 50};
    scenario.attack.kind = BriberyDecision::Kind::kBribeProposer;
    scenario.attack.bribee_count = 1;
    scenario.seed = 3;

    SUBCASE("an accepted bribe delays the honest block past the attest deadline") {
        scenario.attack.proposer_fee_gwei = proposer_reward(scenario.params) + Fixed(2);
        const SimOutcome outcome = run_scenario(scenario);
        CHECK(outcome.attack_succeeded);
        CHECK(outcome.slashing_violations.empty());
    }
    SUBCASE("a rejected bribe keeps the timely block and its boost wins") {
        scenario.attack.proposer_fee_gwei = Fixed(1);  // far below the block reward
        const SimOutcome outcome = run_scenario(scenario);
        CHECK_FALSE(outcome.attack_succeeded);
    }
}

TEST_CASE("identical scenario and seed reproduce the trace byte for byte") {
    const SimOutcome first = run_scenario(canonical_scenario(13, 99));
    const SimOutcome second = run_scenario(canonical_scenario(13, 99));
    CHECK(to_json(first) == to_json(second));
    CHECK(first.head_block == second.head_block);
}

TEST_CASE("slashing detection") {
    SUBCASE("attack traces are free of violations") {
        for (std::int64_t bribed : {0, 13, 25, 38}) {
            const SimOutcome outcome = run_scenario(canonical_scenario(bribed));
            CHECK(check_slashing(outcome.trace).empty());
        }
    }
    SUBCASE("a double proposal is flagged") {
        EventTrace trace;
        trace.push_back(TraceEvent{0, "propose", 1, 10, 1});
        trace.push_back(TraceEvent{5, "propose", 1, 11, 1});
        const auto violations = check_slashing(trace);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].kind == "double_proposal");
        CHECK(violations[0].actor == 1);
    }
    SUBCASE("conflicting votes are flagged") {
        EventTrace trace;
        trace.push_back(TraceEvent{0, "vote", 4, 10, 2});
        trace.push_back(TraceEvent{5, "vote", 4, 11, 2});
        const auto violations = check_slashing(trace);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].kind == "double_vote");
    }
    SUBCASE("re-announcing the same vote is not equivocation") {
        EventTrace trace;
        trace.push_back(TraceEvent{0, "vote", 4, 10, 2});
        trace.push_back(TraceEvent{5, "vote", 4, 10, 2});
        CHECK(check_slashing(trace).empty());
    }
}

TEST_CASE("randomized successful attacks never trigger slashing") {
    std::mt19937_64 rng(1234);
    int successes = 0;
    for (int trial = 0; trial < 300; ++trial) {
        SimScenario scenario;
        scenario.params = small_net();
        const std::int64_t malicious_b = static_cast<std::int64_t>(rng() % 14);
        const std::int64_t altruistic = static_cast<std::int64_t>(rng() % 8);
        scenario.committee = CommitteeSpec{13, malicious_b,
                                           64 - 13 - malicious_b - altruistic, altruistic};
        scenario.message_delay_ms = static_cast<std::int64_t>(rng() % 3'001);
        scenario.seed = rng();
        scenario.horizon_slots = 2 + static_cast<std::int64_t>(rng() % 4);
        if (trial % 2 == 0) {
            scenario.attack.kind = BriberyDecision::Kind::kBribeValidators;
            scenario.attack.fee_per_validator_gwei = Fixed(1);
            scenario.attack.bribee_count = scenario.committee.bribable_rational;
        } else {
            scenario.attack.kind = BriberyDecision::Kind::kBribeProposer;
            scenario.attack.proposer_fee_gwei = proposer_reward(scenario.params) + Fixed(2);
        }
        const SimOutcome outcome = run_scenario(scenario);
        CHECK(outcome.attack_succeeded);
        CHECK(outcome.slashing_violations.empty());
        if (outcome.attack_succeeded) ++successes;
    }
    CHECK(successes == 300);
}

TEST_CASE("scenario validation") {
    SimScenario scenario = canonical_scenario(13);
    scenario.committee.altruistic = 5;  // sum != 64
    CHECK_THROWS_AS(run_scenario(scenario), std::invalid_argument);

    scenario = canonical_scenario(39);  // more bribees than bribable validators
    CHECK_THROWS_AS(run_scenario(scenario), std::invalid_argument);

    scenario = canonical_scenario(13);
    scenario.message_delay_ms = 4'500;
    CHECK_THROWS_AS(run_scenario(scenario), std::invalid_argument);
}

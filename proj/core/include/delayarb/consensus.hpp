#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delayarb/bribery.hpp"
#include "delayarb/fixed.hpp"
#include "delayarb/rewards.hpp"

namespace delayarb {

enum class ValidatorRole { kMaliciousA, kMaliciousB, kBribableRational, kAltruistic };

//! Per-committee composition; the counts must sum to N/S.
struct CommitteeSpec {
    std::int64_t malicious_a = 0;
    std::int64_t malicious_b = 0;
    std::int64_t bribable_rational = 0;
    std::int64_t altruistic = 0;

    std::int64_t total() const {
        return malicious_a + malicious_b + bribable_rational + altruistic;
    }
};

//! A full attack experiment: slots t-1 .. t+horizon_slots around the attacked
//! slot t, with one committee per slot drawn to the same spec.
struct SimScenario {
    NetworkParams params;
    CommitteeSpec committee;
    BriberyDecision attack;
    std::int64_t message_delay_ms = 3'000;  // per-link upper bound, <= 4000
    std::int64_t horizon_slots = 8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Block {
    std::uint64_t id = 0;
    std::uint64_t parent = 0;
    std::int64_t claimed_slot = -1;  // may lag publish time (forged timestamp)
    std::int64_t publish_ms = 0;
    std::uint64_t producer = 0;
    std::string payload;
};

struct Vote {
    std::uint64_t validator = 0;
    std::int64_t slot = 0;
    std::uint64_t target_block = 0;
    std::int64_t emit_ms = 0;
};

//! What one validator can see at a point in time.
struct ChainView {
    std::map<std::uint64_t, Block> blocks;
    std::map<std::uint64_t, std::int64_t> received_ms;  // block id -> arrival
    std::map<std::uint64_t, Vote> latest_votes;         // validator -> latest vote
};

struct TraceEvent {
    std::int64_t time_ms = 0;
    std::string kind;  // "propose" | "vote" | "ordering_run"
    std::uint64_t actor = 0;
    std::uint64_t block_id = 0;
    std::int64_t slot = 0;
};

using EventTrace = std::vector<TraceEvent>;

struct SlashingViolation {
    std::string kind;  // "double_proposal" | "double_vote"
    std::uint64_t actor = 0;
    std::int64_t slot = 0;
    std::uint64_t first_block = 0;
    std::uint64_t second_block = 0;
};

struct SimOutcome {
    std::uint64_t head_block = 0;
    bool attack_succeeded = false;
    //! Final subtree vote weights of the children of the contested fork point
    //! (the delayed block's parent; the genesis block for honest runs).
    std::vector<std::pair<std::uint64_t, Fixed>> fork_weights;
    EventTrace trace;
    std::vector<SlashingViolation> slashing_violations;
};

//! LMD-GHOST head on the given view: greedy walk from the root towards the
//! child with the heaviest accumulated latest-vote weight; a block whose
//! claimed slot equals `current_slot` and that arrived within the slot's
//! first attest_ms carries a temporary boost of boost_fraction * committee.
//! Ties break toward the smaller block id. Throws on an empty view.
std::uint64_t fork_choice_head(const ChainView& view, std::int64_t now_ms,
                               std::int64_t current_slot, const NetworkParams& params);

struct AttestContext {
    ValidatorRole role = ValidatorRole::kAltruistic;
    //! Malicious-A validators back the delayed block; malicious-B validators
    //! back the competing block of the next slot. The ids stay empty until
    //! the respective block is published.
    bool delayed_campaign = false;
    bool competitor_campaign = false;
    std::optional<std::uint64_t> briber_block;
    std::optional<std::uint64_t> competitor_block;
    //! Bribable validators only: an offer at/above the acceptance threshold.
    bool bribery_offer_active = false;
};

//! Vote cast by one committee member at `now_ms`. Campaign validators whose
//! target block has not arrived yet return nullopt and vote on delivery;
//! bribable validators without the briber's block in view vote honestly.
std::optional<Vote> attest(std::uint64_t validator, const ChainView& view,
                           const AttestContext& ctx, std::int64_t now_ms, std::int64_t slot,
                           const NetworkParams& params);

//! Runs the discrete-event simulation and decides whether the delayed block
//! ends up on the canonical chain.
SimOutcome run_scenario(const SimScenario& scenario);

//! Flags equivocation: two blocks by one proposer for one slot, or two
//! conflicting votes by one validator for one slot.
std::vector<SlashingViolation> check_slashing(const EventTrace& trace);

}  // namespace delayarb

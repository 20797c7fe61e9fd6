#pragma once

#include <cstdint>

#include "delayarb/fixed.hpp"

namespace delayarb {

//! Protocol constants of the simulated proof-of-stake chain.
//!
//! One epoch has `slots_per_epoch` slots; every slot has one proposer and a
//! committee of `validator_count / slots_per_epoch` attesters. Stake is
//! uniform across validators.
struct NetworkParams {
    std::int64_t validator_count = 600'000;  // N
    std::int64_t slots_per_epoch = 32;       // S
    Fixed stake_eth = Fixed(32);             // d, per validator
    Fixed base_reward_factor = Fixed(64);    // p
    std::int64_t slot_ms = 12'000;
    std::int64_t attest_ms = 4'000;          // attestation deadline offset
    Fixed boost_fraction = Fixed(1) / Fixed(4);  // proposer boost, share of committee weight

    std::int64_t committee_size() const { return validator_count / slots_per_epoch; }

    //! Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

//! Per-validator and per-proposer reward quantities, all in GWei.
struct RewardSchedule {
    Fixed base_reward_gwei;         // r, per staked Ether
    Fixed head_vote_reward_gwei;    // R_A = 7/32 * d * r
    Fixed attestation_total_gwei;   // R_A_total = 27/32 * d * r
    Fixed proposer_reward_gwei;     // R_P
};

//! Base reward r = 10^9 * p / sqrt(I_total), with I_total = N * d * 10^9 GWei.
//! Throws std::domain_error for non-positive N or d.
Fixed base_reward(const NetworkParams& params);

//! Head-vote reward R_A = 7/32 * d * r.
Fixed attestation_head_reward(const NetworkParams& params);

//! Proposer reward R_P = (N * R_A_total / S + N * r / 32) / 7. For d=32 and
//! p=64 this equals sqrt(2N/10^9) ETH to within 1e-9 relative.
Fixed proposer_reward(const NetworkParams& params);

RewardSchedule reward_schedule(const NetworkParams& params);

}  // namespace delayarb

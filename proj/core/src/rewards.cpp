#include "delayarb/rewards.hpp"

#include <stdexcept>

namespace delayarb {

void NetworkParams::validate() const {
    if (validator_count < slots_per_epoch)
        throw std::invalid_argument("validator_count must be >= slots_per_epoch");
    if (slots_per_epoch <= 0)
        throw std::invalid_argument("slots_per_epoch must be positive");
    if (validator_count % slots_per_epoch != 0)
        throw std::invalid_argument("validator_count must be a multiple of slots_per_epoch");
    if (!stake_eth.is_positive())
        throw std::invalid_argument("stake_eth must be positive");
    if (base_reward_factor.is_negative())
        throw std::invalid_argument("base_reward_factor must be non-negative");
    if (!boost_fraction.is_positive() || boost_fraction > Fixed(1))
        throw std::invalid_argument("boost_fraction must be in (0, 1]");
    if (attest_ms <= 0 || attest_ms >= slot_ms)
        throw std::invalid_argument("attest_ms must be in (0, slot_ms)");
}

Fixed base_reward(const NetworkParams& params) {
    if (params.validator_count <= 0 || !params.stake_eth.is_positive())
        throw std::domain_error("base_reward requires positive N and d");
    const Fixed total_stake_gwei =
        eth_to_gwei(params.stake_eth * params.validator_count);  // I_total
    return (params.base_reward_factor * 1'000'000'000) / total_stake_gwei.sqrt();
}

Fixed attestation_head_reward(const NetworkParams& params) {
    return params.stake_eth * base_reward(params) * 7 / 32;
}

Fixed proposer_reward(const NetworkParams& params) {
    const Fixed r = base_reward(params);
    const Fixed attestation_total = params.stake_eth * r * 27 / 32;
    const Fixed per_slot_attestations =
        attestation_total * params.validator_count / params.slots_per_epoch;
    const Fixed sync_committee_total = r * params.validator_count / 32;
    return (per_slot_attestations + sync_committee_total) / 7;
}

RewardSchedule reward_schedule(const NetworkParams& params) {
    RewardSchedule schedule;
    schedule.base_reward_gwei = base_reward(params);
    schedule.head_vote_reward_gwei = params.stake_eth * schedule.base_reward_gwei * 7 / 32;
    schedule.attestation_total_gwei = params.stake_eth * schedule.base_reward_gwei * 27 / 32;
    schedule.proposer_reward_gwei = proposer_reward(params);
    return schedule;
}

}  // namespace delayarb

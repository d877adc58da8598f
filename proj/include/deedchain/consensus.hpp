#pragma once
#include <map>
#include <set>
#include <string>
#include <vector>

#include "deedchain/bytes.hpp"
#include "deedchain/errors.hpp"

namespace deedchain {

// Desk-scale models of four protocol families: hash-count proof of work,
// a memory-mixing PoW variant, stake-weighted proposer selection, and a
// single endorsement-counting quorum round.

struct StakeTable {
    std::map<std::string, std::uint64_t> stakes;  // validator id -> stake

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& [_, s] : stakes) t += s;
        return t;
    }
};

struct QuorumConfig {
    std::set<std::string> validators;
    std::uint32_t threshold_num = 4;
    std::uint32_t threshold_den = 5;
};

enum class WorkVariant : std::uint8_t { PlainHash = 0, MemoryMixed = 1 };

struct WorkParams {
    std::uint32_t difficulty_bits = 8;  // capped at 24
    WorkVariant variant = WorkVariant::PlainHash;
    std::uint32_t memory_cost = 64;  // blocks, MemoryMixed only

    static constexpr std::uint32_t kMaxDifficulty = 24;
};

// Memory-mixing iterated hash: fill a buffer with chained hashes, then
// fold it back in a data-dependent order.
inline Digest memory_mixed_hash(const Digest& seed, std::uint32_t memory_cost) {
    std::vector<Digest> buf(memory_cost == 0 ? 1 : memory_cost);
    buf[0] = sha256(std::span<const std::uint8_t>(seed));
    for (std::size_t i = 1; i < buf.size(); ++i)
        buf[i] = sha256(std::span<const std::uint8_t>(buf[i - 1]));
    Digest acc = buf.back();
    for (std::size_t i = 0; i < buf.size(); ++i) {
        std::uint32_t idx = (std::uint32_t(acc[0]) << 24 | std::uint32_t(acc[1]) << 16 |
                             std::uint32_t(acc[2]) << 8 | std::uint32_t(acc[3])) %
                            static_cast<std::uint32_t>(buf.size());
        Sha256 h;
        h.update(std::span<const std::uint8_t>(acc));
        h.update(std::span<const std::uint8_t>(buf[idx]));
        acc = h.finish();
    }
    return acc;
}

inline Digest work_hash(const Digest& header_digest, std::uint64_t nonce,
                        const WorkParams& params) {
    ByteWriter w;
    w.digest(header_digest);
    w.u64(nonce);
    Digest base = sha256(w.data());
    if (params.variant == WorkVariant::MemoryMixed)
        return memory_mixed_hash(base, params.memory_cost);
    return base;
}

inline bool has_leading_zero_bits(const Digest& d, std::uint32_t bits) {
    std::uint32_t full = bits / 8, rem = bits % 8;
    for (std::uint32_t i = 0; i < full; ++i)
        if (d[i] != 0) return false;
    if (rem != 0 && (d[full] >> (8 - rem)) != 0) return false;
    return true;
}

inline bool verify_pow(const Digest& header_digest, std::uint64_t nonce,
                       const WorkParams& params) {
    return has_leading_zero_bits(work_hash(header_digest, nonce, params),
                                 params.difficulty_bits);
}

// Smallest qualifying nonce >= start_nonce.
inline Result<std::uint64_t> pow_seal(const Digest& header_digest,
                                      const WorkParams& params,
                                      std::uint64_t start_nonce = 0) {
    if (params.difficulty_bits > WorkParams::kMaxDifficulty)
        return Result<std::uint64_t>::fail(Err::SearchExhausted, "difficulty above cap");
    for (std::uint64_t nonce = start_nonce;; ++nonce) {
        if (verify_pow(header_digest, nonce, params))
            return Result<std::uint64_t>::success(nonce);
        if (nonce == UINT64_MAX)
            return Result<std::uint64_t>::fail(Err::SearchExhausted);
    }
}

// Deterministic stake-proportional draw: u = H(seed) mod total_stake,
// mapped onto cumulative stake intervals in ascending id order.
inline Result<std::string> pos_select_proposer(const StakeTable& stakes,
                                               const Digest& round_seed) {
    std::uint64_t total = stakes.total();
    if (total == 0) return Result<std::string>::fail(Err::EmptyStake);
    Digest h = sha256(std::span<const std::uint8_t>(round_seed));
    std::uint64_t draw = 0;
    for (int i = 0; i < 8; ++i) draw = (draw << 8) | h[i];
    draw %= total;
    std::uint64_t cum = 0;
    for (const auto& [id, stake] : stakes.stakes) {
        cum += stake;
        if (draw < cum) return Result<std::string>::success(id);
    }
    return Result<std::string>::fail(Err::EmptyStake);  // unreachable
}

// One endorsement-counting round: a tx is agreed when at least
// threshold_num/threshold_den of the validator set proposed it.
// Result in canonical tx-id order.
inline Result<std::vector<Digest>> quorum_round(
    const std::map<std::string, std::set<Digest>>& proposals,
    const QuorumConfig& config) {
    using R = Result<std::vector<Digest>>;
    bool any_proposed = false;
    std::map<Digest, std::uint32_t> counts;
    for (const auto& [validator, txs] : proposals) {
        if (!config.validators.count(validator))
            return R::fail(Err::UnknownValidator, validator);
        if (!txs.empty()) any_proposed = true;
        for (const auto& id : txs) counts[id]++;
    }
    std::vector<Digest> agreed;
    const auto n = static_cast<std::uint64_t>(config.validators.size());
    for (const auto& [id, count] : counts) {
        if (static_cast<std::uint64_t>(count) * config.threshold_den >=
            static_cast<std::uint64_t>(config.threshold_num) * n)
            agreed.push_back(id);
    }
    if (agreed.empty() && any_proposed) return R::fail(Err::NoQuorum);
    return R::success(std::move(agreed));
}

enum class ConsensusStrategy : std::uint8_t { Pow = 0, Pos = 1, Quorum = 2, PowMemory = 3 };

inline Result<ConsensusStrategy> parse_strategy(std::string_view s) {
    using R = Result<ConsensusStrategy>;
    if (s == "pow") return R::success(ConsensusStrategy::Pow);
    if (s == "pos") return R::success(ConsensusStrategy::Pos);
    if (s == "quorum") return R::success(ConsensusStrategy::Quorum);
    if (s == "pow-memory") return R::success(ConsensusStrategy::PowMemory);
    return R::fail(Err::ParseError, "unknown consensus strategy: " + std::string(s));
}

inline std::string_view strategy_name(ConsensusStrategy s) {
    switch (s) {
        case ConsensusStrategy::Pow: return "pow";
        case ConsensusStrategy::Pos: return "pos";
        case ConsensusStrategy::Quorum: return "quorum";
        case ConsensusStrategy::PowMemory: return "pow-memory";
    }
    return "?";
}

struct ConsensusConfig {
    ConsensusStrategy strategy = ConsensusStrategy::Pow;
    WorkParams work;
    StakeTable stakes;
    QuorumConfig quorum;
};

}  // namespace deedchain

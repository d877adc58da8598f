#pragma once
#include <map>
#include <set>
#include <string>
#include <vector>

#include "deedchain/bytes.hpp"
#include "deedchain/errors.hpp"
#include "deedchain/tx.hpp"

namespace deedchain {

// Signed off-chain facts recorded on-chain by registered oracles.
// Signatures are keyed hashes over the canonical attestation body.
struct Attestation {
    std::string oracle_id;
    std::string kind;  // "price", "legal-docs", "spec"
    bool subject_is_asset = false;
    std::string subject_asset;
    Digest subject_deed{};
    Amount price_micro = 0;
    Digest doc_digest{};
    Tick tick = 0;
    Digest signature{};

    Bytes signing_body() const {
        ByteWriter w;
        w.str(oracle_id);
        w.str(kind);
        w.u8(subject_is_asset ? 1 : 0);
        w.str(subject_asset);
        w.digest(subject_deed);
        w.i64(price_micro);
        w.digest(doc_digest);
        w.u64(tick);
        return w.take();
    }

    void canonical_encode(ByteWriter& w) const {
        w.bytes(signing_body());
        w.digest(signature);
    }
};

inline Digest sign_attestation(const Attestation& att, std::span<const std::uint8_t> key) {
    Sha256 h;
    h.update(key);
    h.update(att.signing_body());
    return h.finish();
}

class OracleRegistry {
public:
    void register_oracle(std::string oracle_id, Bytes key) {
        keys_[std::move(oracle_id)] = std::move(key);
    }

    bool known(const std::string& oracle_id) const { return keys_.count(oracle_id) > 0; }

    const Bytes* key_of(const std::string& oracle_id) const {
        auto it = keys_.find(oracle_id);
        return it == keys_.end() ? nullptr : &it->second;
    }

    bool verify(const Attestation& att) const {
        auto* key = key_of(att.oracle_id);
        return key && sign_attestation(att, *key) == att.signature;
    }

    const std::map<std::string, Bytes>& all() const { return keys_; }

    void canonical_encode(ByteWriter& w) const {
        w.u32(static_cast<std::uint32_t>(keys_.size()));
        for (const auto& [id, key] : keys_) {
            w.str(id);
            w.var_bytes(key);
        }
    }

private:
    std::map<std::string, Bytes> keys_;
};

// Per-asset time-ordered price observations; ticks strictly increase.
class PriceFeed {
public:
    struct Observation {
        Tick tick = 0;
        Amount price_micro = 0;
    };

    Status push(const std::string& asset, Tick tick, Amount price_micro) {
        auto& series = feed_[asset];
        if (!series.empty() && tick <= series.back().tick)
            return Status::fail(Err::NonMonotonicTick);
        series.push_back({tick, price_micro});
        return Status::okay();
    }

    Result<Amount> latest(const std::string& asset, Tick now_tick,
                          Tick staleness_bound) const {
        auto it = feed_.find(asset);
        if (it == feed_.end() || it->second.empty())
            return Result<Amount>::fail(Err::NoData, asset);
        const Observation* best = nullptr;
        for (const auto& obs : it->second) {
            if (obs.tick <= now_tick) best = &obs;
            else break;
        }
        if (!best) return Result<Amount>::fail(Err::NoData, asset);
        if (now_tick - best->tick > staleness_bound)
            return Result<Amount>::fail(Err::StalePrice, asset);
        return Result<Amount>::success(best->price_micro);
    }

    const std::map<std::string, std::vector<Observation>>& all() const { return feed_; }

    void canonical_encode(ByteWriter& w) const {
        w.u32(static_cast<std::uint32_t>(feed_.size()));
        for (const auto& [asset, series] : feed_) {
            w.str(asset);
            w.u32(static_cast<std::uint32_t>(series.size()));
            for (const auto& obs : series) {
                w.u64(obs.tick);
                w.i64(obs.price_micro);
            }
        }
    }

private:
    std::map<std::string, std::vector<Observation>> feed_;
};

// Salted hash commitments for confidential deed fields.
struct Commitment {
    std::string field_name;
    Digest digest{};
};

inline constexpr std::size_t kSaltLength = 32;

inline Result<Commitment> commit_field(const std::string& field_name,
                                       std::string_view value,
                                       std::span<const std::uint8_t> salt) {
    if (salt.size() != kSaltLength) return Result<Commitment>::fail(Err::BadSalt);
    ByteWriter w;
    w.str(value);
    w.bytes(salt);
    return Result<Commitment>::success(Commitment{field_name, sha256(w.data())});
}

inline bool reveal_verify(const Commitment& c, std::string_view value,
                          std::span<const std::uint8_t> salt) {
    auto recomputed = commit_field(c.field_name, value, salt);
    return recomputed.ok() && recomputed->digest == c.digest;
}

// Per-deed read authorization; the deed owner is always implicitly allowed.
class AccessControl {
public:
    void grant(const Digest& deed_id, const Address& grantee) {
        acl_[deed_id].insert(grantee);
    }

    bool check(const Digest& deed_id, const Address& reader, const Address& owner) const {
        if (reader == owner) return true;
        auto it = acl_.find(deed_id);
        return it != acl_.end() && it->second.count(reader) > 0;
    }

    void canonical_encode(ByteWriter& w) const {
        w.u32(static_cast<std::uint32_t>(acl_.size()));
        for (const auto& [deed_id, readers] : acl_) {
            w.digest(deed_id);
            w.u32(static_cast<std::uint32_t>(readers.size()));
            for (const auto& r : readers) w.address(r);
        }
    }

private:
    std::map<Digest, std::set<Address>> acl_;
};

}  // namespace deedchain

#pragma once
#include <string>
#include <variant>
#include <vector>

#include "deedchain/bytes.hpp"
#include "deedchain/consensus.hpp"
#include "deedchain/tx.hpp"

namespace deedchain {

struct SealPow {
    std::uint64_t nonce = 0;
};

struct SealPos {
    std::string proposer_id;
    Digest seed{};
};

struct SealQuorum {
    std::vector<std::string> endorsers;
};

using ConsensusSeal = std::variant<SealPow, SealPos, SealQuorum>;

struct BlockHeader {
    std::uint64_t height = 0;
    Digest parent_hash{};
    Digest state_root{};
    Digest txs_hash{};
    Amount base_fee = 0;  // fee in force while this block's txs executed
    std::uint64_t timestamp = 0;  // simulated tick
    Address proposer{};  // receives tips
    ConsensusSeal seal = SealPow{};

    void encode_without_seal(ByteWriter& w) const {
        w.u64(height);
        w.digest(parent_hash);
        w.digest(state_root);
        w.digest(txs_hash);
        w.i64(base_fee);
        w.u64(timestamp);
        w.address(proposer);
    }

    void encode_seal(ByteWriter& w) const {
        if (const auto* pow = std::get_if<SealPow>(&seal)) {
            w.u8(0);
            w.u64(pow->nonce);
        } else if (const auto* pos = std::get_if<SealPos>(&seal)) {
            w.u8(1);
            w.str(pos->proposer_id);
            w.digest(pos->seed);
        } else {
            const auto& q = std::get<SealQuorum>(seal);
            w.u8(2);
            w.u32(static_cast<std::uint32_t>(q.endorsers.size()));
            for (const auto& e : q.endorsers) w.str(e);
        }
    }

    Bytes canonical_encode() const {
        ByteWriter w;
        encode_without_seal(w);
        encode_seal(w);
        return w.take();
    }

    // What PoW nonces are searched over.
    Digest pre_seal_digest() const {
        ByteWriter w;
        encode_without_seal(w);
        return sha256(w.data());
    }

    Digest hash() const { return sha256(canonical_encode()); }
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> txs;

    static Digest txs_digest(const std::vector<Transaction>& txs) {
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(txs.size()));
        for (const auto& tx : txs) w.digest(tx.id());
        return sha256(w.data());
    }

    Bytes canonical_encode() const {
        ByteWriter w;
        w.bytes(header.canonical_encode());
        w.u32(static_cast<std::uint32_t>(txs.size()));
        for (const auto& tx : txs) {
            auto body = tx.canonical_encode();
            w.var_bytes(body);
        }
        return w.take();
    }
};

inline BlockHeader decode_header(ByteReader& r) {
    BlockHeader h;
    h.height = r.u64();
    h.parent_hash = r.digest();
    h.state_root = r.digest();
    h.txs_hash = r.digest();
    h.base_fee = r.i64();
    h.timestamp = r.u64();
    h.proposer = r.address();
    switch (r.u8()) {
        case 0: {
            SealPow s;
            s.nonce = r.u64();
            h.seal = s;
            break;
        }
        case 1: {
            SealPos s;
            s.proposer_id = r.str();
            s.seed = r.digest();
            h.seal = s;
            break;
        }
        case 2: {
            SealQuorum s;
            auto n = r.u32();
            for (std::uint32_t i = 0; i < n; ++i) s.endorsers.push_back(r.str());
            h.seal = s;
            break;
        }
        default:
            throw DecodeError("unknown seal tag");
    }
    return h;
}

inline Block decode_block(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    Block b;
    b.header = decode_header(r);
    auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        auto body = r.var_bytes();
        ByteReader tr(body);
        b.txs.push_back(decode_transaction(tr));
        if (!tr.done()) throw DecodeError("trailing tx bytes");
    }
    if (!r.done()) throw DecodeError("trailing block bytes");
    return b;
}

}  // namespace deedchain

#pragma once
#include <map>
#include <string>
#include <vector>

#include "deedchain/bytes.hpp"
#include "deedchain/date.hpp"
#include "deedchain/errors.hpp"
#include "deedchain/tx.hpp"

namespace deedchain {

struct DeedMetadata {
    std::int64_t square_footage = 0;
    std::int64_t bedrooms = 0;
    Day last_renovation = 0;
};

struct DeedHistoryEntry {
    enum class Kind : std::uint8_t { Mint = 0, Transfer = 1 };
    Kind kind = Kind::Mint;
    Address from{};  // zero for mint
    Address to{};
    Tick tick = 0;
};

// Unique on-chain property record. deed_id = hash of the minting tx id.
struct DeedToken {
    Digest deed_id{};
    Address owner{};
    DeedMetadata public_metadata;
    std::map<std::string, Digest> private_commitments;
    std::vector<Digest> covenant_ids;
    std::vector<DeedHistoryEntry> history;
};

class DeedRegistry {
public:
    Result<Digest> mint(const Digest& minting_tx_id, const Address& minter,
                        const DeedMetadata& meta,
                        std::map<std::string, Digest> commitments, Tick tick) {
        Digest deed_id = sha256(std::span<const std::uint8_t>(minting_tx_id));
        if (deeds_.count(deed_id)) return Result<Digest>::fail(Err::DuplicateDeed);
        DeedToken deed;
        deed.deed_id = deed_id;
        deed.owner = minter;
        deed.public_metadata = meta;
        deed.private_commitments = std::move(commitments);
        deed.history.push_back({DeedHistoryEntry::Kind::Mint, Address{}, minter, tick});
        deeds_.emplace(deed_id, std::move(deed));
        return Result<Digest>::success(deed_id);
    }

    // Covenant evaluation happens in the ledger before this is called.
    Status transfer(const Digest& deed_id, const Address& from, const Address& to,
                    Tick tick) {
        auto it = deeds_.find(deed_id);
        if (it == deeds_.end()) return Status::fail(Err::UnknownDeed);
        if (it->second.owner != from) return Status::fail(Err::NotOwner);
        it->second.owner = to;
        it->second.history.push_back({DeedHistoryEntry::Kind::Transfer, from, to, tick});
        return Status::okay();
    }

    const DeedToken* find(const Digest& deed_id) const {
        auto it = deeds_.find(deed_id);
        return it == deeds_.end() ? nullptr : &it->second;
    }

    DeedToken* find_mut(const Digest& deed_id) {
        auto it = deeds_.find(deed_id);
        return it == deeds_.end() ? nullptr : &it->second;
    }

    const std::map<Digest, DeedToken>& all() const { return deeds_; }
    std::size_t size() const { return deeds_.size(); }

    void canonical_encode(ByteWriter& w) const {
        w.u32(static_cast<std::uint32_t>(deeds_.size()));
        for (const auto& [id, deed] : deeds_) {
            w.digest(id);
            w.address(deed.owner);
            w.i64(deed.public_metadata.square_footage);
            w.i64(deed.public_metadata.bedrooms);
            w.i64(deed.public_metadata.last_renovation);
            w.u32(static_cast<std::uint32_t>(deed.private_commitments.size()));
            for (const auto& [name, digest] : deed.private_commitments) {
                w.str(name);
                w.digest(digest);
            }
            w.u32(static_cast<std::uint32_t>(deed.covenant_ids.size()));
            for (const auto& c : deed.covenant_ids) w.digest(c);
            w.u32(static_cast<std::uint32_t>(deed.history.size()));
            for (const auto& h : deed.history) {
                w.u8(static_cast<std::uint8_t>(h.kind));
                w.address(h.from);
                w.address(h.to);
                w.u64(h.tick);
            }
        }
    }

private:
    std::map<Digest, DeedToken> deeds_;
};

}  // namespace deedchain

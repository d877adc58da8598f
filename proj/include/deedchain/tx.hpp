#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "deedchain/bytes.hpp"
#include "deedchain/date.hpp"
#include "deedchain/errors.hpp"

namespace deedchain {

using Amount = std::int64_t;  // smallest token units
using Tick = std::uint64_t;   // simulated time

enum class TxKind : std::uint8_t {
    TokenTransfer = 0,
    TokenApprove,
    StableMint,
    StableRedeem,
    DeedMint,
    DeedTransfer,
    List,
    Offer,
    FundEscrow,
    Settle,
    Cancel,
    AttachCovenant,
    OpenLoan,
    Repay,
    Liquidate,
    Attest,
    GrantAccess,
};

inline std::string_view tx_kind_name(TxKind k) {
    switch (k) {
        case TxKind::TokenTransfer: return "TokenTransfer";
        case TxKind::TokenApprove: return "TokenApprove";
        case TxKind::StableMint: return "StableMint";
        case TxKind::StableRedeem: return "StableRedeem";
        case TxKind::DeedMint: return "DeedMint";
        case TxKind::DeedTransfer: return "DeedTransfer";
        case TxKind::List: return "List";
        case TxKind::Offer: return "Offer";
        case TxKind::FundEscrow: return "FundEscrow";
        case TxKind::Settle: return "Settle";
        case TxKind::Cancel: return "Cancel";
        case TxKind::AttachCovenant: return "AttachCovenant";
        case TxKind::OpenLoan: return "OpenLoan";
        case TxKind::Repay: return "Repay";
        case TxKind::Liquidate: return "Liquidate";
        case TxKind::Attest: return "Attest";
        case TxKind::GrantAccess: return "GrantAccess";
    }
    return "?";
}

struct TokenTransferPayload {
    std::string symbol;
    Address to{};
    Amount amount = 0;
};

struct TokenApprovePayload {
    std::string symbol;
    Address spender{};
    Amount amount = 0;
};

struct StableMintPayload {
    Address to{};
    Amount fiat_deposit = 0;
};

struct StableRedeemPayload {
    Amount amount = 0;
};

struct DeedMintPayload {
    std::int64_t square_footage = 0;
    std::int64_t bedrooms = 0;
    Day last_renovation = 0;
    std::map<std::string, Digest> private_commitments;
};

struct DeedTransferPayload {
    Digest deed_id{};
    Address to{};
};

struct ListPayload {
    Digest deed_id{};
    std::string ask_symbol;
    Amount ask_price = 0;
};

struct OfferPayload {
    Digest sale_id{};
    Amount offer_price = 0;
};

struct FundEscrowPayload {
    Digest sale_id{};
};

struct SettlePayload {
    Digest sale_id{};
};

struct CancelPayload {
    Digest sale_id{};
};

struct AttachCovenantPayload {
    Digest deed_id{};
    std::string predicate;
};

struct OpenLoanPayload {
    std::string collateral_symbol;
    Amount collateral_amount = 0;
    Amount borrow_amount = 0;
    std::uint32_t liquidation_threshold_bps = 8000;  // fraction * 1e4
    std::uint64_t rate_ppb = 1000;                   // per-tick rate * 1e9
};

struct RepayPayload {
    Digest loan_id{};
    Amount amount = 0;
};

struct LiquidatePayload {
    Digest loan_id{};
};

// Subject is either an asset symbol (price feeds) or a deed id.
struct AttestPayload {
    std::string oracle_id;
    std::string kind;  // "price", "legal-docs", "spec"
    bool subject_is_asset = false;
    std::string subject_asset;
    Digest subject_deed{};
    Amount price_micro = 0;  // price feeds: fiat units * 1e6
    Digest doc_digest{};     // legal-docs / spec
    Tick tick = 0;
    Digest signature{};
};

struct GrantAccessPayload {
    Digest deed_id{};
    Address grantee{};
};

using TxPayload = std::variant<
    TokenTransferPayload, TokenApprovePayload, StableMintPayload,
    StableRedeemPayload, DeedMintPayload, DeedTransferPayload, ListPayload,
    OfferPayload, FundEscrowPayload, SettlePayload, CancelPayload,
    AttachCovenantPayload, OpenLoanPayload, RepayPayload, LiquidatePayload,
    AttestPayload, GrantAccessPayload>;

struct Transaction {
    TxKind kind = TxKind::TokenTransfer;
    Address sender{};
    TxPayload payload;
    std::uint64_t gas_limit = 0;
    Amount tip = 0;
    std::uint64_t nonce = 0;

    Bytes canonical_encode() const;
    Digest id() const { return sha256(canonical_encode()); }
    std::size_t payload_size() const;
};

namespace detail {

inline void encode_payload(ByteWriter& w, const TokenTransferPayload& p) {
    w.str(p.symbol);
    w.address(p.to);
    w.i64(p.amount);
}
inline void encode_payload(ByteWriter& w, const TokenApprovePayload& p) {
    w.str(p.symbol);
    w.address(p.spender);
    w.i64(p.amount);
}
inline void encode_payload(ByteWriter& w, const StableMintPayload& p) {
    w.address(p.to);
    w.i64(p.fiat_deposit);
}
inline void encode_payload(ByteWriter& w, const StableRedeemPayload& p) {
    w.i64(p.amount);
}
inline void encode_payload(ByteWriter& w, const DeedMintPayload& p) {
    w.i64(p.square_footage);
    w.i64(p.bedrooms);
    w.i64(p.last_renovation);
    w.u32(static_cast<std::uint32_t>(p.private_commitments.size()));
    for (const auto& [name, digest] : p.private_commitments) {
        w.str(name);
        w.digest(digest);
    }
}
inline void encode_payload(ByteWriter& w, const DeedTransferPayload& p) {
    w.digest(p.deed_id);
    w.address(p.to);
}
inline void encode_payload(ByteWriter& w, const ListPayload& p) {
    w.digest(p.deed_id);
    w.str(p.ask_symbol);
    w.i64(p.ask_price);
}
inline void encode_payload(ByteWriter& w, const OfferPayload& p) {
    w.digest(p.sale_id);
    w.i64(p.offer_price);
}
inline void encode_payload(ByteWriter& w, const FundEscrowPayload& p) {
    w.digest(p.sale_id);
}
inline void encode_payload(ByteWriter& w, const SettlePayload& p) {
    w.digest(p.sale_id);
}
inline void encode_payload(ByteWriter& w, const CancelPayload& p) {
    w.digest(p.sale_id);
}
inline void encode_payload(ByteWriter& w, const AttachCovenantPayload& p) {
    w.digest(p.deed_id);
    w.str(p.predicate);
}
inline void encode_payload(ByteWriter& w, const OpenLoanPayload& p) {
    w.str(p.collateral_symbol);
    w.i64(p.collateral_amount);
    w.i64(p.borrow_amount);
    w.u32(p.liquidation_threshold_bps);
    w.u64(p.rate_ppb);
}
inline void encode_payload(ByteWriter& w, const RepayPayload& p) {
    w.digest(p.loan_id);
    w.i64(p.amount);
}
inline void encode_payload(ByteWriter& w, const LiquidatePayload& p) {
    w.digest(p.loan_id);
}
inline void encode_payload(ByteWriter& w, const AttestPayload& p) {
    w.str(p.oracle_id);
    w.str(p.kind);
    w.u8(p.subject_is_asset ? 1 : 0);
    w.str(p.subject_asset);
    w.digest(p.subject_deed);
    w.i64(p.price_micro);
    w.digest(p.doc_digest);
    w.u64(p.tick);
    w.digest(p.signature);
}
inline void encode_payload(ByteWriter& w, const GrantAccessPayload& p) {
    w.digest(p.deed_id);
    w.address(p.grantee);
}

}  // namespace detail

inline Bytes Transaction::canonical_encode() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    w.address(sender);
    std::visit([&](const auto& p) { detail::encode_payload(w, p); }, payload);
    w.u64(gas_limit);
    w.i64(tip);
    w.u64(nonce);
    return w.take();
}

inline std::size_t Transaction::payload_size() const {
    ByteWriter w;
    std::visit([&](const auto& p) { detail::encode_payload(w, p); }, payload);
    return w.data().size();
}

inline TxPayload decode_payload(TxKind kind, ByteReader& r) {
    switch (kind) {
        case TxKind::TokenTransfer: {
            TokenTransferPayload p;
            p.symbol = r.str();
            p.to = r.address();
            p.amount = r.i64();
            return p;
        }
        case TxKind::TokenApprove: {
            TokenApprovePayload p;
            p.symbol = r.str();
            p.spender = r.address();
            p.amount = r.i64();
            return p;
        }
        case TxKind::StableMint: {
            StableMintPayload p;
            p.to = r.address();
            p.fiat_deposit = r.i64();
            return p;
        }
        case TxKind::StableRedeem: {
            StableRedeemPayload p;
            p.amount = r.i64();
            return p;
        }
        case TxKind::DeedMint: {
            DeedMintPayload p;
            p.square_footage = r.i64();
            p.bedrooms = r.i64();
            p.last_renovation = r.i64();
            auto n = r.u32();
            for (std::uint32_t i = 0; i < n; ++i) {
                auto name = r.str();
                p.private_commitments[name] = r.digest();
            }
            return p;
        }
        case TxKind::DeedTransfer: {
            DeedTransferPayload p;
            p.deed_id = r.digest();
            p.to = r.address();
            return p;
        }
        case TxKind::List: {
            ListPayload p;
            p.deed_id = r.digest();
            p.ask_symbol = r.str();
            p.ask_price = r.i64();
            return p;
        }
        case TxKind::Offer: {
            OfferPayload p;
            p.sale_id = r.digest();
            p.offer_price = r.i64();
            return p;
        }
        case TxKind::FundEscrow: {
            FundEscrowPayload p;
            p.sale_id = r.digest();
            return p;
        }
        case TxKind::Settle: {
            SettlePayload p;
            p.sale_id = r.digest();
            return p;
        }
        case TxKind::Cancel: {
            CancelPayload p;
            p.sale_id = r.digest();
            return p;
        }
        case TxKind::AttachCovenant: {
            AttachCovenantPayload p;
            p.deed_id = r.digest();
            p.predicate = r.str();
            return p;
        }
        case TxKind::OpenLoan: {
            OpenLoanPayload p;
            p.collateral_symbol = r.str();
            p.collateral_amount = r.i64();
            p.borrow_amount = r.i64();
            p.liquidation_threshold_bps = r.u32();
            p.rate_ppb = r.u64();
            return p;
        }
        case TxKind::Repay: {
            RepayPayload p;
            p.loan_id = r.digest();
            p.amount = r.i64();
            return p;
        }
        case TxKind::Liquidate: {
            LiquidatePayload p;
            p.loan_id = r.digest();
            return p;
        }
        case TxKind::Attest: {
            AttestPayload p;
            p.oracle_id = r.str();
            p.kind = r.str();
            p.subject_is_asset = r.u8() != 0;
            p.subject_asset = r.str();
            p.subject_deed = r.digest();
            p.price_micro = r.i64();
            p.doc_digest = r.digest();
            p.tick = r.u64();
            p.signature = r.digest();
            return p;
        }
        case TxKind::GrantAccess: {
            GrantAccessPayload p;
            p.deed_id = r.digest();
            p.grantee = r.address();
            return p;
        }
    }
    throw DecodeError("unknown tx kind");
}

inline Transaction decode_transaction(ByteReader& r) {
    Transaction tx;
    auto kind_byte = r.u8();
    if (kind_byte > static_cast<std::uint8_t>(TxKind::GrantAccess))
        throw DecodeError("unknown tx kind");
    tx.kind = static_cast<TxKind>(kind_byte);
    tx.sender = r.address();
    tx.payload = decode_payload(tx.kind, r);
    tx.gas_limit = r.u64();
    tx.tip = r.i64();
    tx.nonce = r.u64();
    return tx;
}

}  // namespace deedchain

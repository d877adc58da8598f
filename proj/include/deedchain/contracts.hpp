#pragma once
#include <cmath>
#include <optional>
#include <string>

#include "deedchain/bytes.hpp"
#include "deedchain/covenant.hpp"
#include "deedchain/errors.hpp"
#include "deedchain/tx.hpp"

namespace deedchain {

// Contract-held addresses (no private keys behind them).
inline const Address kEscrowAddress = address_from_name("deedchain:contract:escrow");
inline const Address kLendingPoolAddress = address_from_name("deedchain:contract:lending");

enum class SaleState : std::uint8_t { Listed = 0, Offered, Escrowed, Settled, Cancelled };

inline std::string_view sale_state_name(SaleState s) {
    switch (s) {
        case SaleState::Listed: return "Listed";
        case SaleState::Offered: return "Offered";
        case SaleState::Escrowed: return "Escrowed";
        case SaleState::Settled: return "Settled";
        case SaleState::Cancelled: return "Cancelled";
    }
    return "?";
}

// One property sale: Listed -> Offered -> Escrowed -> Settled/Cancelled.
// Funds sit at the escrow contract address while state == Escrowed.
struct EscrowSale {
    Digest sale_id{};
    Digest deed_id{};
    Address seller{};
    std::string ask_symbol;
    Amount ask_price = 0;
    SaleState state = SaleState::Listed;
    std::optional<Address> buyer;
    Amount offer_price = 0;
    Amount escrowed_funds = 0;
    std::string required_attestation_kind = "legal-docs";
    Tick listed_at = 0;

    bool terminal() const {
        return state == SaleState::Settled || state == SaleState::Cancelled;
    }

    void canonical_encode(ByteWriter& w) const {
        w.digest(sale_id);
        w.digest(deed_id);
        w.address(seller);
        w.str(ask_symbol);
        w.i64(ask_price);
        w.u8(static_cast<std::uint8_t>(state));
        w.u8(buyer ? 1 : 0);
        w.address(buyer ? *buyer : Address{});
        w.i64(offer_price);
        w.i64(escrowed_funds);
        w.str(required_attestation_kind);
        w.u64(listed_at);
    }
};

enum class LoanState : std::uint8_t { Active = 0, Repaid, Liquidated };

inline std::string_view loan_state_name(LoanState s) {
    switch (s) {
        case LoanState::Active: return "Active";
        case LoanState::Repaid: return "Repaid";
        case LoanState::Liquidated: return "Liquidated";
    }
    return "?";
}

// Minimum health factor required to open a loan.
inline constexpr double kOriginationHealthFloor = 1.25;

// Collateralized debt position. Interest compounds per tick; the debt is
// kept as (principal, accrued_ticks) so that accruals compose exactly and
// rounding happens only when the debt is read out.
struct LoanPosition {
    Digest loan_id{};
    Address borrower{};
    std::string collateral_symbol;
    Amount collateral_amount = 0;
    Amount principal = 0;  // stablecoin units at the last repay boundary
    std::uint64_t rate_ppb = 1000;
    std::uint32_t liquidation_threshold_bps = 8000;
    Tick opened_at = 0;
    std::uint64_t accrued_ticks = 0;
    LoanState state = LoanState::Active;

    double rate() const { return static_cast<double>(rate_ppb) * 1e-9; }
    double threshold() const { return static_cast<double>(liquidation_threshold_bps) * 1e-4; }

    // debt = round_half_up(principal * (1 + r)^ticks)
    Amount debt() const {
        if (accrued_ticks == 0) return principal;
        long double growth = powl(1.0L + static_cast<long double>(rate_ppb) * 1e-9L,
                                  static_cast<long double>(accrued_ticks));
        return static_cast<Amount>(floorl(static_cast<long double>(principal) * growth + 0.5L));
    }

    Status accrue(std::uint64_t elapsed_ticks) {
        if (state != LoanState::Active) return Status::fail(Err::BadState);
        accrued_ticks += elapsed_ticks;
        return Status::okay();
    }

    // HF = collateral_amount * price * threshold / debt
    double health_factor(double collateral_price) const {
        double d = static_cast<double>(debt());
        if (d <= 0) return std::numeric_limits<double>::infinity();
        return static_cast<double>(collateral_amount) * collateral_price * threshold() / d;
    }

    // Reduces the debt; collateral release and state change are reported to
    // the caller via the returned flag.
    Result<bool> repay(Amount amount) {
        if (state != LoanState::Active) return Result<bool>::fail(Err::BadState);
        Amount d = debt();
        if (amount <= 0 || amount > d) return Result<bool>::fail(Err::Overpay);
        principal = d - amount;
        accrued_ticks = 0;
        if (principal == 0) {
            state = LoanState::Repaid;
            return Result<bool>::success(true);  // closed, return collateral
        }
        return Result<bool>::success(false);
    }

    void canonical_encode(ByteWriter& w) const {
        w.digest(loan_id);
        w.address(borrower);
        w.str(collateral_symbol);
        w.i64(collateral_amount);
        w.i64(principal);
        w.u64(rate_ppb);
        w.u32(liquidation_threshold_bps);
        w.u64(opened_at);
        w.u64(accrued_ticks);
        w.u8(static_cast<std::uint8_t>(state));
    }
};

}  // namespace deedchain

#pragma once
#include <map>
#include <string>
#include <vector>

#include "deedchain/bytes.hpp"
#include "deedchain/contracts.hpp"
#include "deedchain/covenant.hpp"
#include "deedchain/deed.hpp"
#include "deedchain/errors.hpp"
#include "deedchain/gas.hpp"
#include "deedchain/oracle.hpp"
#include "deedchain/token.hpp"
#include "deedchain/tx.hpp"

namespace deedchain {

inline constexpr Tick kPriceStalenessBound = 100;
inline const std::string kGasTokenSymbol = "COIN";

struct TxOutcome {
    Digest tx_id{};
    TxKind kind = TxKind::TokenTransfer;
    Status status;
    std::uint64_t gas_used = 0;
};

// Full replayable ledger state. All mutation goes through apply_block /
// apply_transactions on the single writer; copies serve as read snapshots.
struct ChainState {
    std::map<std::string, FungibleToken> tokens;  // excludes the stablecoin
    StableCoin stable;
    DeedRegistry deeds;
    std::map<Digest, EscrowSale> escrows;
    std::map<Digest, LoanPosition> loans;
    std::map<Digest, Covenant> covenants;
    std::vector<Attestation> attestation_log;
    PriceFeed feed;
    OracleRegistry oracles;
    AccessControl acl;
    std::map<Address, std::uint64_t> last_nonce;
    GasSchedule schedule = GasSchedule::defaults();
    FeeState fee_state;
    Tick tick = 0;
    std::map<std::string, Amount> burned;  // per-token fee burn totals

    ChainState() { stable.token.symbol = "USDS"; }

    FungibleToken* token_for(const std::string& symbol) {
        if (symbol == stable.token.symbol) return &stable.token;
        auto it = tokens.find(symbol);
        return it == tokens.end() ? nullptr : &it->second;
    }

    const FungibleToken* token_for(const std::string& symbol) const {
        return const_cast<ChainState*>(this)->token_for(symbol);
    }

    void create_token(const std::string& symbol) {
        if (symbol != stable.token.symbol && !tokens.count(symbol))
            tokens[symbol].symbol = symbol;
    }

    // Applies txs in order; a failing tx leaves state exactly as before it.
    std::vector<TxOutcome> apply_transactions(const std::vector<Transaction>& txs,
                                              const Address& proposer) {
        std::vector<TxOutcome> outcomes;
        outcomes.reserve(txs.size());
        for (const auto& tx : txs) {
            ChainState snapshot = *this;
            TxOutcome out;
            out.tx_id = tx.id();
            out.kind = tx.kind;
            out.status = apply_one(tx, proposer, out.gas_used);
            if (!out.status.ok()) {
                *this = std::move(snapshot);
                out.gas_used = 0;
            }
            outcomes.push_back(std::move(out));
        }
        return outcomes;
    }

    std::uint64_t gas_used(const std::vector<TxOutcome>& outcomes) const {
        std::uint64_t total = 0;
        for (const auto& o : outcomes) total += o.gas_used;
        return total;
    }

    // Block boundary: base fee responds to congestion, time advances, and
    // active loans accrue one tick of interest.
    void end_block(std::uint64_t block_gas_used) {
        fee_state = fee_state.next(block_gas_used);
        tick += 1;
        for (auto& [_, loan] : loans) {
            if (loan.state == LoanState::Active) loan.accrue(1);
        }
    }

    Bytes canonical_encode() const {
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(tokens.size()));
        for (const auto& [_, t] : tokens) t.canonical_encode(w);
        stable.canonical_encode(w);
        deeds.canonical_encode(w);
        w.u32(static_cast<std::uint32_t>(escrows.size()));
        for (const auto& [_, s] : escrows) s.canonical_encode(w);
        w.u32(static_cast<std::uint32_t>(loans.size()));
        for (const auto& [_, l] : loans) l.canonical_encode(w);
        w.u32(static_cast<std::uint32_t>(covenants.size()));
        for (const auto& [id, c] : covenants) {
            w.digest(id);
            w.digest(c.deed_id);
            w.str(c.predicate_text);
        }
        w.u32(static_cast<std::uint32_t>(attestation_log.size()));
        for (const auto& a : attestation_log) a.canonical_encode(w);
        feed.canonical_encode(w);
        oracles.canonical_encode(w);
        acl.canonical_encode(w);
        w.u32(static_cast<std::uint32_t>(last_nonce.size()));
        for (const auto& [addr, n] : last_nonce) {
            w.address(addr);
            w.u64(n);
        }
        fee_state.canonical_encode(w);
        w.u64(tick);
        w.u32(static_cast<std::uint32_t>(burned.size()));
        for (const auto& [sym, amt] : burned) {
            w.str(sym);
            w.i64(amt);
        }
        return w.take();
    }

    Digest state_root() const { return sha256(canonical_encode()); }

private:
    Status check_covenants(const DeedToken& deed, const Address& from, const Address& to) {
        CovenantEnv env{deed.public_metadata, from, to, tick};
        for (const auto& cid : deed.covenant_ids) {
            auto it = covenants.find(cid);
            if (it != covenants.end() && !it->second.eval(env))
                return Status::fail(Err::CovenantViolated, to_hex(cid));
        }
        return Status::okay();
    }

    Status burn_fee(FungibleToken& token, const Address& from, Amount amount) {
        auto st = token.burn(from, amount);
        if (st.ok()) burned[token.symbol] += amount;
        return st;
    }

    Status apply_one(const Transaction& tx, const Address& proposer,
                     std::uint64_t& gas_out) {
        auto nit = last_nonce.find(tx.sender);
        if (nit != last_nonce.end() && tx.nonce <= nit->second)
            return Status::fail(Err::BadNonce);

        auto gas = schedule.cost(tx);
        if (!gas.ok()) return gas.status();
        if (*gas > tx.gas_limit)
            return Status::fail(Err::InsufficientGas, "gas limit below cost");
        gas_out = *gas;

        // Settle pays its fee out of the escrowed proceeds; every other tx
        // pays from the sender's gas-token balance up front.
        if (tx.kind != TxKind::Settle) {
            TxFee fee = tx_fee(*gas, fee_state.base_fee, tx.tip);
            auto* gas_token = token_for(kGasTokenSymbol);
            if (!gas_token) return Status::fail(Err::UnknownToken, kGasTokenSymbol);
            if (gas_token->balance(tx.sender) < fee.total())
                return Status::fail(Err::InsufficientGas, "cannot pay fee");
            auto st = burn_fee(*gas_token, tx.sender, fee.burned);
            if (!st.ok()) return st;
            st = gas_token->transfer(tx.sender, proposer, fee.tipped);
            if (!st.ok()) return st;
        }

        auto st = dispatch(tx, *gas, proposer);
        if (!st.ok()) return st;
        last_nonce[tx.sender] = tx.nonce;
        return Status::okay();
    }

    Status dispatch(const Transaction& tx, std::uint64_t gas, const Address& proposer) {
        switch (tx.kind) {
            case TxKind::TokenTransfer: {
                const auto& p = std::get<TokenTransferPayload>(tx.payload);
                auto* t = token_for(p.symbol);
                if (!t) return Status::fail(Err::UnknownToken, p.symbol);
                return t->transfer(tx.sender, p.to, p.amount);
            }
            case TxKind::TokenApprove: {
                const auto& p = std::get<TokenApprovePayload>(tx.payload);
                auto* t = token_for(p.symbol);
                if (!t) return Status::fail(Err::UnknownToken, p.symbol);
                if (p.amount < 0) return Status::fail(Err::BadBalance);
                t->approve(tx.sender, p.spender, p.amount);
                return Status::okay();
            }
            case TxKind::StableMint: {
                const auto& p = std::get<StableMintPayload>(tx.payload);
                return stable.mint(p.to, p.fiat_deposit);
            }
            case TxKind::StableRedeem: {
                const auto& p = std::get<StableRedeemPayload>(tx.payload);
                return stable.redeem(tx.sender, p.amount);
            }
            case TxKind::DeedMint: {
                const auto& p = std::get<DeedMintPayload>(tx.payload);
                DeedMetadata meta{p.square_footage, p.bedrooms, p.last_renovation};
                return deeds.mint(tx.id(), tx.sender, meta, p.private_commitments, tick)
                    .status();
            }
            case TxKind::DeedTransfer: {
                const auto& p = std::get<DeedTransferPayload>(tx.payload);
                const auto* deed = deeds.find(p.deed_id);
                if (!deed) return Status::fail(Err::UnknownDeed);
                if (deed->owner != tx.sender) return Status::fail(Err::NotOwner);
                auto st = check_covenants(*deed, tx.sender, p.to);
                if (!st.ok()) return st;
                return deeds.transfer(p.deed_id, tx.sender, p.to, tick);
            }
            case TxKind::List: return handle_list(tx);
            case TxKind::Offer: return handle_offer(tx);
            case TxKind::FundEscrow: return handle_fund(tx);
            case TxKind::Settle: return handle_settle(tx, gas, proposer);
            case TxKind::Cancel: return handle_cancel(tx);
            case TxKind::AttachCovenant: return handle_attach_covenant(tx);
            case TxKind::OpenLoan: return handle_open_loan(tx);
            case TxKind::Repay: return handle_repay(tx);
            case TxKind::Liquidate: return handle_liquidate(tx);
            case TxKind::Attest: return handle_attest(tx);
            case TxKind::GrantAccess: {
                const auto& p = std::get<GrantAccessPayload>(tx.payload);
                const auto* deed = deeds.find(p.deed_id);
                if (!deed) return Status::fail(Err::UnknownDeed);
                if (deed->owner != tx.sender) return Status::fail(Err::NotOwner);
                acl.grant(p.deed_id, p.grantee);
                return Status::okay();
            }
        }
        return Status::fail(Err::UnknownKind);
    }

    Status handle_list(const Transaction& tx) {
        const auto& p = std::get<ListPayload>(tx.payload);
        const auto* deed = deeds.find(p.deed_id);
        if (!deed) return Status::fail(Err::UnknownDeed);
        if (deed->owner != tx.sender) return Status::fail(Err::NotOwner);
        if (!token_for(p.ask_symbol)) return Status::fail(Err::UnknownToken, p.ask_symbol);
        if (p.ask_price <= 0) return Status::fail(Err::BadBalance, "ask must be positive");
        for (const auto& [_, sale] : escrows) {
            if (sale.deed_id == p.deed_id && !sale.terminal())
                return Status::fail(Err::AlreadyListed);
        }
        EscrowSale sale;
        sale.sale_id = sha256(std::span<const std::uint8_t>(tx.id()));
        sale.deed_id = p.deed_id;
        sale.seller = tx.sender;
        sale.ask_symbol = p.ask_symbol;
        sale.ask_price = p.ask_price;
        sale.listed_at = tick;
        escrows.emplace(sale.sale_id, std::move(sale));
        return Status::okay();
    }

    Status handle_offer(const Transaction& tx) {
        const auto& p = std::get<OfferPayload>(tx.payload);
        auto it = escrows.find(p.sale_id);
        if (it == escrows.end()) return Status::fail(Err::UnknownSale);
        auto& sale = it->second;
        if (sale.state != SaleState::Listed) return Status::fail(Err::BadState);
        if (tx.sender == sale.seller) return Status::fail(Err::SelfDeal);
        if (p.offer_price <= 0) return Status::fail(Err::BadBalance, "offer must be positive");
        sale.state = SaleState::Offered;
        sale.buyer = tx.sender;
        sale.offer_price = p.offer_price;
        return Status::okay();
    }

    Status handle_fund(const Transaction& tx) {
        const auto& p = std::get<FundEscrowPayload>(tx.payload);
        auto it = escrows.find(p.sale_id);
        if (it == escrows.end()) return Status::fail(Err::UnknownSale);
        auto& sale = it->second;
        if (sale.state != SaleState::Offered) return Status::fail(Err::BadState);
        if (!sale.buyer || tx.sender != *sale.buyer) return Status::fail(Err::NotParty);
        auto* t = token_for(sale.ask_symbol);
        if (!t) return Status::fail(Err::UnknownToken, sale.ask_symbol);
        auto st = t->transfer_from(kEscrowAddress, *sale.buyer, kEscrowAddress,
                                   sale.offer_price);
        if (!st.ok()) return st;
        sale.state = SaleState::Escrowed;
        sale.escrowed_funds = sale.offer_price;
        return Status::okay();
    }

    Status handle_settle(const Transaction& tx, std::uint64_t gas, const Address& proposer) {
        const auto& p = std::get<SettlePayload>(tx.payload);
        auto it = escrows.find(p.sale_id);
        if (it == escrows.end()) return Status::fail(Err::UnknownSale);
        auto& sale = it->second;
        if (sale.state != SaleState::Escrowed) return Status::fail(Err::BadState);

        bool attested = false;
        for (const auto& att : attestation_log) {
            if (!att.subject_is_asset && att.subject_deed == sale.deed_id &&
                att.kind == sale.required_attestation_kind && att.tick >= sale.listed_at) {
                attested = true;
                break;
            }
        }
        if (!attested) return Status::fail(Err::MissingAttestation);

        const auto* deed = deeds.find(sale.deed_id);
        if (!deed) return Status::fail(Err::UnknownDeed);
        auto st = check_covenants(*deed, sale.seller, *sale.buyer);
        if (!st.ok()) return st;

        TxFee fee = tx_fee(gas, fee_state.base_fee, tx.tip);
        if (fee.total() > sale.escrowed_funds)
            return Status::fail(Err::InsufficientGas, "fee exceeds escrow");

        auto* t = token_for(sale.ask_symbol);
        if (!t) return Status::fail(Err::UnknownToken, sale.ask_symbol);

        st = deeds.transfer(sale.deed_id, sale.seller, *sale.buyer, tick);
        if (!st.ok()) return st;
        st = burn_fee(*t, kEscrowAddress, fee.burned);
        if (!st.ok()) return st;
        st = t->transfer(kEscrowAddress, proposer, fee.tipped);
        if (!st.ok()) return st;
        st = t->transfer(kEscrowAddress, sale.seller, sale.escrowed_funds - fee.total());
        if (!st.ok()) return st;
        sale.escrowed_funds = 0;
        sale.state = SaleState::Settled;
        return Status::okay();
    }

    Status handle_cancel(const Transaction& tx) {
        const auto& p = std::get<CancelPayload>(tx.payload);
        auto it = escrows.find(p.sale_id);
        if (it == escrows.end()) return Status::fail(Err::UnknownSale);
        auto& sale = it->second;
        if (sale.terminal()) return Status::fail(Err::BadState);
        bool is_seller = tx.sender == sale.seller;
        bool is_buyer = sale.buyer && tx.sender == *sale.buyer;
        if (!is_seller && !(is_buyer && sale.state == SaleState::Escrowed))
            return Status::fail(Err::NotParty);
        if (sale.state == SaleState::Escrowed) {
            auto* t = token_for(sale.ask_symbol);
            if (!t) return Status::fail(Err::UnknownToken, sale.ask_symbol);
            auto st = t->transfer(kEscrowAddress, *sale.buyer, sale.escrowed_funds);
            if (!st.ok()) return st;
            sale.escrowed_funds = 0;
        }
        sale.state = SaleState::Cancelled;
        return Status::okay();
    }

    Status handle_attach_covenant(const Transaction& tx) {
        const auto& p = std::get<AttachCovenantPayload>(tx.payload);
        auto* deed = deeds.find_mut(p.deed_id);
        if (!deed) return Status::fail(Err::UnknownDeed);
        if (deed->owner != tx.sender) return Status::fail(Err::NotOwner);
        auto st = Covenant::validate(p.predicate);
        if (!st.ok()) return st;
        Covenant cov;
        cov.covenant_id = sha256(std::span<const std::uint8_t>(tx.id()));
        cov.deed_id = p.deed_id;
        cov.predicate_text = p.predicate;
        deed->covenant_ids.push_back(cov.covenant_id);
        covenants.emplace(cov.covenant_id, std::move(cov));
        return Status::okay();
    }

    Status handle_open_loan(const Transaction& tx) {
        const auto& p = std::get<OpenLoanPayload>(tx.payload);
        if (p.borrow_amount <= 0 || p.collateral_amount <= 0)
            return Status::fail(Err::BadBalance, "degenerate loan");
        if (p.liquidation_threshold_bps == 0 || p.liquidation_threshold_bps > 10'000)
            return Status::fail(Err::BadRate, "threshold out of (0,1]");
        auto* coll = token_for(p.collateral_symbol);
        if (!coll) return Status::fail(Err::UnknownToken, p.collateral_symbol);

        auto price = feed.latest(p.collateral_symbol, tick, kPriceStalenessBound);
        if (!price.ok()) return price.status();
        double px = static_cast<double>(*price) * 1e-6;

        LoanPosition loan;
        loan.loan_id = sha256(std::span<const std::uint8_t>(tx.id()));
        loan.borrower = tx.sender;
        loan.collateral_symbol = p.collateral_symbol;
        loan.collateral_amount = p.collateral_amount;
        loan.principal = p.borrow_amount;
        loan.rate_ppb = p.rate_ppb;
        loan.liquidation_threshold_bps = p.liquidation_threshold_bps;
        loan.opened_at = tick;
        if (loan.health_factor(px) < kOriginationHealthFloor)
            return Status::fail(Err::UndercollateralizedAtOpen);

        auto st = coll->transfer(tx.sender, kLendingPoolAddress, p.collateral_amount);
        if (!st.ok()) return st;
        st = stable.token.transfer(kLendingPoolAddress, tx.sender, p.borrow_amount);
        if (!st.ok()) return st;
        loans.emplace(loan.loan_id, std::move(loan));
        return Status::okay();
    }

    Status handle_repay(const Transaction& tx) {
        const auto& p = std::get<RepayPayload>(tx.payload);
        auto it = loans.find(p.loan_id);
        if (it == loans.end()) return Status::fail(Err::UnknownLoan);
        auto& loan = it->second;
        if (loan.state != LoanState::Active) return Status::fail(Err::BadState);
        auto st = stable.token.transfer(tx.sender, kLendingPoolAddress, p.amount);
        if (!st.ok()) return st;
        auto closed = loan.repay(p.amount);
        if (!closed.ok()) return closed.status();
        if (*closed) {
            auto* coll = token_for(loan.collateral_symbol);
            if (!coll) return Status::fail(Err::UnknownToken, loan.collateral_symbol);
            return coll->transfer(kLendingPoolAddress, loan.borrower,
                                  loan.collateral_amount);
        }
        return Status::okay();
    }

    Status handle_liquidate(const Transaction& tx) {
        const auto& p = std::get<LiquidatePayload>(tx.payload);
        auto it = loans.find(p.loan_id);
        if (it == loans.end()) return Status::fail(Err::UnknownLoan);
        auto& loan = it->second;
        if (loan.state != LoanState::Active) return Status::fail(Err::BadState);
        auto price = feed.latest(loan.collateral_symbol, tick, kPriceStalenessBound);
        if (!price.ok()) return price.status();
        double px = static_cast<double>(*price) * 1e-6;
        if (!(loan.health_factor(px) < 1.0)) return Status::fail(Err::NotLiquidatable);

        // Liquidator covers the full debt and takes the whole collateral.
        auto st = stable.token.transfer(tx.sender, kLendingPoolAddress, loan.debt());
        if (!st.ok()) return st;
        auto* coll = token_for(loan.collateral_symbol);
        if (!coll) return Status::fail(Err::UnknownToken, loan.collateral_symbol);
        st = coll->transfer(kLendingPoolAddress, tx.sender, loan.collateral_amount);
        if (!st.ok()) return st;
        loan.state = LoanState::Liquidated;
        return Status::okay();
    }

    Status handle_attest(const Transaction& tx) {
        const auto& p = std::get<AttestPayload>(tx.payload);
        if (!oracles.known(p.oracle_id)) return Status::fail(Err::UnknownOracle);
        Attestation att;
        att.oracle_id = p.oracle_id;
        att.kind = p.kind;
        att.subject_is_asset = p.subject_is_asset;
        att.subject_asset = p.subject_asset;
        att.subject_deed = p.subject_deed;
        att.price_micro = p.price_micro;
        att.doc_digest = p.doc_digest;
        att.tick = p.tick;
        att.signature = p.signature;
        if (!oracles.verify(att)) return Status::fail(Err::BadSignature);
        if (att.kind == "price" && att.subject_is_asset) {
            auto st = feed.push(att.subject_asset, att.tick, att.price_micro);
            if (!st.ok()) return st;
        }
        attestation_log.push_back(std::move(att));
        return Status::okay();
    }
};

}  // namespace deedchain

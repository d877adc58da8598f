#pragma once
#include <map>
#include <string>

#include "deedchain/bytes.hpp"
#include "deedchain/errors.hpp"
#include "deedchain/tx.hpp"

namespace deedchain {

// ERC-20 style fungible token. Amounts are integers in smallest units;
// sum of balances always equals total_supply.
struct FungibleToken {
    std::string symbol;
    Amount total_supply = 0;
    std::map<Address, Amount> balances;
    std::map<std::pair<Address, Address>, Amount> allowances;  // (owner, spender)

    Amount balance(const Address& a) const {
        auto it = balances.find(a);
        return it == balances.end() ? 0 : it->second;
    }

    Amount allowance(const Address& owner, const Address& spender) const {
        auto it = allowances.find({owner, spender});
        return it == allowances.end() ? 0 : it->second;
    }

    void mint(const Address& to, Amount amount) {
        balances[to] += amount;
        total_supply += amount;
    }

    Status burn(const Address& from, Amount amount) {
        if (amount < 0 || balance(from) < amount) return Status::fail(Err::BadBalance);
        set_balance(from, balance(from) - amount);
        total_supply -= amount;
        return Status::okay();
    }

    Status transfer(const Address& from, const Address& to, Amount amount) {
        if (amount < 0 || balance(from) < amount) return Status::fail(Err::BadBalance);
        set_balance(from, balance(from) - amount);
        balances[to] += amount;
        return Status::okay();
    }

    void approve(const Address& owner, const Address& spender, Amount amount) {
        if (amount == 0) allowances.erase({owner, spender});
        else allowances[{owner, spender}] = amount;
    }

    Status transfer_from(const Address& spender, const Address& owner,
                         const Address& to, Amount amount) {
        if (amount < 0 || allowance(owner, spender) < amount)
            return Status::fail(Err::BadAllowance);
        if (balance(owner) < amount) return Status::fail(Err::BadBalance);
        approve(owner, spender, allowance(owner, spender) - amount);
        set_balance(owner, balance(owner) - amount);
        balances[to] += amount;
        return Status::okay();
    }

    void canonical_encode(ByteWriter& w) const {
        w.str(symbol);
        w.i64(total_supply);
        w.u32(static_cast<std::uint32_t>(balances.size()));
        for (const auto& [addr, amt] : balances) {
            w.address(addr);
            w.i64(amt);
        }
        w.u32(static_cast<std::uint32_t>(allowances.size()));
        for (const auto& [key, amt] : allowances) {
            w.address(key.first);
            w.address(key.second);
            w.i64(amt);
        }
    }

private:
    void set_balance(const Address& a, Amount v) {
        if (v == 0) balances.erase(a);
        else balances[a] = v;
    }
};

// Fiat-reserve-backed stablecoin, pegged 1:1. total_supply <= reserve
// whenever the depeg flag is clear.
struct StableCoin {
    FungibleToken token;
    Amount reserve = 0;
    bool depegged = false;

    Status mint(const Address& to, Amount fiat_deposit) {
        if (fiat_deposit <= 0) return Status::fail(Err::BadBalance, "deposit must be positive");
        reserve += fiat_deposit;
        token.mint(to, fiat_deposit);
        refresh_flag();
        return Status::okay();
    }

    Status redeem(const Address& from, Amount amount) {
        if (amount <= 0) return Status::fail(Err::BadBalance, "amount must be positive");
        if (token.balance(from) < amount) return Status::fail(Err::BadBalance);
        if (reserve < amount) return Status::fail(Err::ReserveUnderflow);
        auto st = token.burn(from, amount);
        if (!st.ok()) return st;
        reserve -= amount;
        refresh_flag();
        return Status::okay();
    }

    // Reserve haircut; publishes a sub-par price while undercollateralized.
    void depeg(double haircut_fraction) {
        reserve -= static_cast<Amount>(static_cast<double>(reserve) * haircut_fraction);
        refresh_flag();
    }

    double published_price() const {
        if (token.total_supply == 0) return 1.0;
        double ratio = static_cast<double>(reserve) / static_cast<double>(token.total_supply);
        return ratio < 1.0 ? ratio : 1.0;
    }

    bool fully_backed() const { return token.total_supply <= reserve; }

    void canonical_encode(ByteWriter& w) const {
        token.canonical_encode(w);
        w.i64(reserve);
        w.u8(depegged ? 1 : 0);
    }

private:
    void refresh_flag() { depegged = !fully_backed(); }
};

}  // namespace deedchain

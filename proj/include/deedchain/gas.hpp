#pragma once
#include <cmath>
#include <map>

#include "deedchain/errors.hpp"
#include "deedchain/tx.hpp"

namespace deedchain {

struct GasSchedule {
    std::map<TxKind, std::uint64_t> base_gas;
    std::uint64_t per_payload_byte = 16;

    static GasSchedule defaults() {
        GasSchedule s;
        for (int k = 0; k <= static_cast<int>(TxKind::GrantAccess); ++k)
            s.base_gas[static_cast<TxKind>(k)] = 30'000;
        s.base_gas[TxKind::TokenTransfer] = 21'000;
        s.base_gas[TxKind::DeedTransfer] = 40'000;
        s.base_gas[TxKind::Settle] = 90'000;
        s.base_gas[TxKind::OpenLoan] = 80'000;
        s.base_gas[TxKind::Liquidate] = 70'000;
        return s;
    }

    Result<std::uint64_t> cost(TxKind kind, std::size_t payload_bytes) const {
        auto it = base_gas.find(kind);
        if (it == base_gas.end()) return Result<std::uint64_t>::fail(Err::UnknownKind);
        return Result<std::uint64_t>::success(it->second + per_payload_byte * payload_bytes);
    }

    Result<std::uint64_t> cost(const Transaction& tx) const {
        return cost(tx.kind, tx.payload_size());
    }
};

// Congestion-responsive base fee: each block nudges the fee toward the
// target utilization. new = max(1, round(base * (1 + (u - t) / (t * q)))).
struct FeeState {
    Amount base_fee = 1000;  // token units per gas
    std::uint32_t target_num = 1, target_den = 2;
    std::uint32_t adjustment_quotient = 8;
    std::uint64_t block_gas_limit = 10'000'000;

    FeeState next(std::uint64_t gas_used) const {
        FeeState out = *this;
        // exact fixed point at u == t
        if (gas_used * target_den == block_gas_limit * target_num) return out;
        long double u = static_cast<long double>(gas_used) / block_gas_limit;
        long double t = static_cast<long double>(target_num) / target_den;
        long double mult = 1.0L + (u - t) / (t * adjustment_quotient);
        Amount next_fee = static_cast<Amount>(llroundl(base_fee * mult));
        out.base_fee = next_fee < 1 ? 1 : next_fee;
        return out;
    }

    void canonical_encode(ByteWriter& w) const {
        w.i64(base_fee);
        w.u32(target_num);
        w.u32(target_den);
        w.u32(adjustment_quotient);
        w.u64(block_gas_limit);
    }
};

struct TxFee {
    Amount burned = 0;  // base-fee component
    Amount tipped = 0;  // credited to the block proposer
    Amount total() const { return burned + tipped; }
};

inline TxFee tx_fee(std::uint64_t gas_units, Amount base_fee, Amount tip) {
    return {static_cast<Amount>(gas_units) * base_fee, tip};
}

// --- transaction-cost comparison (fiat, doubles) ---

struct CostReport {
    double price = 0;
    double commission_cost = 0;
    double propy_cost = 0;
    double protocol_cost = 0;
};

inline Result<double> commission_cost(double price, double rate) {
    if (rate < 0 || rate > 0.10) return Result<double>::fail(Err::BadRate);
    return Result<double>::success(price * rate);
}

struct PropyParams {
    double pro_token_price = 2.99;  // fiat per PRO
    double pro_units = 0;
    double pgas_units = 0;
    double pgas_unit_cost = 0;  // fiat per PGas unit; illustrative default
};

inline double propy_fee(const PropyParams& p) {
    return p.pgas_units * p.pgas_unit_cost + p.pro_units * p.pro_token_price;
}

inline Result<CostReport> compare_costs(double price, double commission_rate,
                                        const PropyParams& propy,
                                        std::uint64_t protocol_gas, Amount base_fee,
                                        double token_fiat_price) {
    auto commission = commission_cost(price, commission_rate);
    if (!commission.ok()) return Result<CostReport>::fail(commission.err, commission.detail);
    CostReport r;
    r.price = price;
    r.commission_cost = *commission;
    r.propy_cost = propy_fee(propy);
    r.protocol_cost = static_cast<double>(protocol_gas) *
                      static_cast<double>(base_fee) * token_fiat_price;
    return Result<CostReport>::success(r);
}

}  // namespace deedchain

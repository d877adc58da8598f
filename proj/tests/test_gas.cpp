#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deedchain/gas.hpp"

using namespace deedchain;

TEST_CASE("gas cost: base plus per-byte") {
    auto s = GasSchedule::defaults();
    auto zero = s.cost(TxKind::TokenTransfer, 0);
    REQUIRE(zero.ok());
    CHECK(*zero == 21'000);
    auto hundred = s.cost(TxKind::TokenTransfer, 100);
    CHECK(*hundred == 22'600);  // 21000 + 16 * 100
}

TEST_CASE("gas schedule orders settle above token transfer") {
    auto s = GasSchedule::defaults();
    CHECK(*s.cost(TxKind::Settle, 64) > *s.cost(TxKind::TokenTransfer, 64));
    CHECK(*s.cost(TxKind::OpenLoan, 0) > *s.cost(TxKind::DeedTransfer, 0));
}

TEST_CASE("base fee fixed point at target utilization") {
    FeeState f;
    f.base_fee = 12'345;
    auto next = f.next(f.block_gas_limit / 2);
    CHECK(next.base_fee == 12'345);
}

TEST_CASE("base fee multipliers at empty and full blocks") {
    FeeState f;
    f.base_fee = 1000;
    CHECK(f.next(0).base_fee == 875);                   // x 0.875
    CHECK(f.next(f.block_gas_limit).base_fee == 1125);  // x 1.125
}

TEST_CASE("base fee monotone in utilization and floored at 1") {
    FeeState f;
    f.base_fee = 1'000'000;
    Amount prev = -1;
    for (std::uint64_t u = 0; u <= 100; ++u) {
        auto next = f.next(f.block_gas_limit / 100 * u);
        CHECK(next.base_fee >= prev);
        prev = next.base_fee;
    }
    FeeState tiny;
    tiny.base_fee = 1;
    CHECK(tiny.next(0).base_fee == 1);
}

TEST_CASE("tx fee split: burn plus tip") {
    auto fee = tx_fee(21'000, 2, 500);
    CHECK(fee.burned == 42'000);
    CHECK(fee.tipped == 500);
    CHECK(fee.total() == 42'500);
    CHECK(tx_fee(100, 3, 0).tipped == 0);
}

TEST_CASE("commission cost") {
    CHECK(*commission_cost(400'000, 0.0) == 0.0);
    CHECK(*commission_cost(400'000, 0.055) == doctest::Approx(22'000));
    CHECK(commission_cost(400'000, 0.11).err == Err::BadRate);
    CHECK(commission_cost(400'000, -0.01).err == Err::BadRate);
}

TEST_CASE("propy fee components") {
    PropyParams p;
    p.pro_token_price = 2.99;
    p.pro_units = 100;
    p.pgas_units = 0;
    CHECK(propy_fee(p) == doctest::Approx(299.00));

    PropyParams zero;
    zero.pro_token_price = 0;
    CHECK(propy_fee(zero) == 0.0);

    p.pgas_units = 10;
    p.pgas_unit_cost = 1.5;
    auto base = propy_fee(p);
    p.pro_units *= 2;
    CHECK(propy_fee(p) - base == doctest::Approx(299.00));  // PRO component linear
}

TEST_CASE("cost report composes the standalone operations") {
    PropyParams propy;
    propy.pro_units = 50;
    auto r = compare_costs(400'000, 0.055, propy, 90'000, 2, 0.0001);
    REQUIRE(r.ok());
    CHECK(r->commission_cost == *commission_cost(400'000, 0.055));
    CHECK(r->propy_cost == propy_fee(propy));
    CHECK(r->protocol_cost == doctest::Approx(90'000.0 * 2 * 0.0001));
    CHECK(r->protocol_cost < r->commission_cost);

    auto zero_gas = compare_costs(400'000, 0.055, propy, 0, 2, 0.0001);
    CHECK(zero_gas->protocol_cost == 0.0);

    CHECK(compare_costs(1, 0.5, propy, 0, 1, 1).err == Err::BadRate);
}

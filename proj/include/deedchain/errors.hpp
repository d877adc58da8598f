#pragma once
#include <optional>
#include <string>
#include <string_view>

namespace deedchain {

enum class Err {
    None,
    // ledger
    InsufficientGas, BadNonce, BadParent, BadSeal, BadStateRoot,
    // assets
    BadBalance, BadAllowance, ReserveUnderflow, DuplicateDeed, NotOwner,
    UnknownToken,
    // contracts
    AlreadyListed, BadState, SelfDeal, NotParty, MissingAttestation,
    CovenantViolated, MalformedPredicate, UndercollateralizedAtOpen,
    NotLiquidatable, Overpay, UnknownSale, UnknownLoan, UnknownDeed,
    // oracle
    UnknownOracle, NonMonotonicTick, NoData, StalePrice, BadSalt,
    BadSignature,
    // consensus
    EmptyStake, UnknownValidator, SearchExhausted, NoQuorum,
    // gas / analytics / cli
    UnknownKind, BadRate, ParseError, DuplicateDate, NonPositivePrice,
    EmptySeries, TooShort, NoOverlap, ZeroVariance, MissingDate,
    BadHorizon, UnknownFormat, ScenarioParseError,
};

inline std::string_view err_name(Err e) {
    switch (e) {
        case Err::None: return "None";
        case Err::InsufficientGas: return "InsufficientGas";
        case Err::BadNonce: return "BadNonce";
        case Err::BadParent: return "BadParent";
        case Err::BadSeal: return "BadSeal";
        case Err::BadStateRoot: return "BadStateRoot";
        case Err::BadBalance: return "BadBalance";
        case Err::BadAllowance: return "BadAllowance";
        case Err::ReserveUnderflow: return "ReserveUnderflow";
        case Err::DuplicateDeed: return "DuplicateDeed";
        case Err::NotOwner: return "NotOwner";
        case Err::UnknownToken: return "UnknownToken";
        case Err::AlreadyListed: return "AlreadyListed";
        case Err::BadState: return "BadState";
        case Err::SelfDeal: return "SelfDeal";
        case Err::NotParty: return "NotParty";
        case Err::MissingAttestation: return "MissingAttestation";
        case Err::CovenantViolated: return "CovenantViolated";
        case Err::MalformedPredicate: return "MalformedPredicate";
        case Err::UndercollateralizedAtOpen: return "UndercollateralizedAtOpen";
        case Err::NotLiquidatable: return "NotLiquidatable";
        case Err::Overpay: return "Overpay";
        case Err::UnknownSale: return "UnknownSale";
        case Err::UnknownLoan: return "UnknownLoan";
        case Err::UnknownDeed: return "UnknownDeed";
        case Err::UnknownOracle: return "UnknownOracle";
        case Err::NonMonotonicTick: return "NonMonotonicTick";
        case Err::NoData: return "NoData";
        case Err::StalePrice: return "StalePrice";
        case Err::BadSalt: return "BadSalt";
        case Err::BadSignature: return "BadSignature";
        case Err::EmptyStake: return "EmptyStake";
        case Err::UnknownValidator: return "UnknownValidator";
        case Err::SearchExhausted: return "SearchExhausted";
        case Err::NoQuorum: return "NoQuorum";
        case Err::UnknownKind: return "UnknownKind";
        case Err::BadRate: return "BadRate";
        case Err::ParseError: return "ParseError";
        case Err::DuplicateDate: return "DuplicateDate";
        case Err::NonPositivePrice: return "NonPositivePrice";
        case Err::EmptySeries: return "EmptySeries";
        case Err::TooShort: return "TooShort";
        case Err::NoOverlap: return "NoOverlap";
        case Err::ZeroVariance: return "ZeroVariance";
        case Err::MissingDate: return "MissingDate";
        case Err::BadHorizon: return "BadHorizon";
        case Err::UnknownFormat: return "UnknownFormat";
        case Err::ScenarioParseError: return "ScenarioParseError";
    }
    return "?";
}

struct Status {
    Err err = Err::None;
    std::string detail;

    bool ok() const { return err == Err::None; }
    static Status okay() { return {}; }
    static Status fail(Err e, std::string d = {}) { return {e, std::move(d)}; }
};

template <class T>
struct Result {
    std::optional<T> value;
    Err err = Err::None;
    std::string detail;

    bool ok() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    T& operator*() { return *value; }
    const T* operator->() const { return &*value; }

    static Result success(T v) {
        Result r;
        r.value = std::move(v);
        return r;
    }
    static Result fail(Err e, std::string d = {}) {
        Result r;
        r.err = e;
        r.detail = std::move(d);
        return r;
    }
    Status status() const { return ok() ? Status::okay() : Status{err, detail}; }
};

}  // namespace deedchain

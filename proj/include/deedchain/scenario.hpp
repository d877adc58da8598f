#pragma once
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "deedchain/analytics.hpp"
#include "deedchain/chain.hpp"

namespace deedchain {

// Scenario files: a line-based, human-writable script driving one
// reproducible end-to-end run. Grammar (one statement per line, '#'
// comments, blank lines ignored):
//
//   schema: 1
//   name: <identifier>
//   seed: <u64>
//   consensus: pow|pow-memory|pos|quorum [difficulty=N] [memory=N]
//              [threshold=NUM/DEN]
//   base_fee: <amount>            (genesis base fee, default 1)
//   token: <symbol>               (declare a fungible token)
//   pool_usds: <amount>           (stablecoin liquidity for the lending pool)
//   actor: <name> [coin=N] [usds=N] [stake=N] [<SYMBOL>=N ...]
//
// followed by actions, executed in order:
//
//   transfer <from> <to> <symbol> <amount>
//   approve <owner> <spender|escrow|pool> <symbol> <amount>
//   stable_mint <actor> <fiat-amount>
//   stable_redeem <actor> <amount>
//   mint_deed <actor> <deed-name> sqft=N bedrooms=N renovated=YYYY-MM-DD
//   deed_transfer <from> <deed-name> <to>
//   attach_covenant <actor> <deed-name> <predicate ... to end of line>
//   grant_access <owner> <deed-name> <grantee>
//   list <actor> <deed-name> <sale-name> <symbol> <price>
//   offer <actor> <sale-name> <price>
//   fund <actor> <sale-name>
//   settle <actor> <sale-name>
//   cancel <actor> <sale-name>
//   attest_docs <deed-name>
//   attest_price <symbol> <price-micro>
//   open_loan <actor> <loan-name> <symbol> collateral=N borrow=N
//             [threshold_bps=N] [rate_ppb=N]
//   repay <actor> <loan-name> <amount>
//   liquidate <actor> <loan-name>
//   advance <ticks>               (seal pending txs, then empty blocks)
//   inject_shock <symbol> event=<pct> period=<pct> horizon=<ticks>
//   expect owner <deed-name> <actor>
//   expect balance <actor> <symbol> <amount>
//   expect sale_state <sale-name> <Listed|Offered|Escrowed|Settled|Cancelled>
//   expect loan_state <loan-name> <Active|Repaid|Liquidated>
//   expect price <symbol> <micro>
//
// Actions queue transactions; `advance` seals them into a block and then
// appends empty blocks, one per remaining tick. Assertions read the
// committed state, so place them after an `advance`. Failed ledger actions
// are recorded in the report and the run continues.

struct ScenarioActor {
    std::string name;
    Amount coin = 0;
    Amount usds = 0;
    std::uint64_t stake = 0;
    std::map<std::string, Amount> token_balances;  // declared tokens only
};

struct ScenarioStatement {
    std::size_t line_no = 0;
    std::string text;                 // verbatim source line (trimmed)
    std::vector<std::string> tokens;  // whitespace-split
};

struct Scenario {
    std::string name = "unnamed";
    std::uint64_t seed = 0;
    ConsensusConfig consensus;
    Amount base_fee = 1;
    std::vector<std::string> tokens;  // extra fungible tokens
    Amount pool_usds = 0;
    std::vector<ScenarioActor> actors;
    std::vector<ScenarioStatement> actions;
};

struct ActionOutcome {
    std::size_t line_no = 0;
    std::string text;
    Status status;
    bool is_assertion = false;
    bool passed = false;  // assertions only
};

struct RunReport {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::vector<ActionOutcome> outcomes;
    std::vector<std::string> summary;  // final-state lines, deterministic order
    std::size_t assertions_total = 0;
    std::size_t assertions_failed = 0;
    std::size_t actions_failed = 0;

    bool ok() const { return assertions_failed == 0; }
};

namespace scenario_detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// "key=value" option lookup over a token span.
inline std::optional<std::string> opt(const std::vector<std::string>& toks,
                                      std::size_t from, const std::string& key) {
    auto prefix = key + "=";
    for (std::size_t i = from; i < toks.size(); ++i)
        if (toks[i].rfind(prefix, 0) == 0) return toks[i].substr(prefix.size());
    return std::nullopt;
}

inline Result<std::int64_t> to_int(const std::string& s) {
    try {
        std::size_t idx = 0;
        auto v = std::stoll(s, &idx);
        if (idx != s.size()) throw std::invalid_argument("");
        return Result<std::int64_t>::success(v);
    } catch (...) {
        return Result<std::int64_t>::fail(Err::ScenarioParseError, "bad integer '" + s + "'");
    }
}

inline Result<double> to_double(const std::string& s) {
    try {
        std::size_t idx = 0;
        auto v = std::stod(s, &idx);
        if (idx != s.size()) throw std::invalid_argument("");
        return Result<double>::success(v);
    } catch (...) {
        return Result<double>::fail(Err::ScenarioParseError, "bad number '" + s + "'");
    }
}

inline const std::set<std::string>& action_verbs() {
    static const std::set<std::string> verbs = {
        "transfer", "approve", "stable_mint", "stable_redeem", "mint_deed",
        "deed_transfer", "attach_covenant", "grant_access", "list", "offer",
        "fund", "settle", "cancel", "attest_docs", "attest_price", "open_loan",
        "repay", "liquidate", "advance", "inject_shock", "expect"};
    return verbs;
}

}  // namespace scenario_detail

inline Result<Scenario> parse_scenario(const std::string& source) {
    using namespace scenario_detail;
    using R = Result<Scenario>;
    Scenario sc;
    bool saw_schema = false;
    std::istringstream in(source);
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        return R::fail(Err::ScenarioParseError,
                       "line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        const auto& head = toks[0];
        if (head == "schema:") {
            if (toks.size() != 2 || toks[1] != "1") return fail("expected 'schema: 1'");
            saw_schema = true;
        } else if (head == "name:") {
            if (toks.size() != 2) return fail("expected 'name: <identifier>'");
            sc.name = toks[1];
        } else if (head == "seed:") {
            if (toks.size() != 2) return fail("expected 'seed: <u64>'");
            auto v = to_int(toks[1]);
            if (!v.ok()) return fail(v.detail);
            sc.seed = static_cast<std::uint64_t>(*v);
        } else if (head == "base_fee:") {
            if (toks.size() != 2) return fail("expected 'base_fee: <amount>'");
            auto v = to_int(toks[1]);
            if (!v.ok() || *v < 1) return fail("base fee must be a positive integer");
            sc.base_fee = *v;
        } else if (head == "token:") {
            if (toks.size() != 2) return fail("expected 'token: <symbol>'");
            sc.tokens.push_back(toks[1]);
        } else if (head == "pool_usds:") {
            if (toks.size() != 2) return fail("expected 'pool_usds: <amount>'");
            auto v = to_int(toks[1]);
            if (!v.ok() || *v < 0) return fail("bad pool amount");
            sc.pool_usds = *v;
        } else if (head == "consensus:") {
            if (toks.size() < 2) return fail("expected a consensus strategy");
            auto strat = parse_strategy(toks[1]);
            if (!strat.ok()) return fail(strat.detail);
            sc.consensus.strategy = *strat;
            if (auto d = opt(toks, 2, "difficulty")) {
                auto v = to_int(*d);
                if (!v.ok() || *v < 0 || *v > WorkParams::kMaxDifficulty)
                    return fail("difficulty out of range");
                sc.consensus.work.difficulty_bits = static_cast<std::uint32_t>(*v);
            }
            if (auto m = opt(toks, 2, "memory")) {
                auto v = to_int(*m);
                if (!v.ok() || *v < 1) return fail("bad memory cost");
                sc.consensus.work.memory_cost = static_cast<std::uint32_t>(*v);
            }
            if (auto t = opt(toks, 2, "threshold")) {
                auto slash = t->find('/');
                if (slash == std::string::npos) return fail("threshold must be NUM/DEN");
                auto num = to_int(t->substr(0, slash));
                auto den = to_int(t->substr(slash + 1));
                if (!num.ok() || !den.ok() || *num < 1 || *den < *num)
                    return fail("bad threshold fraction");
                sc.consensus.quorum.threshold_num = static_cast<std::uint32_t>(*num);
                sc.consensus.quorum.threshold_den = static_cast<std::uint32_t>(*den);
            }
        } else if (head == "actor:") {
            if (toks.size() < 2) return fail("expected 'actor: <name> ...'");
            ScenarioActor a;
            a.name = toks[1];
            for (const auto& other : sc.actors)
                if (other.name == a.name) return fail("duplicate actor '" + a.name + "'");
            if (auto c = opt(toks, 2, "coin")) {
                auto v = to_int(*c);
                if (!v.ok() || *v < 0) return fail("bad coin balance");
                a.coin = *v;
            }
            if (auto u = opt(toks, 2, "usds")) {
                auto v = to_int(*u);
                if (!v.ok() || *v < 0) return fail("bad usds balance");
                a.usds = *v;
            }
            if (auto s = opt(toks, 2, "stake")) {
                auto v = to_int(*s);
                if (!v.ok() || *v < 0) return fail("bad stake");
                a.stake = static_cast<std::uint64_t>(*v);
            }
            for (std::size_t i = 2; i < toks.size(); ++i) {
                auto eq = toks[i].find('=');
                if (eq == std::string::npos) return fail("expected key=value, got '" + toks[i] + "'");
                auto key = toks[i].substr(0, eq);
                if (key == "coin" || key == "usds" || key == "stake") continue;
                if (std::find(sc.tokens.begin(), sc.tokens.end(), key) == sc.tokens.end())
                    return fail("undeclared token '" + key + "' in actor roster");
                auto v = to_int(toks[i].substr(eq + 1));
                if (!v.ok() || *v < 0) return fail("bad balance for token '" + key + "'");
                a.token_balances[key] = *v;
            }
            sc.actors.push_back(std::move(a));
        } else if (action_verbs().count(head)) {
            sc.actions.push_back({line_no, line, toks});
        } else {
            return fail("unknown statement '" + head + "'");
        }
    }
    if (!saw_schema)
        return R::fail(Err::ScenarioParseError, "missing 'schema: 1' header");
    // PoS / quorum validator sets come from staked actors.
    for (const auto& a : sc.actors) {
        if (a.stake > 0) {
            sc.consensus.stakes.stakes[a.name] = a.stake;
            sc.consensus.quorum.validators.insert(a.name);
        }
    }
    if (sc.consensus.strategy == ConsensusStrategy::Pos &&
        sc.consensus.stakes.stakes.empty())
        return R::fail(Err::ScenarioParseError, "pos consensus requires staked actors");
    if (sc.consensus.strategy == ConsensusStrategy::Quorum &&
        sc.consensus.quorum.validators.empty())
        return R::fail(Err::ScenarioParseError, "quorum consensus requires staked actors");
    return R::success(std::move(sc));
}

inline Result<Scenario> load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        return Result<Scenario>::fail(Err::ScenarioParseError,
                                      "cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

// Drives one scenario end to end. Stateless helpers aside, all mutation
// flows through the Chain so the persistence file is a faithful record.
class ScenarioRunner {
public:
    explicit ScenarioRunner(Scenario sc,
                            std::optional<std::filesystem::path> persist = std::nullopt)
        : sc_(std::move(sc)), persist_(std::move(persist)) {}

    RunReport run() {
        RunReport report;
        report.scenario_name = sc_.name;
        report.seed = sc_.seed;

        Chain chain(build_genesis(), sc_.consensus);
        if (persist_) chain.open_persistence(*persist_);

        for (const auto& act : sc_.actions) {
            ActionOutcome out;
            out.line_no = act.line_no;
            out.text = act.text;
            if (act.tokens[0] == "expect") {
                out.is_assertion = true;
                out.status = check_expect(chain, act);
                out.passed = out.status.ok();
                ++report.assertions_total;
                if (!out.passed) ++report.assertions_failed;
            } else if (act.tokens[0] == "advance") {
                out.status = do_advance(chain, act, report);
                if (!out.status.ok()) ++report.actions_failed;
            } else {
                out.status = queue_action(chain, act);
                if (!out.status.ok()) ++report.actions_failed;
            }
            report.outcomes.push_back(std::move(out));
        }
        summarize(chain, report);
        return report;
    }

private:
    Scenario sc_;
    std::optional<std::filesystem::path> persist_;
    std::vector<Transaction> pending_;
    std::map<Address, std::uint64_t> nonces_;
    std::map<std::string, Digest> deeds_, sales_, loans_;
    std::map<std::string, Tick> att_clock_;                 // next free tick per symbol
    std::map<std::string, Amount> last_price_;              // runner-side price shadow
    static constexpr const char* kOracleId = "scenario-oracle";

    Address driver_address() const {
        return address_from_name("deedchain:scenario:" + sc_.name);
    }

    Bytes oracle_key() const {
        ByteWriter w;
        w.u64(sc_.seed);
        w.str(sc_.name);
        return w.take();
    }

    ChainState build_genesis() {
        ChainState st;
        st.fee_state.base_fee = sc_.base_fee;
        st.create_token(kGasTokenSymbol);
        for (const auto& sym : sc_.tokens) st.create_token(sym);
        for (const auto& a : sc_.actors) {
            auto addr = address_from_name(a.name);
            if (a.coin > 0) st.tokens[kGasTokenSymbol].mint(addr, a.coin);
            if (a.usds > 0) st.stable.mint(addr, a.usds);
            for (const auto& [sym, amount] : a.token_balances)
                if (amount > 0) st.tokens[sym].mint(addr, amount);
        }
        if (sc_.pool_usds > 0) st.stable.mint(kLendingPoolAddress, sc_.pool_usds);
        st.tokens[kGasTokenSymbol].mint(driver_address(), 1'000'000'000'000);
        st.oracles.register_oracle(kOracleId, oracle_key());
        return st;
    }

    Result<Address> actor(const std::string& name) const {
        if (name == "escrow") return Result<Address>::success(kEscrowAddress);
        if (name == "pool") return Result<Address>::success(kLendingPoolAddress);
        for (const auto& a : sc_.actors)
            if (a.name == name) return Result<Address>::success(address_from_name(name));
        return Result<Address>::fail(Err::ScenarioParseError, "unknown actor '" + name + "'");
    }

    Result<Digest> lookup(const std::map<std::string, Digest>& table,
                          const std::string& name, const char* what) const {
        auto it = table.find(name);
        if (it == table.end())
            return Result<Digest>::fail(Err::ScenarioParseError,
                                        std::string("unknown ") + what + " '" + name + "'");
        return Result<Digest>::success(it->second);
    }

    // Queues a tx and returns the hash of its id (the derived object id).
    Digest enqueue(TxKind kind, const Address& sender, TxPayload payload, Amount tip = 0) {
        Transaction tx;
        tx.kind = kind;
        tx.sender = sender;
        tx.payload = std::move(payload);
        tx.gas_limit = 10'000'000;
        tx.tip = tip;
        tx.nonce = ++nonces_[sender];
        auto derived = sha256(std::span<const std::uint8_t>(tx.id()));
        pending_.push_back(std::move(tx));
        return derived;
    }

    void enqueue_price(const Chain& chain, const std::string& symbol, Amount micro,
                       std::optional<Tick> at = std::nullopt) {
        Tick tick = at.value_or(std::max(att_clock_[symbol], chain.state().tick));
        AttestPayload p;
        p.oracle_id = kOracleId;
        p.kind = "price";
        p.subject_is_asset = true;
        p.subject_asset = symbol;
        p.price_micro = micro;
        p.tick = tick;
        Attestation att;
        att.oracle_id = p.oracle_id;
        att.kind = p.kind;
        att.subject_is_asset = true;
        att.subject_asset = symbol;
        att.price_micro = micro;
        att.tick = tick;
        p.signature = sign_attestation(att, oracle_key());
        enqueue(TxKind::Attest, driver_address(), p);
        att_clock_[symbol] = tick + 1;
        last_price_[symbol] = micro;
    }

    Status queue_action(Chain& chain, const ScenarioStatement& act) {
        using namespace scenario_detail;
        const auto& t = act.tokens;
        auto fail = [](const std::string& why) {
            return Status::fail(Err::ScenarioParseError, why);
        };
        const auto& verb = t[0];

        if (verb == "transfer") {
            if (t.size() != 5) return fail("transfer <from> <to> <symbol> <amount>");
            auto from = actor(t[1]);
            auto to = actor(t[2]);
            auto amt = to_int(t[4]);
            if (!from.ok()) return from.status();
            if (!to.ok()) return to.status();
            if (!amt.ok()) return amt.status();
            enqueue(TxKind::TokenTransfer, *from, TokenTransferPayload{t[3], *to, *amt});
            return Status::okay();
        }
        if (verb == "approve") {
            if (t.size() != 5) return fail("approve <owner> <spender> <symbol> <amount>");
            auto owner = actor(t[1]);
            auto spender = actor(t[2]);
            auto amt = to_int(t[4]);
            if (!owner.ok()) return owner.status();
            if (!spender.ok()) return spender.status();
            if (!amt.ok()) return amt.status();
            enqueue(TxKind::TokenApprove, *owner, TokenApprovePayload{t[3], *spender, *amt});
            return Status::okay();
        }
        if (verb == "stable_mint") {
            if (t.size() != 3) return fail("stable_mint <actor> <fiat-amount>");
            auto who = actor(t[1]);
            auto amt = to_int(t[2]);
            if (!who.ok()) return who.status();
            if (!amt.ok()) return amt.status();
            enqueue(TxKind::StableMint, *who, StableMintPayload{*who, *amt});
            return Status::okay();
        }
        if (verb == "stable_redeem") {
            if (t.size() != 3) return fail("stable_redeem <actor> <amount>");
            auto who = actor(t[1]);
            auto amt = to_int(t[2]);
            if (!who.ok()) return who.status();
            if (!amt.ok()) return amt.status();
            enqueue(TxKind::StableRedeem, *who, StableRedeemPayload{*amt});
            return Status::okay();
        }
        if (verb == "mint_deed") {
            if (t.size() < 3) return fail("mint_deed <actor> <deed-name> sqft=.. ...");
            auto who = actor(t[1]);
            if (!who.ok()) return who.status();
            if (deeds_.count(t[2])) return fail("deed name '" + t[2] + "' already bound");
            DeedMintPayload p;
            if (auto s = opt(t, 3, "sqft")) {
                auto v = to_int(*s);
                if (!v.ok()) return v.status();
                p.square_footage = *v;
            }
            if (auto b = opt(t, 3, "bedrooms")) {
                auto v = to_int(*b);
                if (!v.ok()) return v.status();
                p.bedrooms = *v;
            }
            if (auto r = opt(t, 3, "renovated")) {
                auto d = parse_date(*r);
                if (!d) return fail("bad renovated date");
                p.last_renovation = *d;
            }
            deeds_[t[2]] = enqueue(TxKind::DeedMint, *who, p);
            return Status::okay();
        }
        if (verb == "deed_transfer") {
            if (t.size() != 4) return fail("deed_transfer <from> <deed-name> <to>");
            auto from = actor(t[1]);
            auto deed = lookup(deeds_, t[2], "deed");
            auto to = actor(t[3]);
            if (!from.ok()) return from.status();
            if (!deed.ok()) return deed.status();
            if (!to.ok()) return to.status();
            enqueue(TxKind::DeedTransfer, *from, DeedTransferPayload{*deed, *to});
            return Status::okay();
        }
        if (verb == "attach_covenant") {
            if (t.size() < 4) return fail("attach_covenant <actor> <deed-name> <predicate>");
            auto who = actor(t[1]);
            auto deed = lookup(deeds_, t[2], "deed");
            if (!who.ok()) return who.status();
            if (!deed.ok()) return deed.status();
            auto pred_pos = act.text.find(t[2]);
            auto predicate = trim(act.text.substr(pred_pos + t[2].size()));
            enqueue(TxKind::AttachCovenant, *who, AttachCovenantPayload{*deed, predicate});
            return Status::okay();
        }
        if (verb == "grant_access") {
            if (t.size() != 4) return fail("grant_access <owner> <deed-name> <grantee>");
            auto owner = actor(t[1]);
            auto deed = lookup(deeds_, t[2], "deed");
            auto grantee = actor(t[3]);
            if (!owner.ok()) return owner.status();
            if (!deed.ok()) return deed.status();
            if (!grantee.ok()) return grantee.status();
            enqueue(TxKind::GrantAccess, *owner, GrantAccessPayload{*deed, *grantee});
            return Status::okay();
        }
        if (verb == "list") {
            if (t.size() != 6) return fail("list <actor> <deed-name> <sale-name> <symbol> <price>");
            auto who = actor(t[1]);
            auto deed = lookup(deeds_, t[2], "deed");
            auto price = to_int(t[5]);
            if (!who.ok()) return who.status();
            if (!deed.ok()) return deed.status();
            if (!price.ok()) return price.status();
            if (sales_.count(t[3])) return fail("sale name '" + t[3] + "' already bound");
            sales_[t[3]] = enqueue(TxKind::List, *who, ListPayload{*deed, t[4], *price});
            return Status::okay();
        }
        if (verb == "offer") {
            if (t.size() != 4) return fail("offer <actor> <sale-name> <price>");
            auto who = actor(t[1]);
            auto sale = lookup(sales_, t[2], "sale");
            auto price = to_int(t[3]);
            if (!who.ok()) return who.status();
            if (!sale.ok()) return sale.status();
            if (!price.ok()) return price.status();
            enqueue(TxKind::Offer, *who, OfferPayload{*sale, *price});
            return Status::okay();
        }
        if (verb == "fund" || verb == "settle" || verb == "cancel") {
            if (t.size() != 3) return fail(verb + " <actor> <sale-name>");
            auto who = actor(t[1]);
            auto sale = lookup(sales_, t[2], "sale");
            if (!who.ok()) return who.status();
            if (!sale.ok()) return sale.status();
            if (verb == "fund") enqueue(TxKind::FundEscrow, *who, FundEscrowPayload{*sale});
            else if (verb == "settle") enqueue(TxKind::Settle, *who, SettlePayload{*sale});
            else enqueue(TxKind::Cancel, *who, CancelPayload{*sale});
            return Status::okay();
        }
        if (verb == "attest_docs") {
            if (t.size() != 2) return fail("attest_docs <deed-name>");
            auto deed = lookup(deeds_, t[1], "deed");
            if (!deed.ok()) return deed.status();
            AttestPayload p;
            p.oracle_id = kOracleId;
            p.kind = "legal-docs";
            p.subject_deed = *deed;
            p.doc_digest = sha256(std::string_view{"signed-sale-contract"});
            p.tick = chain.state().tick;
            Attestation att;
            att.oracle_id = p.oracle_id;
            att.kind = p.kind;
            att.subject_deed = p.subject_deed;
            att.doc_digest = p.doc_digest;
            att.tick = p.tick;
            p.signature = sign_attestation(att, oracle_key());
            enqueue(TxKind::Attest, driver_address(), p);
            return Status::okay();
        }
        if (verb == "attest_price") {
            if (t.size() != 3) return fail("attest_price <symbol> <price-micro>");
            auto micro = to_int(t[2]);
            if (!micro.ok()) return micro.status();
            enqueue_price(chain, t[1], *micro);
            return Status::okay();
        }
        if (verb == "open_loan") {
            if (t.size() < 4) return fail("open_loan <actor> <loan-name> <symbol> ...");
            auto who = actor(t[1]);
            if (!who.ok()) return who.status();
            if (loans_.count(t[2])) return fail("loan name '" + t[2] + "' already bound");
            OpenLoanPayload p;
            p.collateral_symbol = t[3];
            auto c = opt(t, 4, "collateral");
            auto b = opt(t, 4, "borrow");
            if (!c || !b) return fail("open_loan needs collateral= and borrow=");
            auto cv = to_int(*c);
            auto bv = to_int(*b);
            if (!cv.ok()) return cv.status();
            if (!bv.ok()) return bv.status();
            p.collateral_amount = *cv;
            p.borrow_amount = *bv;
            if (auto th = opt(t, 4, "threshold_bps")) {
                auto v = to_int(*th);
                if (!v.ok()) return v.status();
                p.liquidation_threshold_bps = static_cast<std::uint32_t>(*v);
            }
            if (auto r = opt(t, 4, "rate_ppb")) {
                auto v = to_int(*r);
                if (!v.ok()) return v.status();
                p.rate_ppb = static_cast<std::uint64_t>(*v);
            }
            loans_[t[2]] = enqueue(TxKind::OpenLoan, *who, p);
            return Status::okay();
        }
        if (verb == "repay") {
            if (t.size() != 4) return fail("repay <actor> <loan-name> <amount>");
            auto who = actor(t[1]);
            auto loan = lookup(loans_, t[2], "loan");
            auto amt = to_int(t[3]);
            if (!who.ok()) return who.status();
            if (!loan.ok()) return loan.status();
            if (!amt.ok()) return amt.status();
            enqueue(TxKind::Repay, *who, RepayPayload{*loan, *amt});
            return Status::okay();
        }
        if (verb == "liquidate") {
            if (t.size() != 3) return fail("liquidate <actor> <loan-name>");
            auto who = actor(t[1]);
            auto loan = lookup(loans_, t[2], "loan");
            if (!who.ok()) return who.status();
            if (!loan.ok()) return loan.status();
            enqueue(TxKind::Liquidate, *who, LiquidatePayload{*loan});
            return Status::okay();
        }
        if (verb == "inject_shock") {
            if (t.size() < 5) return fail("inject_shock <symbol> event=.. period=.. horizon=..");
            const auto& symbol = t[1];
            auto ev = opt(t, 2, "event");
            auto pd = opt(t, 2, "period");
            auto hz = opt(t, 2, "horizon");
            if (!ev || !pd || !hz) return fail("inject_shock needs event=, period=, horizon=");
            auto evv = to_double(*ev);
            auto pdv = to_double(*pd);
            auto hzv = to_int(*hz);
            if (!evv.ok()) return evv.status();
            if (!pdv.ok()) return pdv.status();
            if (!hzv.ok() || *hzv < 2) return fail("bad horizon");
            auto base_it = last_price_.find(symbol);
            if (base_it == last_price_.end())
                return fail("no prior attest_price for '" + symbol + "'");
            auto path = shock_path(static_cast<double>(base_it->second), *evv, *pdv,
                                   static_cast<std::uint64_t>(*hzv));
            if (!path.ok()) return path.status();
            Tick start = std::max(att_clock_[symbol], chain.state().tick + 1);
            for (std::size_t i = 1; i < path->size(); ++i) {
                auto micro = static_cast<Amount>(std::llround((*path)[i]));
                enqueue_price(chain, symbol, micro, start + static_cast<Tick>(i - 1));
            }
            return Status::okay();
        }
        return fail("unknown action '" + verb + "'");
    }

    Status do_advance(Chain& chain, const ScenarioStatement& act, RunReport& report) {
        using namespace scenario_detail;
        if (act.tokens.size() != 2)
            return Status::fail(Err::ScenarioParseError, "advance <ticks>");
        auto n = to_int(act.tokens[1]);
        if (!n.ok() || *n < 1)
            return Status::fail(Err::ScenarioParseError, "advance needs a positive tick count");
        auto miner = driver_address();
        for (std::int64_t i = 0; i < *n; ++i) {
            std::vector<Transaction> txs;
            if (i == 0) txs.swap(pending_);
            auto out = chain.seal_and_append(txs, miner);
            if (!out.ok()) return out.status();
            for (std::size_t k = 0; k < out->size(); ++k) {
                const auto& o = (*out)[k];
                if (!o.status.ok()) {
                    ActionOutcome failed;
                    failed.line_no = act.line_no;
                    failed.text = "  tx " + std::string(tx_kind_name(o.kind)) + " in block " +
                                  std::to_string(chain.height());
                    failed.status = o.status;
                    ++report.actions_failed;
                    report.outcomes.push_back(std::move(failed));
                }
            }
        }
        return Status::okay();
    }

    Status check_expect(const Chain& chain, const ScenarioStatement& act) {
        using namespace scenario_detail;
        const auto& t = act.tokens;
        auto fail = [](const std::string& why) {
            return Status::fail(Err::ScenarioParseError, why);
        };
        if (t.size() < 2) return fail("expect <what> ...");
        const auto& st = chain.state();
        const auto& what = t[1];
        if (what == "owner") {
            if (t.size() != 4) return fail("expect owner <deed-name> <actor>");
            auto deed = lookup(deeds_, t[2], "deed");
            auto who = actor(t[3]);
            if (!deed.ok()) return deed.status();
            if (!who.ok()) return who.status();
            const auto* d = st.deeds.find(*deed);
            if (!d) return Status::fail(Err::UnknownDeed, t[2] + " not on chain");
            if (d->owner != *who)
                return Status::fail(Err::BadState, t[2] + " not owned by " + t[3]);
            return Status::okay();
        }
        if (what == "balance") {
            if (t.size() != 5) return fail("expect balance <actor> <symbol> <amount>");
            auto who = actor(t[2]);
            auto amt = to_int(t[4]);
            if (!who.ok()) return who.status();
            if (!amt.ok()) return amt.status();
            const auto* tok = st.token_for(t[3]);
            if (!tok) return Status::fail(Err::UnknownToken, t[3]);
            auto got = tok->balance(*who);
            if (got != *amt)
                return Status::fail(Err::BadState, t[2] + " holds " + std::to_string(got) +
                                                       " " + t[3] + ", expected " + t[4]);
            return Status::okay();
        }
        if (what == "sale_state") {
            if (t.size() != 4) return fail("expect sale_state <sale-name> <state>");
            auto sale = lookup(sales_, t[2], "sale");
            if (!sale.ok()) return sale.status();
            auto it = st.escrows.find(*sale);
            if (it == st.escrows.end()) return Status::fail(Err::UnknownSale, t[2]);
            if (sale_state_name(it->second.state) != t[3])
                return Status::fail(Err::BadState,
                                    t[2] + " is " +
                                        std::string(sale_state_name(it->second.state)) +
                                        ", expected " + t[3]);
            return Status::okay();
        }
        if (what == "loan_state") {
            if (t.size() != 4) return fail("expect loan_state <loan-name> <state>");
            auto loan = lookup(loans_, t[2], "loan");
            if (!loan.ok()) return loan.status();
            auto it = st.loans.find(*loan);
            if (it == st.loans.end()) return Status::fail(Err::UnknownLoan, t[2]);
            if (loan_state_name(it->second.state) != t[3])
                return Status::fail(Err::BadState,
                                    t[2] + " is " +
                                        std::string(loan_state_name(it->second.state)) +
                                        ", expected " + t[3]);
            return Status::okay();
        }
        if (what == "price") {
            if (t.size() != 4) return fail("expect price <symbol> <micro>");
            auto amt = to_int(t[3]);
            if (!amt.ok()) return amt.status();
            auto p = st.feed.latest(t[2], st.tick, kPriceStalenessBound);
            if (!p.ok()) return p.status();
            if (*p != *amt)
                return Status::fail(Err::BadState, t[2] + " at " + std::to_string(*p) +
                                                       ", expected " + t[3]);
            return Status::okay();
        }
        return fail("unknown expectation '" + what + "'");
    }

    void summarize(const Chain& chain, RunReport& report) {
        const auto& st = chain.state();
        report.summary.push_back("height " + std::to_string(chain.height()));
        report.summary.push_back("tick " + std::to_string(st.tick));
        report.summary.push_back("tip " + to_hex(chain.tip().header.hash()));
        for (const auto& a : sc_.actors) {
            auto addr = address_from_name(a.name);
            std::string line = "actor " + a.name;
            line += " COIN=" + std::to_string(
                st.token_for(kGasTokenSymbol) ?
                st.token_for(kGasTokenSymbol)->balance(addr) : 0);
            line += " USDS=" + std::to_string(st.stable.token.balance(addr));
            for (const auto& sym : sc_.tokens)
                if (const auto* tok = st.token_for(sym))
                    line += " " + sym + "=" + std::to_string(tok->balance(addr));
            report.summary.push_back(std::move(line));
        }
        for (const auto& [name, id] : sales_) {
            auto it = st.escrows.find(id);
            if (it != st.escrows.end())
                report.summary.push_back("sale " + name + " " +
                                         std::string(sale_state_name(it->second.state)));
        }
        for (const auto& [name, id] : loans_) {
            auto it = st.loans.find(id);
            if (it != st.loans.end())
                report.summary.push_back("loan " + name + " " +
                                         std::string(loan_state_name(it->second.state)) +
                                         " debt=" + std::to_string(it->second.debt()));
        }
        for (const auto& [name, id] : deeds_) {
            const auto* d = st.deeds.find(id);
            if (d) report.summary.push_back("deed " + name + " owner=" + to_hex(d->owner));
        }
    }
};

inline RunReport run_scenario(const Scenario& sc,
                              std::optional<std::filesystem::path> persist = std::nullopt) {
    return ScenarioRunner(sc, std::move(persist)).run();
}

// Renders a report as named output files: text -> one readable transcript,
// csv -> one file per table.
inline Result<std::map<std::string, std::string>> render_report(const RunReport& report,
                                                                const std::string& format) {
    using R = Result<std::map<std::string, std::string>>;
    std::map<std::string, std::string> files;
    auto outcome_label = [](const ActionOutcome& o) -> std::string {
        if (o.is_assertion) return o.passed ? "PASS" : "FAIL";
        return o.status.ok() ? "ok" : "ERROR";
    };
    auto outcome_detail = [](const ActionOutcome& o) -> std::string {
        if (o.status.ok()) return {};
        std::string d(err_name(o.status.err));
        if (!o.status.detail.empty()) d += " (" + o.status.detail + ")";
        return d;
    };
    if (format == "text") {
        std::ostringstream out;
        out << "scenario " << report.scenario_name << " seed " << report.seed << "\n";
        for (const auto& o : report.outcomes) {
            out << "  [" << outcome_label(o) << "] line " << o.line_no << ": " << o.text;
            auto d = outcome_detail(o);
            if (!d.empty()) out << " -- " << d;
            out << "\n";
        }
        out << "summary:\n";
        for (const auto& line : report.summary) out << "  " << line << "\n";
        out << "assertions: " << (report.assertions_total - report.assertions_failed)
            << "/" << report.assertions_total << " passed, " << report.actions_failed
            << " failed actions\n";
        files["report.txt"] = out.str();
        return R::success(std::move(files));
    }
    if (format == "csv") {
        std::ostringstream events;
        events << "line,kind,result,detail\n";
        for (const auto& o : report.outcomes) {
            auto d = outcome_detail(o);
            for (auto& c : d)
                if (c == ',' || c == '\n') c = ';';
            events << o.line_no << "," << (o.is_assertion ? "assertion" : "action") << ","
                   << outcome_label(o) << "," << d << "\n";
        }
        files["events.csv"] = events.str();

        std::ostringstream balances;
        balances << "entry\n";
        for (const auto& line : report.summary) {
            auto csv = line;
            for (auto& c : csv)
                if (c == ',') c = ';';
            balances << csv << "\n";
        }
        files["balances.csv"] = balances.str();
        return R::success(std::move(files));
    }
    return R::fail(Err::UnknownFormat, format);
}

}  // namespace deedchain

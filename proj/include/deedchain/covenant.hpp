#pragma once
#include <memory>
#include <string>
#include <vector>

#include "deedchain/bytes.hpp"
#include "deedchain/date.hpp"
#include "deedchain/deed.hpp"
#include "deedchain/errors.hpp"

namespace deedchain {

// Covenant predicates: a tiny total expression language over deed
// metadata, the transfer parties, and the current tick. Prefix
// s-expression syntax, e.g.
//
//   (and (>= (field bedrooms) 2) (!= to @<hex-address>))
//
// Boolean ops: and, or, not, true, false.
// Comparisons: = != < <= > >= over integers; = != over addresses.
// Atoms: integer literals, date literals (YYYY-MM-DD, compared as day
// numbers), (field sqft|bedrooms|renovated), tick, from, to,
// @<64 hex chars> address literals.
// No loops or recursion, so every evaluation terminates.

struct CovenantEnv {
    DeedMetadata meta;
    Address from{};
    Address to{};
    Tick tick = 0;
};

namespace covenant_detail {

enum class IntAtomKind { Literal, FieldSqft, FieldBedrooms, FieldRenovated, TickNow };
enum class AddrAtomKind { Literal, From, To };

struct IntAtom {
    IntAtomKind kind = IntAtomKind::Literal;
    std::int64_t literal = 0;

    std::int64_t eval(const CovenantEnv& env) const {
        switch (kind) {
            case IntAtomKind::Literal: return literal;
            case IntAtomKind::FieldSqft: return env.meta.square_footage;
            case IntAtomKind::FieldBedrooms: return env.meta.bedrooms;
            case IntAtomKind::FieldRenovated: return env.meta.last_renovation;
            case IntAtomKind::TickNow: return static_cast<std::int64_t>(env.tick);
        }
        return 0;
    }
};

struct AddrAtom {
    AddrAtomKind kind = AddrAtomKind::From;
    Address literal{};

    Address eval(const CovenantEnv& env) const {
        switch (kind) {
            case AddrAtomKind::Literal: return literal;
            case AddrAtomKind::From: return env.from;
            case AddrAtomKind::To: return env.to;
        }
        return {};
    }
};

struct Node;
using NodePtr = std::unique_ptr<Node>;

enum class NodeKind {
    True, False, And, Or, Not,
    IntCmp,   // op over two IntAtoms
    AddrCmp,  // = or != over two AddrAtoms
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Node {
    NodeKind kind = NodeKind::True;
    CmpOp cmp = CmpOp::Eq;
    IntAtom int_lhs, int_rhs;
    AddrAtom addr_lhs, addr_rhs;
    NodePtr a, b;

    bool eval(const CovenantEnv& env) const {
        switch (kind) {
            case NodeKind::True: return true;
            case NodeKind::False: return false;
            case NodeKind::And: return a->eval(env) && b->eval(env);
            case NodeKind::Or: return a->eval(env) || b->eval(env);
            case NodeKind::Not: return !a->eval(env);
            case NodeKind::IntCmp: {
                auto l = int_lhs.eval(env), r = int_rhs.eval(env);
                switch (cmp) {
                    case CmpOp::Eq: return l == r;
                    case CmpOp::Ne: return l != r;
                    case CmpOp::Lt: return l < r;
                    case CmpOp::Le: return l <= r;
                    case CmpOp::Gt: return l > r;
                    case CmpOp::Ge: return l >= r;
                }
                return false;
            }
            case NodeKind::AddrCmp: {
                bool eq = addr_lhs.eval(env) == addr_rhs.eval(env);
                return cmp == CmpOp::Eq ? eq : !eq;
            }
        }
        return false;
    }
};

struct Tokenizer {
    std::vector<std::string> tokens;
    std::size_t pos = 0;

    explicit Tokenizer(std::string_view src) {
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        };
        for (char c : src) {
            if (c == '(' || c == ')') {
                flush();
                tokens.push_back(std::string(1, c));
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                flush();
            } else {
                cur.push_back(c);
            }
        }
        flush();
    }

    bool done() const { return pos == tokens.size(); }
    const std::string& peek() const {
        static const std::string empty;
        return done() ? empty : tokens[pos];
    }
    std::string next() { return done() ? std::string() : tokens[pos++]; }
};

class Parser {
public:
    explicit Parser(std::string_view src) : tok_(src) {}

    Result<NodePtr> parse() {
        auto node = expr();
        if (!node.ok()) return node;
        if (!tok_.done())
            return Result<NodePtr>::fail(Err::MalformedPredicate, "trailing tokens");
        return node;
    }

private:
    Tokenizer tok_;

    static Result<NodePtr> bad(std::string why) {
        return Result<NodePtr>::fail(Err::MalformedPredicate, std::move(why));
    }

    Result<NodePtr> expr() {
        auto t = tok_.next();
        if (t == "true") return mk(NodeKind::True);
        if (t == "false") return mk(NodeKind::False);
        if (t != "(") return bad("expected '(' or boolean literal, got '" + t + "'");
        auto op = tok_.next();
        if (op == "and" || op == "or") {
            auto a = expr();
            if (!a.ok()) return a;
            auto b = expr();
            if (!b.ok()) return b;
            if (tok_.next() != ")") return bad("expected ')'");
            auto n = std::make_unique<Node>();
            n->kind = op == "and" ? NodeKind::And : NodeKind::Or;
            n->a = std::move(*a.value);
            n->b = std::move(*b.value);
            return Result<NodePtr>::success(std::move(n));
        }
        if (op == "not") {
            auto a = expr();
            if (!a.ok()) return a;
            if (tok_.next() != ")") return bad("expected ')'");
            auto n = std::make_unique<Node>();
            n->kind = NodeKind::Not;
            n->a = std::move(*a.value);
            return Result<NodePtr>::success(std::move(n));
        }
        CmpOp cmp;
        if (op == "=") cmp = CmpOp::Eq;
        else if (op == "!=") cmp = CmpOp::Ne;
        else if (op == "<") cmp = CmpOp::Lt;
        else if (op == "<=") cmp = CmpOp::Le;
        else if (op == ">") cmp = CmpOp::Gt;
        else if (op == ">=") cmp = CmpOp::Ge;
        else return bad("unknown operator '" + op + "'");

        auto lhs = atom();
        if (!lhs.ok()) return Result<NodePtr>::fail(lhs.err, lhs.detail);
        auto rhs = atom();
        if (!rhs.ok()) return Result<NodePtr>::fail(rhs.err, rhs.detail);
        if (tok_.next() != ")") return bad("expected ')'");

        bool lhs_addr = lhs.value->second, rhs_addr = rhs.value->second;
        if (lhs_addr != rhs_addr) return bad("type mismatch in comparison");
        auto n = std::make_unique<Node>();
        n->cmp = cmp;
        if (lhs_addr) {
            if (cmp != CmpOp::Eq && cmp != CmpOp::Ne)
                return bad("addresses support only = and !=");
            n->kind = NodeKind::AddrCmp;
            n->addr_lhs = lhs.value->first.addr;
            n->addr_rhs = rhs.value->first.addr;
        } else {
            n->kind = NodeKind::IntCmp;
            n->int_lhs = lhs.value->first.i;
            n->int_rhs = rhs.value->first.i;
        }
        return Result<NodePtr>::success(std::move(n));
    }

    struct AtomValue {
        IntAtom i;
        AddrAtom addr;
    };
    // pair.second: true if the atom is address-typed
    Result<std::pair<AtomValue, bool>> atom() {
        using R = Result<std::pair<AtomValue, bool>>;
        auto fail = [](std::string why) { return R::fail(Err::MalformedPredicate, std::move(why)); };
        auto t = tok_.next();
        AtomValue v;
        if (t == "(") {
            if (tok_.next() != "field") return fail("expected 'field'");
            auto name = tok_.next();
            if (name == "sqft") v.i.kind = IntAtomKind::FieldSqft;
            else if (name == "bedrooms") v.i.kind = IntAtomKind::FieldBedrooms;
            else if (name == "renovated") v.i.kind = IntAtomKind::FieldRenovated;
            else return fail("unknown field '" + name + "'");
            if (tok_.next() != ")") return fail("expected ')'");
            return R::success({v, false});
        }
        if (t == "tick") {
            v.i.kind = IntAtomKind::TickNow;
            return R::success({v, false});
        }
        if (t == "from") {
            v.addr.kind = AddrAtomKind::From;
            return R::success({v, true});
        }
        if (t == "to") {
            v.addr.kind = AddrAtomKind::To;
            return R::success({v, true});
        }
        if (!t.empty() && t[0] == '@') {
            auto bytes = from_hex(t.substr(1));
            if (!bytes || bytes->size() != 32) return fail("bad address literal");
            v.addr.kind = AddrAtomKind::Literal;
            std::copy(bytes->begin(), bytes->end(), v.addr.literal.begin());
            return R::success({v, true});
        }
        if (auto day = parse_date(t)) {
            v.i.literal = *day;
            return R::success({v, false});
        }
        // integer literal
        if (t.empty()) return fail("unexpected end of input");
        std::size_t idx = 0;
        try {
            v.i.literal = std::stoll(t, &idx);
        } catch (...) {
            return fail("bad atom '" + t + "'");
        }
        if (idx != t.size()) return fail("bad atom '" + t + "'");
        return R::success({v, false});
    }

    static Result<NodePtr> mk(NodeKind k) {
        auto n = std::make_unique<Node>();
        n->kind = k;
        return Result<NodePtr>::success(std::move(n));
    }
};

}  // namespace covenant_detail

struct Covenant {
    Digest covenant_id{};
    Digest deed_id{};
    std::string predicate_text;  // canonical source, re-parsed on evaluation

    static Status validate(std::string_view text) {
        return covenant_detail::Parser(text).parse().status();
    }

    // Predicates are validated at attach time, so evaluation cannot fail.
    bool eval(const CovenantEnv& env) const {
        auto parsed = covenant_detail::Parser(predicate_text).parse();
        return parsed.ok() && (*parsed.value)->eval(env);
    }
};

}  // namespace deedchain

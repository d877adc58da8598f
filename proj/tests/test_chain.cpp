#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "deedchain/chain.hpp"

using namespace deedchain;
namespace fs = std::filesystem;

namespace {

const Address kAlice = address_from_name("alice");
const Address kBob = address_from_name("bob");
const Address kMiner = address_from_name("miner");

ChainState make_genesis() {
    ChainState st;
    st.fee_state.base_fee = 1;
    st.create_token(kGasTokenSymbol);
    st.tokens[kGasTokenSymbol].mint(kAlice, 1'000'000'000'000);
    st.tokens[kGasTokenSymbol].mint(kBob, 1'000'000'000'000);
    return st;
}

ConsensusConfig pow_config(std::uint32_t bits = 4) {
    ConsensusConfig c;
    c.strategy = ConsensusStrategy::Pow;
    c.work.difficulty_bits = bits;
    return c;
}

struct TxFactory {
    std::map<Address, std::uint64_t> nonces;

    Transaction transfer(const Address& from, const Address& to, Amount amount) {
        Transaction tx;
        tx.kind = TxKind::TokenTransfer;
        tx.sender = from;
        tx.payload = TokenTransferPayload{kGasTokenSymbol, to, amount};
        tx.gas_limit = 100'000;
        tx.nonce = ++nonces[from];
        return tx;
    }
};

fs::path temp_file(const std::string& stem) {
    return fs::temp_directory_path() / (stem + "-" + std::to_string(::getpid()) + ".dcl");
}

// Byte offset of the start of block `index`'s payload inside a chain file.
std::size_t record_payload_offset(const Bytes& file, std::size_t index) {
    std::size_t off = 4;  // magic
    for (std::size_t i = 0; i < index; ++i) {
        std::uint32_t len = (std::uint32_t(file[off]) << 24) |
                            (std::uint32_t(file[off + 1]) << 16) |
                            (std::uint32_t(file[off + 2]) << 8) | file[off + 3];
        off += 4 + len;
    }
    return off + 4;
}

Bytes slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spew(const fs::path& p, const Bytes& data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

}  // namespace

TEST_CASE("genesis commits to the configured state") {
    Chain chain(make_genesis(), pow_config());
    CHECK(chain.height() == 0);
    CHECK(is_zero(chain.tip().header.parent_hash));
    CHECK(chain.tip().header.state_root == make_genesis().state_root());
    CHECK(!chain.validate());
}

TEST_CASE("seal_and_append applies transactions and links blocks") {
    Chain chain(make_genesis(), pow_config());
    TxFactory f;
    auto out = chain.seal_and_append({f.transfer(kAlice, kBob, 500)}, kMiner);
    REQUIRE(out.ok());
    REQUIRE(out->size() == 1);
    CHECK((*out)[0].status.ok());
    CHECK(chain.height() == 1);
    CHECK(chain.tip().header.parent_hash == chain.blocks()[0].header.hash());
    CHECK(chain.state().tokens.at(kGasTokenSymbol).balance(kBob) ==
          1'000'000'000'000 + 500);
    CHECK(!chain.validate());
}

TEST_CASE("append rejects a block with the wrong parent") {
    Chain chain(make_genesis(), pow_config());
    TxFactory f;
    REQUIRE(chain.seal_and_append({f.transfer(kAlice, kBob, 1)}, kMiner).ok());
    Block orphan = chain.tip();
    // parent still points at genesis, so it no longer extends the tip
    CHECK(chain.append_block(orphan).err == Err::BadParent);
}

TEST_CASE("append rejects a wrong state root") {
    Chain chain(make_genesis(), pow_config(0));
    TxFactory f;
    Block block;
    block.header.height = 1;
    block.header.parent_hash = chain.tip().header.hash();
    block.header.base_fee = chain.state().fee_state.base_fee;
    block.txs = {f.transfer(kAlice, kBob, 7)};
    block.header.txs_hash = Block::txs_digest(block.txs);
    block.header.state_root = sha256(std::string_view{"wrong"});
    block.header.proposer = kMiner;
    block.header.seal = SealPow{0};  // difficulty 0: any nonce seals
    CHECK(chain.append_block(block).err == Err::BadStateRoot);
    CHECK(chain.height() == 0);
}

TEST_CASE("pow seal at difficulty 8 verifies and binds the header") {
    Chain chain(make_genesis(), pow_config(8));
    TxFactory f;
    REQUIRE(chain.seal_and_append({f.transfer(kAlice, kBob, 9)}, kMiner).ok());
    const auto& header = chain.tip().header;
    const auto* pow = std::get_if<SealPow>(&header.seal);
    REQUIRE(pow != nullptr);
    WorkParams params;
    params.difficulty_bits = 8;
    CHECK(verify_pow(header.pre_seal_digest(), pow->nonce, params));
    // a header edit invalidates the found nonce
    auto edited = header;
    edited.timestamp += 1;
    CHECK(!verify_pow(edited.pre_seal_digest(), pow->nonce, params));
}

TEST_CASE("ten-block chain validates clean and replays deterministically") {
    Chain a(make_genesis(), pow_config());
    Chain b(make_genesis(), pow_config());
    TxFactory fa, fb;
    for (int i = 1; i <= 10; ++i) {
        auto txa = fa.transfer(kAlice, kBob, 10 * i);
        auto txb = fb.transfer(kAlice, kBob, 10 * i);
        REQUIRE(a.seal_and_append({txa}, kMiner).ok());
        REQUIRE(b.seal_and_append({txb}, kMiner).ok());
    }
    CHECK(!a.validate());
    CHECK(a.tip().header.hash() == b.tip().header.hash());
    CHECK(a.state().canonical_encode() == b.state().canonical_encode());

    // independent replay of a's blocks reaches the same root
    ChainState replay = make_genesis();
    for (std::size_t i = 1; i < a.blocks().size(); ++i) {
        auto outcomes = replay.apply_transactions(a.blocks()[i].txs,
                                                  a.blocks()[i].header.proposer);
        replay.end_block(replay.gas_used(outcomes));
        CHECK(replay.state_root() == a.blocks()[i].header.state_root);
    }
}

TEST_CASE("failed txs are recorded but leave no footprint") {
    Chain chain(make_genesis(), pow_config());
    TxFactory f;
    auto good = f.transfer(kAlice, kBob, 100);
    auto bad = f.transfer(kAlice, kBob, 10'000'000'000'000);  // exceeds balance
    auto out = chain.seal_and_append({good, bad}, kMiner);
    REQUIRE(out.ok());
    CHECK((*out)[0].status.ok());
    CHECK((*out)[1].status.err == Err::BadBalance);
    CHECK((*out)[1].gas_used == 0);
    // the failed tx did not consume the nonce
    auto retry = f.transfer(kAlice, kBob, 1);
    retry.nonce = bad.nonce;
    auto out2 = chain.seal_and_append({retry}, kMiner);
    REQUIRE(out2.ok());
    CHECK((*out2)[0].status.ok());
    CHECK(!chain.validate());
}

TEST_CASE("persistence round trip") {
    auto path = temp_file("roundtrip");
    {
        Chain chain(make_genesis(), pow_config());
        REQUIRE(chain.open_persistence(path).ok());
        TxFactory f;
        for (int i = 1; i <= 5; ++i)
            REQUIRE(chain.seal_and_append({f.transfer(kAlice, kBob, i)}, kMiner).ok());

        auto blocks = Chain::read_chain_file(path);
        REQUIRE(blocks.ok());
        REQUIRE(blocks->size() == 6);
        for (std::size_t i = 0; i < blocks->size(); ++i) {
            CHECK((*blocks)[i].header.hash() == chain.blocks()[i].header.hash());
            CHECK((*blocks)[i].canonical_encode() == chain.blocks()[i].canonical_encode());
        }

        auto loaded = Chain::load(path, make_genesis(), pow_config());
        REQUIRE(loaded.ok());
        CHECK(loaded->tip().header.hash() == chain.tip().header.hash());
        CHECK(loaded->state().canonical_encode() == chain.state().canonical_encode());
        CHECK(!Chain::verify_file(path, make_genesis(), pow_config()));
    }
    fs::remove(path);
}

TEST_CASE("single flipped byte on disk is localized to its block") {
    auto path = temp_file("tamper");
    Chain chain(make_genesis(), pow_config());
    REQUIRE(chain.open_persistence(path).ok());
    TxFactory f;
    for (int i = 1; i <= 5; ++i)
        REQUIRE(chain.seal_and_append({f.transfer(kAlice, kBob, i)}, kMiner).ok());

    auto file = slurp(path);
    // flip a parent-hash byte of block 3 (header: 8-byte height, then parent)
    auto tampered = file;
    tampered[record_payload_offset(file, 3) + 8] ^= 0x01;
    spew(path, tampered);
    auto fault = Chain::verify_file(path, make_genesis(), pow_config());
    REQUIRE(fault.has_value());
    CHECK(fault->height == 3);

    // restore and confirm the evidence disappears
    spew(path, file);
    CHECK(!Chain::verify_file(path, make_genesis(), pow_config()));
    fs::remove(path);
}

TEST_CASE("swapped records are detected at the first displaced block") {
    auto path = temp_file("swap");
    Chain chain(make_genesis(), pow_config());
    REQUIRE(chain.open_persistence(path).ok());
    TxFactory f;
    for (int i = 1; i <= 4; ++i)
        REQUIRE(chain.seal_and_append({f.transfer(kAlice, kBob, i)}, kMiner).ok());

    auto blocks = Chain::read_chain_file(path);
    REQUIRE(blocks.ok());
    std::swap((*blocks)[2], (*blocks)[3]);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(kChainFileMagic, 4);
    for (const auto& b : *blocks) {
        auto bytes = b.canonical_encode();
        std::uint8_t len_be[4];
        auto len = static_cast<std::uint32_t>(bytes.size());
        for (int i = 0; i < 4; ++i)
            len_be[i] = static_cast<std::uint8_t>(len >> (24 - 8 * i));
        out.write(reinterpret_cast<const char*>(len_be), 4);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
    out.close();
    auto fault = Chain::verify_file(path, make_genesis(), pow_config());
    REQUIRE(fault.has_value());
    CHECK(fault->height == 3);  // block at slot 2 carries height 3
    fs::remove(path);
}

TEST_CASE("pos chain seals with the stake-selected proposer") {
    ConsensusConfig cfg;
    cfg.strategy = ConsensusStrategy::Pos;
    cfg.stakes.stakes["val-a"] = 1;
    cfg.stakes.stakes["val-b"] = 3;
    Chain chain(make_genesis(), cfg);
    TxFactory f;
    for (int i = 1; i <= 8; ++i)
        REQUIRE(chain.seal_and_append({f.transfer(kAlice, kBob, i)}, kMiner).ok());
    CHECK(!chain.validate());
    for (std::size_t i = 1; i < chain.blocks().size(); ++i) {
        const auto* pos = std::get_if<SealPos>(&chain.blocks()[i].header.seal);
        REQUIRE(pos != nullptr);
        CHECK(chain.blocks()[i].header.proposer == address_from_name(pos->proposer_id));
    }
    // a forged proposer id fails seal verification
    Block forged = chain.tip();
    CHECK(chain.append_block(forged).err == Err::BadParent);  // sanity: stale parent
}

TEST_CASE("quorum chain accepts full endorsement and rejects a thin seal") {
    ConsensusConfig cfg;
    cfg.strategy = ConsensusStrategy::Quorum;
    cfg.quorum.validators = {"v1", "v2", "v3", "v4", "v5"};
    Chain chain(make_genesis(), cfg);
    TxFactory f;
    REQUIRE(chain.seal_and_append({f.transfer(kAlice, kBob, 5)}, kMiner).ok());
    CHECK(!chain.validate());

    // craft a follow-up block endorsed by too few validators
    ChainState next = chain.state();
    Block thin;
    thin.header.height = chain.height() + 1;
    thin.header.parent_hash = chain.tip().header.hash();
    thin.header.base_fee = chain.state().fee_state.base_fee;
    thin.header.txs_hash = Block::txs_digest({});
    thin.header.proposer = kMiner;
    next.end_block(0);
    thin.header.state_root = next.state_root();
    thin.header.seal = SealQuorum{{"v1", "v2", "v3"}};  // 3/5 < 4/5
    CHECK(chain.append_block(thin).err == Err::BadSeal);
    thin.header.seal = SealQuorum{{"v1", "v2", "v3", "v4"}};
    CHECK(chain.append_block(thin).ok());
    CHECK(!chain.validate());
}

#pragma once
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "deedchain/block.hpp"
#include "deedchain/consensus.hpp"
#include "deedchain/state.hpp"

namespace deedchain {

inline constexpr char kChainFileMagic[4] = {'D', 'C', 'L', '1'};

struct ChainFault {
    std::uint64_t height = 0;
    std::string reason;
};

// Append-only hash-linked ledger. The genesis block commits to the
// configured genesis state; every later block is sealed by the active
// consensus strategy and re-executed on append.
class Chain {
public:
    Chain(ChainState genesis_state, ConsensusConfig consensus)
        : genesis_state_(genesis_state), state_(std::move(genesis_state)),
          consensus_(std::move(consensus)) {
        Block genesis;
        genesis.header.height = 0;
        genesis.header.parent_hash = Digest{};
        genesis.header.state_root = state_.state_root();
        genesis.header.txs_hash = Block::txs_digest({});
        genesis.header.base_fee = state_.fee_state.base_fee;
        genesis.header.timestamp = state_.tick;
        blocks_.push_back(std::move(genesis));
    }

    const ChainState& state() const { return state_; }
    const ChainState& genesis_state() const { return genesis_state_; }
    const ConsensusConfig& consensus() const { return consensus_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& tip() const { return blocks_.back(); }
    std::uint64_t height() const { return tip().header.height; }

    // Builds, seals, and appends a block from the given txs. The miner
    // address is used as proposer for PoW/quorum strategies.
    Result<std::vector<TxOutcome>> seal_and_append(const std::vector<Transaction>& txs,
                                                   const Address& miner) {
        Block block;
        block.header.height = height() + 1;
        block.header.parent_hash = tip().header.hash();
        block.header.base_fee = state_.fee_state.base_fee;
        block.header.timestamp = state_.tick;
        block.txs = txs;
        block.header.txs_hash = Block::txs_digest(txs);

        ChainState next = state_;
        auto outcomes = next.apply_transactions(txs, proposer_address(block, miner));
        next.end_block(next.gas_used(outcomes));
        block.header.state_root = next.state_root();

        auto st = seal(block, miner);
        if (!st.ok()) return Result<std::vector<TxOutcome>>::fail(st.err, st.detail);
        st = append_block(block);
        if (!st.ok()) return Result<std::vector<TxOutcome>>::fail(st.err, st.detail);
        return Result<std::vector<TxOutcome>>::success(std::move(outcomes));
    }

    Status append_block(const Block& block) {
        if (block.header.parent_hash != tip().header.hash())
            return Status::fail(Err::BadParent);
        if (block.header.height != height() + 1)
            return Status::fail(Err::BadParent, "height gap");
        if (block.header.txs_hash != Block::txs_digest(block.txs))
            return Status::fail(Err::BadStateRoot, "txs hash mismatch");
        if (block.header.base_fee != state_.fee_state.base_fee)
            return Status::fail(Err::BadStateRoot, "base fee mismatch");
        auto st = verify_seal(block);
        if (!st.ok()) return st;

        ChainState next = state_;
        auto outcomes = next.apply_transactions(block.txs, block.header.proposer);
        next.end_block(next.gas_used(outcomes));
        if (next.state_root() != block.header.state_root)
            return Status::fail(Err::BadStateRoot);

        state_ = std::move(next);
        blocks_.push_back(block);
        if (persist_) persist_block(blocks_.back());
        return Status::okay();
    }

    // Replays the whole chain from genesis; reports the earliest fault.
    std::optional<ChainFault> validate() const {
        if (blocks_.empty()) return ChainFault{0, "empty chain"};
        const auto& genesis = blocks_.front();
        if (genesis.header.height != 0 || !is_zero(genesis.header.parent_hash))
            return ChainFault{0, "malformed genesis"};
        if (genesis.header.state_root != genesis_state_.state_root())
            return ChainFault{0, "genesis state root mismatch"};

        ChainState replay = genesis_state_;
        for (std::size_t i = 1; i < blocks_.size(); ++i) {
            const auto& block = blocks_[i];
            auto fault = [&](std::string reason) {
                return ChainFault{block.header.height, std::move(reason)};
            };
            if (block.header.height != blocks_[i - 1].header.height + 1)
                return fault("height not parent+1");
            if (block.header.parent_hash != blocks_[i - 1].header.hash())
                return fault("parent hash mismatch");
            if (block.header.txs_hash != Block::txs_digest(block.txs))
                return fault("txs hash mismatch");
            if (block.header.base_fee != replay.fee_state.base_fee)
                return fault("base fee mismatch");
            auto st = verify_seal(block);
            if (!st.ok()) return fault("bad seal: " + std::string(err_name(st.err)));
            auto outcomes = replay.apply_transactions(block.txs, block.header.proposer);
            replay.end_block(replay.gas_used(outcomes));
            if (replay.state_root() != block.header.state_root)
                return fault("state root mismatch");
        }
        return std::nullopt;
    }

    // --- persistence: "DCL1" magic then length-prefixed block records ---

    Status open_persistence(const std::filesystem::path& path) {
        persist_path_ = path;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) return Status::fail(Err::ParseError, "cannot open " + path.string());
        out.write(kChainFileMagic, 4);
        for (const auto& b : blocks_) write_record(out, b);
        out.flush();
        persist_ = true;
        return Status::okay();
    }

    static Result<std::vector<Block>> read_chain_file(const std::filesystem::path& path) {
        using R = Result<std::vector<Block>>;
        std::ifstream in(path, std::ios::binary);
        if (!in) return R::fail(Err::ParseError, "cannot open " + path.string());
        char magic[4];
        if (!in.read(magic, 4) || std::memcmp(magic, kChainFileMagic, 4) != 0)
            return R::fail(Err::ParseError, "bad magic");
        std::vector<Block> blocks;
        while (true) {
            std::uint8_t len_be[4];
            if (!in.read(reinterpret_cast<char*>(len_be), 4)) break;
            std::uint32_t len = (std::uint32_t(len_be[0]) << 24) |
                                (std::uint32_t(len_be[1]) << 16) |
                                (std::uint32_t(len_be[2]) << 8) | len_be[3];
            Bytes buf(len);
            if (!in.read(reinterpret_cast<char*>(buf.data()), len))
                return R::fail(Err::ParseError, "truncated record");
            try {
                blocks.push_back(decode_block(buf));
            } catch (const DecodeError& e) {
                return R::fail(Err::ParseError, e.what());
            }
        }
        return R::success(std::move(blocks));
    }

    // Rebuilds a chain from a persistence file, validating as it goes.
    static Result<Chain> load(const std::filesystem::path& path, ChainState genesis_state,
                              ConsensusConfig consensus) {
        using R = Result<Chain>;
        auto blocks = read_chain_file(path);
        if (!blocks.ok()) return R::fail(blocks.err, blocks.detail);
        if (blocks->empty()) return R::fail(Err::ParseError, "no genesis record");
        Chain chain(std::move(genesis_state), std::move(consensus));
        if (chain.blocks_.front().header.hash() != (*blocks)[0].header.hash())
            return R::fail(Err::BadStateRoot, "genesis mismatch");
        for (std::size_t i = 1; i < blocks->size(); ++i) {
            auto st = chain.append_block((*blocks)[i]);
            if (!st.ok())
                return R::fail(st.err, "block " + std::to_string(i) + ": " + st.detail);
        }
        return R::success(std::move(chain));
    }

    // Validates a persisted file against this chain's genesis/config without
    // building a full Chain; reports the earliest faulty height.
    static std::optional<ChainFault> verify_file(const std::filesystem::path& path,
                                                 const ChainState& genesis_state,
                                                 const ConsensusConfig& consensus) {
        auto blocks = read_chain_file(path);
        if (!blocks.ok()) return ChainFault{0, blocks.detail};
        if (blocks->empty()) return ChainFault{0, "no genesis record"};
        Chain probe(genesis_state, consensus);
        if (probe.blocks_.front().header.hash() != (*blocks)[0].header.hash())
            return ChainFault{0, "genesis mismatch"};
        for (std::size_t i = 1; i < blocks->size(); ++i) {
            auto st = probe.append_block((*blocks)[i]);
            if (!st.ok())
                return ChainFault{(*blocks)[i].header.height,
                                  std::string(err_name(st.err)) +
                                      (st.detail.empty() ? "" : ": " + st.detail)};
        }
        return std::nullopt;
    }

private:
    Address proposer_address(const Block& block, const Address& miner) const {
        if (consensus_.strategy == ConsensusStrategy::Pos) {
            Digest seed = round_seed(block.header.parent_hash, block.header.height);
            auto who = pos_select_proposer(consensus_.stakes, seed);
            if (who.ok()) return address_from_name(*who);
        }
        return miner;
    }

    static Digest round_seed(const Digest& parent_hash, std::uint64_t height) {
        ByteWriter w;
        w.digest(parent_hash);
        w.u64(height);
        return sha256(w.data());
    }

    Status seal(Block& block, const Address& miner) {
        switch (consensus_.strategy) {
            case ConsensusStrategy::Pow:
            case ConsensusStrategy::PowMemory: {
                block.header.proposer = miner;
                auto params = work_params();
                auto nonce = pow_seal(block.header.pre_seal_digest(), params);
                if (!nonce.ok()) return nonce.status();
                block.header.seal = SealPow{*nonce};
                return Status::okay();
            }
            case ConsensusStrategy::Pos: {
                Digest seed = round_seed(block.header.parent_hash, block.header.height);
                auto who = pos_select_proposer(consensus_.stakes, seed);
                if (!who.ok()) return who.status();
                block.header.proposer = address_from_name(*who);
                block.header.seal = SealPos{*who, seed};
                return Status::okay();
            }
            case ConsensusStrategy::Quorum: {
                block.header.proposer = miner;
                SealQuorum q;
                for (const auto& v : consensus_.quorum.validators) q.endorsers.push_back(v);
                block.header.seal = q;
                return Status::okay();
            }
        }
        return Status::fail(Err::BadSeal);
    }

    WorkParams work_params() const {
        WorkParams p = consensus_.work;
        if (consensus_.strategy == ConsensusStrategy::PowMemory)
            p.variant = WorkVariant::MemoryMixed;
        else if (consensus_.strategy == ConsensusStrategy::Pow)
            p.variant = WorkVariant::PlainHash;
        return p;
    }

    Status verify_seal(const Block& block) const {
        switch (consensus_.strategy) {
            case ConsensusStrategy::Pow:
            case ConsensusStrategy::PowMemory: {
                const auto* pow = std::get_if<SealPow>(&block.header.seal);
                if (!pow) return Status::fail(Err::BadSeal, "wrong seal type");
                if (!verify_pow(block.header.pre_seal_digest(), pow->nonce, work_params()))
                    return Status::fail(Err::BadSeal);
                return Status::okay();
            }
            case ConsensusStrategy::Pos: {
                const auto* pos = std::get_if<SealPos>(&block.header.seal);
                if (!pos) return Status::fail(Err::BadSeal, "wrong seal type");
                Digest seed = round_seed(block.header.parent_hash, block.header.height);
                if (pos->seed != seed) return Status::fail(Err::BadSeal, "wrong seed");
                auto who = pos_select_proposer(consensus_.stakes, seed);
                if (!who.ok() || *who != pos->proposer_id)
                    return Status::fail(Err::BadSeal, "wrong proposer");
                if (block.header.proposer != address_from_name(pos->proposer_id))
                    return Status::fail(Err::BadSeal, "proposer address mismatch");
                return Status::okay();
            }
            case ConsensusStrategy::Quorum: {
                const auto* q = std::get_if<SealQuorum>(&block.header.seal);
                if (!q) return Status::fail(Err::BadSeal, "wrong seal type");
                std::set<std::string> seen;
                for (const auto& e : q->endorsers) {
                    if (!consensus_.quorum.validators.count(e))
                        return Status::fail(Err::BadSeal, "unknown endorser");
                    seen.insert(e);
                }
                auto n = static_cast<std::uint64_t>(consensus_.quorum.validators.size());
                if (static_cast<std::uint64_t>(seen.size()) * consensus_.quorum.threshold_den <
                    static_cast<std::uint64_t>(consensus_.quorum.threshold_num) * n)
                    return Status::fail(Err::BadSeal, "below quorum threshold");
                return Status::okay();
            }
        }
        return Status::fail(Err::BadSeal);
    }

    void persist_block(const Block& block) {
        std::ofstream out(persist_path_, std::ios::binary | std::ios::app);
        write_record(out, block);
    }

    static void write_record(std::ofstream& out, const Block& block) {
        auto bytes = block.canonical_encode();
        std::uint8_t len_be[4];
        auto len = static_cast<std::uint32_t>(bytes.size());
        for (int i = 0; i < 4; ++i) len_be[i] = static_cast<std::uint8_t>(len >> (24 - 8 * i));
        out.write(reinterpret_cast<const char*>(len_be), 4);
        out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    }

    ChainState genesis_state_;
    ChainState state_;
    ConsensusConfig consensus_;
    std::vector<Block> blocks_;
    bool persist_ = false;
    std::filesystem::path persist_path_;
};

}  // namespace deedchain

// deedchain: command-line harness tying the ledger, analytics, and
// scenario runner together into reproducible end-to-end runs.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "deedchain/analytics.hpp"
#include "deedchain/chain.hpp"
#include "deedchain/gas.hpp"
#include "deedchain/scenario.hpp"

namespace fs = std::filesystem;
using namespace deedchain;

namespace {

// Key-value config file: one `key = value` per line, '#' comments.
// Recognized keys: data_dir, consensus, difficulty, base_fee.
struct Config {
    std::string data_dir;
    std::string consensus = "pow";
    std::uint32_t difficulty = 8;
    Amount base_fee = 1;
};

Result<Config> load_config(const fs::path& file) {
    using R = Result<Config>;
    Config cfg;
    std::ifstream in(file);
    if (!in) return R::fail(Err::ParseError, "cannot open config " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                return R::fail(Err::ParseError,
                               "config line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key == "data_dir") cfg.data_dir = value;
        else if (key == "consensus") cfg.consensus = value;
        else if (key == "difficulty") cfg.difficulty = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "base_fee") cfg.base_fee = std::stoll(value);
        else
            return R::fail(Err::ParseError,
                           "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return R::success(std::move(cfg));
}

// Data directory resolution: --data-dir flag > DEEDCHAIN_DATA_DIR > config
// > bundled dataset.
fs::path resolve_data_dir(const std::string& flag, const Config& cfg) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("DEEDCHAIN_DATA_DIR")) return env;
    if (!cfg.data_dir.empty()) return cfg.data_dir;
    return fs::path(DEEDCHAIN_SOURCE_DIR) / "data" / "market2022";
}

ChainState default_genesis(const Config& cfg) {
    ChainState st;
    st.fee_state.base_fee = cfg.base_fee;
    st.create_token(kGasTokenSymbol);
    return st;
}

Result<ConsensusConfig> consensus_from(const Config& cfg) {
    using R = Result<ConsensusConfig>;
    ConsensusConfig c;
    auto strat = parse_strategy(cfg.consensus);
    if (!strat.ok()) return R::fail(strat.err, strat.detail);
    c.strategy = *strat;
    c.work.difficulty_bits = cfg.difficulty;
    return R::success(std::move(c));
}

Result<std::vector<PriceSeries>> load_data_dir(const fs::path& dir) {
    using R = Result<std::vector<PriceSeries>>;
    if (!fs::is_directory(dir)) return R::fail(Err::ParseError, "no data dir " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<PriceSeries> out;
    for (const auto& f : files) {
        auto s = load_series(f);
        if (!s.ok()) return R::fail(s.err, f.filename().string() + ": " + s.detail);
        out.push_back(std::move(*s));
    }
    if (out.empty()) return R::fail(Err::EmptySeries, "no csv files in " + dir.string());
    return R::success(std::move(out));
}

int fail_with(const Status& st) {
    std::cerr << "error: " << err_name(st.err);
    if (!st.detail.empty()) std::cerr << ": " << st.detail;
    std::cerr << "\n";
    return 1;
}

template <class T>
int fail_with(const Result<T>& r) {
    return fail_with(Status{r.err, r.detail});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deedchain: tokenized-deed protocol laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key-value config file");

    Config cfg;

    // --- chain ---
    auto* chain_cmd = app.add_subcommand("chain", "ledger persistence operations");
    chain_cmd->require_subcommand(1);
    std::string chain_file = "chain.dcl";
    chain_cmd->add_option("--file", chain_file, "chain persistence file");
    auto* chain_init = chain_cmd->add_subcommand("init", "write a genesis-only chain file");
    auto* chain_show = chain_cmd->add_subcommand("show", "print a block summary");
    auto* chain_verify = chain_cmd->add_subcommand("verify", "replay and verify a chain file");

    // --- scenario ---
    auto* scenario_cmd = app.add_subcommand("scenario", "scripted end-to-end runs");
    auto* scenario_run = scenario_cmd->add_subcommand("run", "run a scenario file");
    std::string scenario_file;
    scenario_run->add_option("file", scenario_file, "scenario script")->required();
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    scenario_run->add_option("--seed", seed_override, "override the scenario seed")
        ->each([&](const std::string&) { seed_given = true; });
    std::string report_format = "text";
    scenario_run->add_option("--format", report_format, "report format: text or csv");
    std::string out_dir;
    scenario_run->add_option("--out", out_dir, "write report files into this directory");
    std::string persist_file;
    scenario_run->add_option("--persist", persist_file, "write the chain file here");

    // --- analyze ---
    auto* analyze = app.add_subcommand("analyze", "market analytics over daily closes");
    analyze->require_subcommand(1);
    std::string data_dir_flag;
    analyze->add_option("--data-dir", data_dir_flag, "directory of <SYMBOL>.csv files");
    auto* an_vol = analyze->add_subcommand("vol", "annualized-free daily volatility table");
    auto* an_corr = analyze->add_subcommand("corr", "pairwise correlation matrix (csv)");
    auto* an_event = analyze->add_subcommand("event", "event-day and window changes");
    std::string event_date;
    an_event->add_option("--event-date", event_date, "single-day event date (YYYY-MM-DD)");
    std::string window;
    an_event->add_option("--window", window, "period boundaries: START,END");

    // --- costs ---
    auto* costs = app.add_subcommand("costs", "transaction-cost comparison");
    auto* costs_cmp = costs->add_subcommand("compare", "commission vs Propy vs protocol");
    double price = 400'000, commission_rate = 0.055, pro_price = 2.99, pgas_unit_cost = 0.0,
           token_price = 0.0001;
    std::uint64_t pro_units = 0, pgas_units = 0, gas_units = 90'000;
    Amount cli_base_fee = 2;
    costs_cmp->add_option("--price", price, "property price (fiat)");
    costs_cmp->add_option("--commission-rate", commission_rate, "agent commission in [0, 0.10]");
    costs_cmp->add_option("--pro-price", pro_price, "PRO token price (fiat)");
    costs_cmp->add_option("--pro-units", pro_units, "PRO tokens consumed");
    costs_cmp->add_option("--pgas-units", pgas_units, "PGAS units consumed");
    costs_cmp->add_option("--pgas-unit-cost", pgas_unit_cost, "fiat cost per PGAS unit");
    costs_cmp->add_option("--gas", gas_units, "protocol gas units");
    costs_cmp->add_option("--base-fee", cli_base_fee, "protocol base fee per gas");
    costs_cmp->add_option("--token-price", token_price, "fiat price of the gas token unit");

    // --- ingest ---
    auto* ingest = app.add_subcommand("ingest", "validate and normalize csv price files");
    std::vector<std::string> ingest_files;
    ingest->add_option("files", ingest_files, "csv files (date,close)")->required();
    std::string ingest_data_dir;
    ingest->add_option("--data-dir", ingest_data_dir, "destination directory");

    CLI11_PARSE(app, argc, argv);

    if (!config_path.empty()) {
        auto loaded = load_config(config_path);
        if (!loaded.ok()) return fail_with(loaded);
        cfg = *loaded;
    }

    if (chain_cmd->parsed()) {
        auto consensus = consensus_from(cfg);
        if (!consensus.ok()) return fail_with(consensus);
        if (chain_init->parsed()) {
            Chain chain(default_genesis(cfg), *consensus);
            auto st = chain.open_persistence(chain_file);
            if (!st.ok()) return fail_with(st);
            std::cout << "initialized " << chain_file << " genesis "
                      << to_hex(chain.tip().header.hash()) << "\n";
            return 0;
        }
        if (chain_show->parsed()) {
            auto blocks = Chain::read_chain_file(chain_file);
            if (!blocks.ok()) return fail_with(blocks);
            for (const auto& b : *blocks) {
                std::cout << "block " << b.header.height << " hash "
                          << to_hex(b.header.hash()) << " txs " << b.txs.size()
                          << " base_fee " << b.header.base_fee << " tick "
                          << b.header.timestamp << "\n";
            }
            return 0;
        }
        if (chain_verify->parsed()) {
            auto fault = Chain::verify_file(chain_file, default_genesis(cfg), *consensus);
            if (fault) {
                std::cerr << "FAULT at height " << fault->height << ": " << fault->reason
                          << "\n";
                return 1;
            }
            std::cout << "ok\n";
            return 0;
        }
    }

    if (scenario_run->parsed()) {
        auto sc = load_scenario(scenario_file);
        if (!sc.ok()) return fail_with(sc);
        if (seed_given) (*sc).seed = seed_override;
        std::optional<fs::path> persist;
        if (!persist_file.empty()) persist = persist_file;
        auto report = run_scenario(*sc, persist);
        auto files = render_report(report, report_format);
        if (!files.ok()) return fail_with(files);
        if (out_dir.empty()) {
            for (const auto& [_, contents] : *files) std::cout << contents;
        } else {
            fs::create_directories(out_dir);
            for (const auto& [name, contents] : *files) {
                std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
                out << contents;
            }
        }
        return report.ok() ? 0 : 1;
    }

    if (analyze->parsed()) {
        auto data = load_data_dir(resolve_data_dir(data_dir_flag, cfg));
        if (!data.ok()) return fail_with(data);

        if (an_vol->parsed()) {
            std::cout << "symbol,daily_vol_pct\n";
            for (const auto& s : *data) {
                auto r = daily_returns(s);
                if (!r.ok()) return fail_with(r);
                auto v = volatility(*r);
                if (!v.ok()) return fail_with(v);
                std::cout << s.symbol << "," << std::fixed << std::setprecision(4)
                          << *v * 100.0 << "\n";
            }
            return 0;
        }
        if (an_corr->parsed()) {
            std::vector<ReturnSeries> rets;
            for (const auto& s : *data) {
                auto r = daily_returns(s);
                if (!r.ok()) return fail_with(r);
                rets.push_back(std::move(*r));
            }
            auto m = correlation_matrix(rets);
            if (!m.ok()) return fail_with(m);
            std::cout << "symbol";
            for (const auto& s : m->symbols) std::cout << "," << s;
            std::cout << "\n";
            for (std::size_t i = 0; i < m->symbols.size(); ++i) {
                std::cout << m->symbols[i];
                for (std::size_t j = 0; j < m->symbols.size(); ++j)
                    std::cout << "," << std::fixed << std::setprecision(4) << m->entries[i][j];
                std::cout << "\n";
            }
            return 0;
        }
        if (an_event->parsed()) {
            if (event_date.empty() && window.empty()) {
                std::cerr << "error: need --event-date and/or --window\n";
                return 1;
            }
            if (!event_date.empty()) {
                auto day = parse_date(event_date);
                if (!day) return fail_with(Status::fail(Err::ParseError, "bad --event-date"));
                std::cout << "symbol,event_delta_pct\n";
                for (const auto& s : *data) {
                    auto d = event_delta(s, *day);
                    if (!d.ok()) return fail_with(d);
                    std::cout << s.symbol << "," << std::showpos << std::fixed
                              << std::setprecision(2) << *d << std::noshowpos << "\n";
                }
            }
            if (!window.empty()) {
                auto comma = window.find(',');
                if (comma == std::string::npos)
                    return fail_with(Status::fail(Err::ParseError, "--window needs START,END"));
                auto start = parse_date(window.substr(0, comma));
                auto end = parse_date(window.substr(comma + 1));
                if (!start || !end)
                    return fail_with(Status::fail(Err::ParseError, "bad --window dates"));
                std::cout << "symbol,period_change_pct\n";
                for (const auto& s : *data) {
                    auto d = period_change(s, *start, *end);
                    if (!d.ok()) return fail_with(d);
                    std::cout << s.symbol << "," << std::showpos << std::fixed
                              << std::setprecision(2) << *d << std::noshowpos << "\n";
                }
            }
            return 0;
        }
    }

    if (costs_cmp->parsed()) {
        PropyParams propy;
        propy.pro_token_price = pro_price;
        propy.pro_units = pro_units;
        propy.pgas_units = pgas_units;
        propy.pgas_unit_cost = pgas_unit_cost;
        auto r = compare_costs(price, commission_rate, propy, gas_units, cli_base_fee,
                               token_price);
        if (!r.ok()) return fail_with(r);
        std::cout << std::fixed << std::setprecision(2);
        std::cout << "commission," << r->commission_cost << "\n";
        std::cout << "propy," << r->propy_cost << "\n";
        std::cout << "protocol," << r->protocol_cost << "\n";
        return 0;
    }

    if (ingest->parsed()) {
        fs::path dest = ingest_data_dir.empty()
                            ? resolve_data_dir(ingest_data_dir, cfg)
                            : fs::path(ingest_data_dir);
        fs::create_directories(dest);
        for (const auto& f : ingest_files) {
            auto s = load_series(f);
            if (!s.ok()) return fail_with(s);
            std::ofstream out(dest / (s->symbol + ".csv"));
            out << "date,close\n";
            out << std::setprecision(17);
            for (const auto& o : s->observations)
                out << format_date(o.date) << "," << o.close << "\n";
            std::cout << "ingested " << s->symbol << ": " << s->observations.size()
                      << " rows\n";
        }
        return 0;
    }

    std::cerr << app.help();
    return 1;
}

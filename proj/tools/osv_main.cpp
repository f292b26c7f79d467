#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "osv/alignment.hpp"
#include "osv/base64.hpp"
#include "osv/entropy.hpp"
#include "osv/errors.hpp"
#include "osv/evaluation.hpp"
#include "osv/framing.hpp"
#include "osv/library_io.hpp"
#include "osv/matcher.hpp"
#include "osv/net.hpp"
#include "osv/synthetic.hpp"
#include "osv/weights.hpp"

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) {
    g_interrupted = 1;
}

std::pair<std::string, std::uint16_t> parse_hostport(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon + 1 >= text.size())
        throw osv::ConfigError("expected HOST:PORT, got '" + text + "'");
    const std::string host = text.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw osv::ConfigError("invalid port in '" + text + "'");
    }
    if (port < 0 || port > 65535)
        throw osv::ConfigError("port out of range in '" + text + "'");
    return {host.empty() ? "0.0.0.0" : host, static_cast<std::uint16_t>(port)};
}

std::vector<std::uint8_t> parse_hex_bytes(const std::string& hex) {
    if (hex.empty() || hex.size() % 2 != 0)
        throw osv::ConfigError("delimiter must be an even-length hex string");
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw osv::ConfigError(std::string("invalid hex digit '") + c + "'");
    };
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
    return out;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split_csv(text))
        out.push_back(std::stod(part));
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw osv::IoError("cannot open output file: " + path);
    out << content;
    if (!out)
        throw osv::IoError("write failed: " + path);
}

struct FramingFlags {
    std::string mode = "len";
    std::string delimiter_hex;
    std::size_t max_bytes = 1 << 20;
    int timeout_ms = 1000;

    osv::FramingSpec build() const {
        osv::FramingSpec f;
        f.mode = osv::framing_mode_from_string(mode);
        if (!delimiter_hex.empty())
            f.delimiter = parse_hex_bytes(delimiter_hex);
        f.max_message_bytes = max_bytes;
        f.response_timeout_ms = timeout_ms;
        f.validate();
        return f;
    }
};

void add_framing_flags(CLI::App* cmd, FramingFlags& flags) {
    cmd->add_option("--framing", flags.mode, "framing mode: conn, len or delim")
        ->check(CLI::IsMember({"conn", "len", "delim"}));
    cmd->add_option("--delimiter", flags.delimiter_hex,
                    "frame delimiter as hex bytes (delim mode)");
    cmd->add_option("--max-bytes", flags.max_bytes, "maximum framed message size");
    cmd->add_option("--timeout-ms", flags.timeout_ms,
                    "response window per request before a no-response record");
}

struct ScoringFlags {
    double identical = 1.0;
    double differing = -1.0;
    double gap = 0.0;

    osv::ScoringParams build() const {
        osv::ScoringParams p{identical, differing, gap};
        p.validate();
        return p;
    }
};

void add_scoring_flags(CLI::App* cmd, ScoringFlags& flags) {
    cmd->add_option("--d-identical", flags.identical, "score for equal octets");
    cmd->add_option("--d-differing", flags.differing, "score for unequal octets");
    cmd->add_option("--d-gap", flags.gap, "gap penalty");
}

osv::ScalerSpec build_scaler(const std::string& kind, double a, double c, double k,
                             double tau) {
    if (kind == "hyper" || kind == "hyperbolic") return osv::ScalerSpec::hyperbolic(a, c);
    if (kind == "exp" || kind == "exponential") return osv::ScalerSpec::exponential(k);
    if (kind == "sigmoid") return osv::ScalerSpec::sigmoid(k, tau);
    if (kind == "thresh" || kind == "threshold") return osv::ScalerSpec::threshold(tau);
    throw osv::ConfigError("unknown scaler: " + kind);
}

int run_server(osv::TcpServer& server, const char* what) {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.start();
    std::fprintf(stderr, "%s listening on port %u (Ctrl-C to stop)\n", what,
                 server.port());
    while (!g_interrupted && !server.fatal_error())
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    if (const auto err = server.fatal_error()) {
        std::fprintf(stderr, "%s stopped: %s\n", what, err->c_str());
        return 2;
    }
    return 0;
}

// Expands `--config FILE` (a flat JSON object whose keys mirror the
// subcommand's long flags) into argv tokens placed before the user's own
// flags, which therefore win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::size_t sub = 0;
    while (sub < args.size() && !args[sub].empty() && args[sub][0] == '-')
        ++sub;
    if (sub >= args.size())
        return args;
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = sub + 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw osv::ConfigError("--config requires a file argument");
            config_path = args[++i];
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty())
        return args;

    std::ifstream in(config_path, std::ios::binary);
    if (!in)
        throw osv::IoError("cannot open config file: " + config_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw osv::ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    if (!j.is_object())
        throw osv::ConfigError("config must be a JSON object of flag values");

    std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub) + 1);
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
        } else if (value.is_string()) {
            out.push_back(flag);
            out.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            out.push_back(flag);
            out.push_back(nlohmann::to_string(value));
        } else {
            throw osv::ConfigError("config key '" + key + "' has an unsupported type");
        }
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"osv: opaque service virtualization toolkit"};
    app.set_version_flag("--version", "osv 1.0.0");
    app.require_subcommand(1);

    auto defaults = [](CLI::App* cmd) {
        cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        std::string dummy;
        cmd->add_option("--config", dummy,
                        "JSON file whose keys mirror this subcommand's flags");
        return cmd;
    };

    // record
    auto* record = defaults(app.add_subcommand(
        "record", "proxy live traffic and capture an interaction library"));
    std::string rec_listen, rec_upstream, rec_out;
    FramingFlags rec_framing;
    record->add_option("--listen", rec_listen, "HOST:PORT to accept clients on")
        ->required();
    record->add_option("--upstream", rec_upstream, "HOST:PORT of the real service")
        ->required();
    record->add_option("--out", rec_out, "interaction library file to append to")
        ->required();
    add_framing_flags(record, rec_framing);

    // weights
    auto* weights = defaults(app.add_subcommand(
        "weights", "derive entropy weights from an interaction library"));
    std::string w_library, w_method, w_scaler = "hyper", w_out;
    double w_a = 1.0, w_c = 10.0, w_k = 10.0, w_tau = 0.5;
    bool w_raw_simpson = false;
    weights->add_option("--library", w_library, "interaction library file")->required();
    weights->add_option("--method", w_method, "shannon, richness or simpson")
        ->required()
        ->check(CLI::IsMember({"shannon", "richness", "simpson"}));
    weights->add_flag("--raw-simpson", w_raw_simpson,
                      "use the unflipped sum-of-squares simpson form");
    weights->add_option("--scaler", w_scaler, "hyper, exp, sigmoid or thresh")
        ->check(CLI::IsMember({"hyper", "exp", "sigmoid", "thresh"}));
    weights->add_option("--a", w_a, "hyperbolic a");
    weights->add_option("--c", w_c, "hyperbolic c");
    weights->add_option("--k", w_k, "exponential/sigmoid k");
    weights->add_option("--tau", w_tau, "sigmoid/threshold tau");
    weights->add_option("--out", w_out, "weights JSON output file")->required();

    // serve
    auto* serve = defaults(app.add_subcommand(
        "serve", "answer live requests from an interaction library"));
    std::string s_listen, s_library, s_strategy = "nw", s_weights;
    FramingFlags s_framing;
    ScoringFlags s_scoring;
    serve->add_option("--listen", s_listen, "HOST:PORT to accept clients on")
        ->required();
    serve->add_option("--library", s_library, "interaction library file")->required();
    serve->add_option("--strategy", s_strategy, "hash, nw or nw-weighted")
        ->check(CLI::IsMember({"hash", "nw", "nw-weighted"}));
    serve->add_option("--weights", s_weights, "weights JSON file (nw-weighted)");
    add_framing_flags(serve, s_framing);
    add_scoring_flags(serve, s_scoring);

    // match
    auto* match = defaults(app.add_subcommand(
        "match", "select a response for one request, offline"));
    std::string m_library, m_req_b64, m_req_file, m_strategy = "nw", m_weights,
                m_candidates;
    ScoringFlags m_scoring;
    match->add_option("--library", m_library, "interaction library file")->required();
    match->add_option("--request-b64", m_req_b64, "request payload, base64");
    match->add_option("--request-file", m_req_file, "file holding the raw request");
    match->add_option("--strategy", m_strategy, "hash, nw or nw-weighted")
        ->check(CLI::IsMember({"hash", "nw", "nw-weighted"}));
    match->add_option("--weights", m_weights, "weights JSON file (nw-weighted)");
    match->add_option("--candidates", m_candidates,
                      "write the per-candidate distance table as CSV");
    add_scoring_flags(match, m_scoring);

    // align
    auto* align_cmd = defaults(app.add_subcommand(
        "align", "align two byte strings and print the gapped pair"));
    std::string a_text, b_text, a_file, b_file;
    ScoringFlags a_scoring;
    align_cmd->add_option("--a", a_text, "first string");
    align_cmd->add_option("--b", b_text, "second string");
    align_cmd->add_option("--a-file", a_file, "file holding the first raw message");
    align_cmd->add_option("--b-file", b_file, "file holding the second raw message");
    add_scoring_flags(align_cmd, a_scoring);

    // generate
    auto* generate = defaults(app.add_subcommand(
        "generate", "emit a synthetic interaction library"));
    std::string g_kind = "directory", g_out;
    std::size_t g_n = 100, g_ops = 2;
    std::uint64_t g_seed = 1;
    generate->add_option("--kind", g_kind, "directory or fixed")
        ->check(CLI::IsMember({"directory", "fixed"}));
    generate->add_option("--n", g_n, "number of interactions");
    generate->add_option("--ops", g_ops, "number of operation types");
    generate->add_option("--seed", g_seed, "generator seed");
    generate->add_option("--out", g_out, "library output file")->required();

    // evaluate
    auto* evaluate_cmd = defaults(app.add_subcommand(
        "evaluate", "cross-validate matching strategies on a dataset"));
    std::string e_dataset, e_protocol, e_strategies = "nw,nw-weighted",
                e_methods = "shannon", e_scaler = "hyper", e_seeds, e_report;
    std::string e_a = "1", e_c = "10", e_sk = "10", e_tau = "0.5";
    std::size_t e_n = 1000, e_ops = 5, e_k = 10, e_repeats = 10;
    std::uint64_t e_gen_seed = 1;
    bool e_raw_simpson = false;
    ScoringFlags e_scoring;
    evaluate_cmd
        ->add_option("--dataset", e_dataset,
                     "gen:directory, gen:fixed, or a library file")
        ->required();
    evaluate_cmd->add_option("--protocol", e_protocol,
                             "decoder for a file dataset: directory or fixed");
    evaluate_cmd->add_option("--n", e_n, "generated interactions");
    evaluate_cmd->add_option("--ops", e_ops, "generated operation types");
    evaluate_cmd->add_option("--gen-seed", e_gen_seed, "generator seed");
    evaluate_cmd->add_option("--strategies", e_strategies,
                             "CSV of hash, nw, nw-weighted");
    evaluate_cmd->add_option("--methods", e_methods,
                             "CSV of entropy methods for nw-weighted");
    evaluate_cmd->add_flag("--raw-simpson", e_raw_simpson,
                           "use the unflipped simpson form");
    evaluate_cmd->add_option("--scaler", e_scaler, "hyper, exp, sigmoid or thresh")
        ->check(CLI::IsMember({"hyper", "exp", "sigmoid", "thresh"}));
    evaluate_cmd->add_option("--a", e_a, "CSV of hyperbolic a values");
    evaluate_cmd->add_option("--c", e_c, "CSV of hyperbolic c values");
    evaluate_cmd->add_option("--sk", e_sk, "CSV of exponential/sigmoid k values");
    evaluate_cmd->add_option("--tau", e_tau, "CSV of sigmoid/threshold tau values");
    evaluate_cmd->add_option("--k", e_k, "fold count");
    evaluate_cmd->add_option("--repeats", e_repeats, "cross-validation repeats");
    evaluate_cmd->add_option("--seeds", e_seeds,
                             "CSV of per-repeat seeds (default 1..repeats)");
    evaluate_cmd->add_option("--report", e_report,
                             "report file; .csv for CSV, anything else JSON");
    add_scoring_flags(evaluate_cmd, e_scoring);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(args);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args)
            cargs.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(cargs.size()), cargs.data());
        } catch (const CLI::ParseError& e) {
            const int rc = app.exit(e);
            return rc == 0 ? 0 : 1;
        }

        if (record->parsed()) {
            const auto [lh, lp] = parse_hostport(rec_listen);
            const auto [uh, up] = parse_hostport(rec_upstream);
            osv::RecordProxy proxy(lh, lp, uh, up, rec_framing.build(), rec_out);
            return run_server(proxy, "record proxy");
        }

        if (weights->parsed()) {
            const auto lib = osv::library_load_file(w_library);
            const auto scaler = build_scaler(w_scaler, w_a, w_c, w_k, w_tau);
            const auto method = osv::entropy_method_from_string(w_method);
            const auto w = osv::derive_weights(lib, method, scaler, w_raw_simpson);
            osv::weights_save_file(w, w_out);
            std::fprintf(stderr, "wrote %zu weights to %s\n", w.length(),
                         w_out.c_str());
            return 0;
        }

        if (serve->parsed() || match->parsed()) {
            const bool serving = serve->parsed();
            const auto lib = osv::library_load_file(serving ? s_library : m_library);
            osv::MatcherConfig cfg;
            cfg.strategy = osv::strategy_from_string(serving ? s_strategy : m_strategy);
            cfg.scoring = (serving ? s_scoring : m_scoring).build();
            const std::string& wpath = serving ? s_weights : m_weights;
            if (!wpath.empty())
                cfg.weights = osv::weights_load_file(wpath);
            if (const auto warning = cfg.check(lib))
                std::fprintf(stderr, "warning: %s\n", warning->c_str());

            if (serving) {
                const auto [lh, lp] = parse_hostport(s_listen);
                osv::EmulatorServer server(lh, lp, lib, cfg, s_framing.build());
                return run_server(server, "emulator");
            }

            osv::Message request;
            if (!m_req_b64.empty() && !m_req_file.empty())
                throw osv::ConfigError(
                    "--request-b64 and --request-file are mutually exclusive");
            if (!m_req_b64.empty()) {
                request = osv::Message(osv::base64::decode(m_req_b64));
            } else if (!m_req_file.empty()) {
                std::ifstream in(m_req_file, std::ios::binary);
                if (!in)
                    throw osv::IoError("cannot open request file: " + m_req_file);
                std::ostringstream buf;
                buf << in.rdbuf();
                request = osv::Message::from_string(buf.str());
            } else {
                throw osv::ConfigError(
                    "one of --request-b64 or --request-file is required");
            }

            const auto result =
                osv::select_response(lib, request, cfg, !m_candidates.empty());
            if (result.report.selected_index)
                std::cout << "index: " << *result.report.selected_index << "\n";
            else
                std::cout << "index: none\n";
            if (result.report.distance)
                std::cout << "distance: " << *result.report.distance << "\n";
            else
                std::cout << "distance: "
                          << (result.report.matched() ? "exact" : "none") << "\n";
            std::cout << "response: " << osv::base64::encode(result.response.bytes)
                      << "\n";
            if (result.no_response)
                std::cout << "no_response: true\n";
            if (!m_candidates.empty()) {
                std::ostringstream csv;
                csv << "index,distance\n";
                for (const auto& [idx, dist] : result.report.per_candidate)
                    csv << idx << ',' << dist << '\n';
                write_text_file(m_candidates, csv.str());
            }
            return 0;
        }

        if (align_cmd->parsed()) {
            auto read_side = [](const std::string& text, const std::string& path,
                                const char* which) {
                if (!text.empty() && !path.empty())
                    throw osv::ConfigError(std::string("--") + which + " and --" +
                                           which + "-file are mutually exclusive");
                if (!path.empty()) {
                    std::ifstream in(path, std::ios::binary);
                    if (!in)
                        throw osv::IoError(std::string("cannot open file: ") + path);
                    std::ostringstream buf;
                    buf << in.rdbuf();
                    return osv::Message::from_string(buf.str());
                }
                return osv::Message::from_string(text);
            };
            const auto ma = read_side(a_text, a_file, "a");
            const auto mb = read_side(b_text, b_file, "b");
            const auto result = osv::align(ma, mb, a_scoring.build());
            std::cout << osv::aligned_to_text(result.aligned_a) << "\n"
                      << osv::aligned_to_text(result.aligned_b) << "\n"
                      << "score: " << result.score << "\n";
            return 0;
        }

        if (generate->parsed()) {
            osv::SyntheticProtocolSpec spec;
            spec.kind = osv::protocol_kind_from_string(g_kind);
            spec.n_interactions = g_n;
            spec.n_operation_types = g_ops;
            spec.seed = g_seed;
            osv::library_save_file(osv::generate_synthetic(spec), g_out);
            std::fprintf(stderr, "wrote %zu interactions to %s\n", g_n, g_out.c_str());
            return 0;
        }

        if (evaluate_cmd->parsed()) {
            osv::InteractionLibrary lib;
            osv::ProtocolKind kind;
            if (e_dataset == "gen:directory" || e_dataset == "gen:fixed") {
                kind = osv::protocol_kind_from_string(e_dataset.substr(4));
                osv::SyntheticProtocolSpec spec;
                spec.kind = kind;
                spec.n_interactions = e_n;
                spec.n_operation_types = e_ops;
                spec.seed = e_gen_seed;
                lib = osv::generate_synthetic(spec);
            } else {
                if (e_protocol.empty())
                    throw osv::ConfigError("--protocol is required for a file dataset");
                kind = osv::protocol_kind_from_string(e_protocol);
                lib = osv::library_load_file(e_dataset);
            }

            osv::EvaluationConfig cfg;
            cfg.k = e_k;
            cfg.repeats = e_repeats;
            if (e_seeds.empty()) {
                for (std::size_t r = 1; r <= e_repeats; ++r)
                    cfg.seeds.push_back(r);
            } else {
                for (const auto& s : split_csv(e_seeds))
                    cfg.seeds.push_back(std::stoull(s));
            }

            std::vector<osv::ScalerSpec> scalers;
            if (e_scaler == "hyper") {
                for (double a : parse_double_list(e_a))
                    for (double c : parse_double_list(e_c))
                        scalers.push_back(osv::ScalerSpec::hyperbolic(a, c));
            } else if (e_scaler == "exp") {
                for (double k : parse_double_list(e_sk))
                    scalers.push_back(osv::ScalerSpec::exponential(k));
            } else if (e_scaler == "sigmoid") {
                for (double k : parse_double_list(e_sk))
                    for (double tau : parse_double_list(e_tau))
                        scalers.push_back(osv::ScalerSpec::sigmoid(k, tau));
            } else {
                for (double tau : parse_double_list(e_tau))
                    scalers.push_back(osv::ScalerSpec::threshold(tau));
            }

            const auto scoring = e_scoring.build();
            for (const auto& name : split_csv(e_strategies)) {
                const auto strategy = osv::strategy_from_string(name);
                if (strategy != osv::Strategy::nw_weighted) {
                    osv::StrategyPoint point;
                    point.strategy = strategy;
                    point.scoring = scoring;
                    cfg.strategies.push_back(point);
                    continue;
                }
                for (const auto& mname : split_csv(e_methods))
                    for (const auto& scaler : scalers) {
                        osv::StrategyPoint point;
                        point.strategy = strategy;
                        point.method = osv::entropy_method_from_string(mname);
                        point.scaler = scaler;
                        point.scoring = scoring;
                        point.raw_simpson = e_raw_simpson;
                        cfg.strategies.push_back(point);
                    }
            }

            const auto report = osv::evaluate(lib, cfg, kind);
            const std::string text =
                e_report.size() >= 4 &&
                        e_report.compare(e_report.size() - 4, 4, ".csv") == 0
                    ? osv::report_to_csv(report)
                    : osv::report_to_json(report);
            if (e_report.empty())
                std::cout << text;
            else
                write_text_file(e_report, text);
            for (const auto& row : report.rows)
                std::fprintf(stderr, "%-48s mean=%.4f sd=%.4f\n",
                             row.point.label().c_str(), row.mean, row.stddev);
            return 0;
        }

        return 0;
    } catch (const osv::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const osv::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const osv::LoadError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

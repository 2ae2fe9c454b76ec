#include <cqlab/characterize.hpp>
#include <cqlab/frontier.hpp>
#include <cqlab/io.hpp>
#include <cqlab/learn.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cqlab;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_negative = 1;
    constexpr int exit_usage = 2;
    constexpr int exit_refused = 3;

    bool json_output = false;

    void diagnostic(const std::string & kind, const std::string & message)
    {
        if (json_output)
            std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
        else
            std::cerr << "error: " << message << "\n";
    }

    void write_frontier_dir(const fs::path & dir, const Frontier & frontier)
    {
        fs::create_directories(dir);
        save_text(dir / "target.struct", encode_structure(frontier.target));
        json manifest;
        manifest["target"] = "target.struct";
        manifest["scope"] = to_string(frontier.scope);
        manifest["method"] = to_string(frontier.method);
        manifest["verification"] = frontier.verification;
        manifest["members"] = json::array();
        for (std::size_t i = 0; i < frontier.members.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "member_%02zu.struct", i);
            save_text(dir / name, encode_structure(frontier.members[i]));
            manifest["members"].push_back(name);
        }
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2) << "\n";
    }

    std::vector<PointedStructure> read_members(const std::vector<std::string> & paths)
    {
        std::vector<PointedStructure> members;
        for (const auto & p : paths) {
            fs::path path(p);
            if (fs::is_directory(path)) {
                std::ifstream in(path / "manifest.json");
                if (in) {
                    json manifest;
                    in >> manifest;
                    for (const auto & name : manifest["members"])
                        members.push_back(load_structure(path / name.get<std::string>()));
                }
                else {
                    std::vector<fs::path> files;
                    for (const auto & entry : fs::directory_iterator(path))
                        if (entry.path().extension() == ".struct"
                            && entry.path().filename() != "target.struct")
                            files.push_back(entry.path());
                    std::sort(files.begin(), files.end());
                    for (const auto & f : files)
                        members.push_back(load_structure(f));
                }
            }
            else
                members.push_back(load_structure(path));
        }
        return members;
    }

    // newline protocol to an external oracle process: structures framed by
    // BEGIN MEMBER/END answered 1 or 0; queries framed by BEGIN EQUIV/END
    // answered YES or a structure framed by BEGIN STRUCTURE/END
    class OracleProcess
    {
    public:
        explicit OracleProcess(const std::string & command)
        {
            int to_child[2], from_child[2];
            if (pipe(to_child) != 0 || pipe(from_child) != 0)
                throw error{"cannot create oracle pipes"};
            pid_ = fork();
            if (pid_ < 0)
                throw error{"cannot fork oracle process"};
            if (pid_ == 0) {
                dup2(to_child[0], STDIN_FILENO);
                dup2(from_child[1], STDOUT_FILENO);
                close(to_child[0]);
                close(to_child[1]);
                close(from_child[0]);
                close(from_child[1]);
                execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
                _exit(127);
            }
            close(to_child[0]);
            close(from_child[1]);
            to_ = fdopen(to_child[1], "w");
            from_ = fdopen(from_child[0], "r");
            if (! to_ || ! from_)
                throw error{"cannot open oracle streams"};
        }

        ~OracleProcess()
        {
            if (to_)
                fclose(to_);
            if (from_)
                fclose(from_);
            if (pid_ > 0)
                waitpid(pid_, nullptr, 0);
        }

        std::string roundtrip(const std::string & header, const std::string & body)
        {
            std::fputs(("BEGIN " + header + "\n").c_str(), to_);
            std::fputs(body.c_str(), to_);
            std::fputs("END\n", to_);
            std::fflush(to_);
            return read_line();
        }

        std::string read_line()
        {
            char buf[4096];
            if (! std::fgets(buf, sizeof buf, from_))
                throw protocol_error{"oracle closed the connection"};
            std::string line(buf);
            while (! line.empty() && (line.back() == '\n' || line.back() == '\r'))
                line.pop_back();
            return line;
        }

        std::string read_until_end()
        {
            std::string body;
            for (;;) {
                auto line = read_line();
                if (line == "END")
                    return body;
                body += line + "\n";
            }
        }

    private:
        pid_t pid_ = -1;
        FILE * to_ = nullptr;
        FILE * from_ = nullptr;
    };
}

int main(int argc, char ** argv)
{
    CLI::App app{"homomorphism frontiers, unique characterizations, and exact learning for conjunctive queries"};
    app.require_subcommand(1);
    app.add_flag("--json", json_output, "machine-readable diagnostics");

    std::string file_a, file_b, out_path, method_name = "marked-pairs", scope_name = "all";
    std::string goal_file, mode_name = "membership", stats_file, oracle_cmd, schema_text;
    std::string cls_name = "all";
    int arity = 0, max_elems = 3, threads = 1;
    bool exhaustive = false;

    auto * hom = app.add_subcommand("hom", "find a homomorphism between two structures");
    hom->add_option("a", file_a)->required();
    hom->add_option("b", file_b)->required();

    auto * core_cmd = app.add_subcommand("core", "compute the core of a structure");
    core_cmd->add_option("a", file_a)->required();
    core_cmd->add_option("-o,--output", out_path);

    auto * classify_cmd = app.add_subcommand("classify", "report structural flags");
    classify_cmd->add_option("a", file_a)->required();

    auto * product_cmd = app.add_subcommand("product", "direct product of two structures");
    product_cmd->add_option("a", file_a)->required();
    product_cmd->add_option("b", file_b)->required();
    product_cmd->add_option("-o,--output", out_path);

    auto * frontier_cmd = app.add_subcommand("frontier", "construct a frontier");
    frontier_cmd->add_option("a", file_a)->required();
    frontier_cmd->add_option("-o,--output", out_path)->required();
    frontier_cmd->add_option("--method", method_name)
        ->check(CLI::IsMember({"marked-pairs", "duality-product", "paper-poly", "tree"}));
    frontier_cmd->add_option("--scope", scope_name)->check(CLI::IsMember({"all", "safe"}));

    auto * verify_cmd = app.add_subcommand("verify-frontier", "check the frontier conditions");
    verify_cmd->add_option("a", file_a)->required();
    std::vector<std::string> member_paths;
    verify_cmd->add_option("members", member_paths, "member files or a frontier directory")->required();
    verify_cmd->add_flag("--exhaustive", exhaustive);
    verify_cmd->add_option("--max-elems", max_elems);
    verify_cmd->add_option("--class", cls_name)
        ->check(CLI::IsMember({"all", "safe", "connected-acyclic-k1"}));
    verify_cmd->add_option("--threads", threads);

    auto * characterize_cmd = app.add_subcommand("characterize", "uniquely characterizing examples");
    characterize_cmd->add_option("q", goal_file)->required();
    characterize_cmd->add_option("-o,--output", out_path)->required();

    auto * learn_cmd = app.add_subcommand("learn", "exact learning with simulated or external oracles");
    learn_cmd->add_option("--goal", goal_file);
    learn_cmd->add_option("--mode", mode_name)
        ->check(CLI::IsMember({"membership", "memb-equiv", "enumerate"}));
    learn_cmd->add_option("--stats", stats_file);
    learn_cmd->add_option("--oracle-cmd", oracle_cmd);
    learn_cmd->add_option("--schema", schema_text);
    learn_cmd->add_option("--arity", arity);
    learn_cmd->add_option("-o,--output", out_path);

    auto * eval_cmd = app.add_subcommand("eval", "evaluate a query on a structure");
    eval_cmd->add_option("q", goal_file)->required();
    eval_cmd->add_option("a", file_a)->required();

    auto * contains_cmd = app.add_subcommand("contains", "query containment q1 <= q2");
    contains_cmd->add_option("q1", file_a)->required();
    contains_cmd->add_option("q2", file_b)->required();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError & e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        return exit_usage;
    }

    try {
        if (hom->parsed()) {
            auto a = load_structure(file_a), b = load_structure(file_b);
            auto h = find_homomorphism(a, b);
            if (! h)
                return exit_negative;
            for (const auto & [from, to] : h->assignment)
                std::cout << from << " -> " << to << "\n";
            return exit_ok;
        }

        if (core_cmd->parsed()) {
            auto result = compute_core(load_structure(file_a));
            auto text = encode_structure(result.core);
            if (out_path.empty())
                std::cout << text;
            else
                save_text(out_path, text);
            return exit_ok;
        }

        if (classify_cmd->parsed()) {
            auto flags = load_structure(file_a).flags();
            if (json_output)
                std::cout << json{{"c_acyclic", flags.c_acyclic},
                                  {"c_connected", flags.c_connected},
                                  {"acyclic", flags.acyclic},
                                  {"safe", flags.safe},
                                  {"unp", flags.unp}}.dump(2)
                          << "\n";
            else
                std::cout << "c_acyclic: " << (flags.c_acyclic ? "yes" : "no") << "\n"
                          << "c_connected: " << (flags.c_connected ? "yes" : "no") << "\n"
                          << "acyclic: " << (flags.acyclic ? "yes" : "no") << "\n"
                          << "safe: " << (flags.safe ? "yes" : "no") << "\n"
                          << "unp: " << (flags.unp ? "yes" : "no") << "\n";
            return exit_ok;
        }

        if (product_cmd->parsed()) {
            auto p = direct_product(load_structure(file_a), load_structure(file_b));
            auto text = encode_structure(p);
            if (out_path.empty())
                std::cout << text;
            else
                save_text(out_path, text);
            return exit_ok;
        }

        if (frontier_cmd->parsed()) {
            auto a = load_structure(file_a);
            auto method = *frontier_method_from_string(method_name);
            FrontierOptions fopts;
            fopts.augment_unsafe = scope_name == "all";
            auto frontier = method == FrontierMethod::tree ? frontier_tree(a, fopts)
                                                           : frontier_c_acyclic(a, method, fopts);
            write_frontier_dir(out_path, frontier);
            std::cout << frontier.members.size() << " members written to " << out_path << "\n";
            return exit_ok;
        }

        if (verify_cmd->parsed()) {
            auto a = load_structure(file_a);
            auto members = read_members(member_paths);
            VerifyOptions vopts;
            vopts.mode = exhaustive ? VerifyMode::exhaustive : VerifyMode::structural;
            vopts.max_elems = max_elems;
            vopts.threads = threads;
            if (cls_name == "safe")
                vopts.cls = CandidateClass::safe;
            else if (cls_name == "connected-acyclic-k1")
                vopts.cls = CandidateClass::connected_acyclic_k1;
            auto verdict = verify_frontier(a, members, vopts);
            if (json_output) {
                json out{{"accepted", verdict.accepted}, {"reason", verdict.reason},
                         {"violated", verdict.violated}};
                if (verdict.witness)
                    out["witness"] = encode_structure(*verdict.witness);
                std::cout << out.dump(2) << "\n";
            }
            else {
                std::cout << (verdict.accepted ? "accepted" : "rejected") << ": "
                          << verdict.reason << "\n";
                if (verdict.witness)
                    std::cout << "witness:\n" << encode_structure(*verdict.witness);
            }
            return verdict.accepted ? exit_ok : exit_negative;
        }

        if (characterize_cmd->parsed()) {
            auto q = load_cq(goal_file);
            auto examples = characterizing_examples(q);
            fs::path dir(out_path);
            fs::create_directories(dir / "positive");
            fs::create_directories(dir / "negative");
            save_text(dir / "query.cq", encode_cq(q));
            json manifest;
            manifest["query"] = "query.cq";
            manifest["positives"] = json::array();
            manifest["negatives"] = json::array();
            for (std::size_t i = 0; i < examples.positives.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "positive/pos_%02zu.struct", i);
                save_text(dir / name, encode_structure(examples.positives[i]));
                manifest["positives"].push_back(name);
            }
            for (std::size_t i = 0; i < examples.negatives.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "negative/neg_%02zu.struct", i);
                save_text(dir / name, encode_structure(examples.negatives[i]));
                manifest["negatives"].push_back(name);
            }
            std::ofstream out(dir / "manifest.json");
            out << manifest.dump(2) << "\n";
            std::cout << examples.positives.size() << " positive, " << examples.negatives.size()
                      << " negative examples written to " << out_path << "\n";
            return exit_ok;
        }

        if (learn_cmd->parsed()) {
            auto started = std::chrono::steady_clock::now();
            LearnReport report = [&] {
                if (! oracle_cmd.empty()) {
                    if (schema_text.empty())
                        throw error{"--oracle-cmd requires --schema"};
                    auto schema = Schema::parse(schema_text);
                    OracleProcess process(oracle_cmd);
                    MembershipOracle membership([&](const PointedStructure & s) {
                        auto reply = process.roundtrip("MEMBER", encode_structure(s));
                        if (reply == "1")
                            return true;
                        if (reply == "0")
                            return false;
                        throw protocol_error{"oracle replied '" + reply + "' to a membership query"};
                    });
                    if (mode_name == "membership")
                        return learn_membership(membership, schema, arity);
                    EquivalenceOracle equivalence([&](const ConjunctiveQuery & q) {
                        auto reply = process.roundtrip("EQUIV", encode_cq(q));
                        if (reply == "YES")
                            return EquivalenceAnswer{true, std::nullopt};
                        if (reply == "BEGIN STRUCTURE")
                            return EquivalenceAnswer{false, parse_structure(process.read_until_end())};
                        throw protocol_error{"oracle replied '" + reply + "' to an equivalence query"};
                    });
                    return learn_membership_equivalence(membership, equivalence, schema, arity);
                }
                if (goal_file.empty())
                    throw error{"learn needs --goal or --oracle-cmd"};
                auto goal = load_cq(goal_file);
                auto membership = make_membership_oracle(goal);
                if (mode_name == "membership")
                    return learn_membership(membership, goal.schema(), goal.k());
                if (mode_name == "enumerate")
                    return learn_by_enumeration(membership, goal.schema(), goal.k(),
                                                int(goal.atoms().size()));
                auto equivalence = make_equivalence_oracle(goal);
                return learn_membership_equivalence(membership, equivalence, goal.schema(),
                                                    goal.k());
            }();
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - started)
                               .count();

            auto learned_text = encode_cq(report.learned);
            if (out_path.empty())
                std::cout << learned_text;
            else
                save_text(out_path, learned_text);
            if (! stats_file.empty()) {
                json stats{{"command", "learn"},
                           {"membership_queries", report.membership_calls},
                           {"equivalence_queries", report.equivalence_calls},
                           {"iterations", report.iterations},
                           {"wall_time_ms", elapsed},
                           {"verdict", "ok"}};
                save_text(stats_file, stats.dump(2) + "\n");
            }
            return exit_ok;
        }

        if (eval_cmd->parsed()) {
            auto q = load_cq(goal_file);
            auto a = load_structure(file_a);
            auto result = evaluate(q, a);
            for (const auto & tuple : result) {
                for (std::size_t i = 0; i < tuple.size(); ++i)
                    std::cout << (i ? "," : "") << tuple[i];
                std::cout << "\n";
            }
            if (q.k() == 0)
                std::cout << (result.empty() ? "false" : "true") << "\n";
            return result.empty() ? exit_negative : exit_ok;
        }

        if (contains_cmd->parsed()) {
            bool yes = contains(load_cq(file_a), load_cq(file_b));
            std::cout << (yes ? "yes" : "no") << "\n";
            return yes ? exit_ok : exit_negative;
        }
    }
    catch (const parse_error & e) {
        diagnostic("parse", e.what());
        return exit_usage;
    }
    catch (const size_limit_error & e) {
        diagnostic("size-limit", e.what());
        return exit_refused;
    }
    catch (const error & e) {
        diagnostic("error", e.what());
        return exit_usage;
    }

    return exit_usage;
}

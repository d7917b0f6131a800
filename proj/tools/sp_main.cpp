#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sp/io.hpp"

namespace {

struct EngineFlags {
    int capacity = 10000;
    int max_gap_new = -1;
    int max_gap_old = -1;
    int window = 0;
    bool brackets = true;
    std::string format = "text";
};

void add_engine_flags(CLI::App* sub, spcli::SessionConfig& cfg, EngineFlags& f) {
    sub->add_option("--cost-factor", cfg.cost_factor,
                    "Multiplier on the code size of New symbols (default 2, or 10 for learn)");
    sub->add_option("--capacity", f.capacity, "Hit-structure leaf capacity")->capture_default_str();
    sub->add_option("--driving-quota", cfg.engine.driving_quota, "Driving alignments per New symbol")
        ->capture_default_str();
    sub->add_option("--target-quota", cfg.engine.target_quota, "Retained alignments per New symbol")
        ->capture_default_str();
    sub->add_option("--window", f.window, "Process New in windows of this many symbols (0 = whole pattern)")
        ->capture_default_str();
    sub->add_option("--max-unsupported-cycles", cfg.engine.max_unsupported_cycles,
                    "Stop after this many cycles without a better alignment")
        ->capture_default_str();
    sub->add_option("--max-cycles", cfg.engine.max_cycles, "Hard limit on search cycles")->capture_default_str();
    sub->add_option("--max-gap-new", f.max_gap_new, "Largest gap between hits in the driving pattern (-1 = none)")
        ->capture_default_str();
    sub->add_option("--max-gap-old", f.max_gap_old, "Largest gap between hits in the target pattern (-1 = none)")
        ->capture_default_str();
    sub->add_flag("--id-c-only", cfg.engine.match.id_c_only, "Only allow hits between an ID- and a C-symbol");
    sub->add_flag("--brackets-strict,!--no-brackets-strict", f.brackets,
                  "Reject alignments whose bracket symbols are misaligned")
        ->capture_default_str();
    sub->add_flag("--sfe-integer", cfg.coding.sfe_integer, "Round code sizes up to whole bits");
    sub->add_option("--top-k", cfg.top_k, "Number of alignments or grammars to print")->capture_default_str();
    sub->add_option("--threads", cfg.engine.threads, "Worker threads for matching")->capture_default_str();
    sub->add_option("--format", f.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
}

void apply(spcli::SessionConfig& cfg, const EngineFlags& f) {
    cfg.engine.match.capacity = static_cast<std::size_t>(f.capacity);
    if (f.max_gap_new >= 0) cfg.engine.match.max_gap_driving = f.max_gap_new;
    if (f.max_gap_old >= 0) cfg.engine.match.max_gap_target = f.max_gap_old;
    if (f.window > 0) cfg.engine.window_size = f.window;
    cfg.engine.legality.brackets = f.brackets;
    cfg.format = f.format == "json" ? spcli::Format::json : spcli::Format::text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiple alignment, probabilistic inference and grammar learning with SP patterns"};
    app.require_subcommand(1);
    spcli::SessionConfig cfg;
    EngineFlags flags;
    std::string old_file, new_file, code, out_dir;

    auto* align = app.add_subcommand("align", "Print the best alignments of each New pattern against Old");
    align->add_option("old", old_file, "Grammar file (Old)")->required()->check(CLI::ExistingFile);
    align->add_option("new", new_file, "Pattern file (New)")->required()->check(CLI::ExistingFile);
    add_engine_flags(align, cfg, flags);

    auto* probs = app.add_subcommand("probs", "Alignment, pattern and symbol probabilities for each New pattern");
    probs->add_option("old", old_file, "Grammar file (Old)")->required()->check(CLI::ExistingFile);
    probs->add_option("new", new_file, "Pattern file (New)")->required()->check(CLI::ExistingFile);
    add_engine_flags(probs, cfg, flags);

    auto* prod = app.add_subcommand("produce", "Regenerate the surface pattern from a code");
    prod->add_option("old", old_file, "Grammar file (Old)")->required()->check(CLI::ExistingFile);
    prod->add_option("code", code, "Code symbols, e.g. \"S 0 1 0 1 0 #S\"")->required();
    add_engine_flags(prod, cfg, flags);

    auto* learn = app.add_subcommand("learn", "Learn grammars from a corpus of New patterns");
    learn->add_option("corpus", new_file, "Corpus file, one New pattern per line")->required()->check(CLI::ExistingFile);
    learn->add_option("--out", out_dir, "Directory for grammar_N.sp and curve.csv");
    learn->add_option("--prune-width", cfg.prune_width, "Alternative grammars kept after each New pattern")
        ->capture_default_str();
    learn->add_option("--derive-top", cfg.derive_top, "Alignments per New pattern used to derive patterns")
        ->capture_default_str();
    learn->add_option("--provisional-bits", cfg.provisional_bits, "Code size of generated symbols while learning")
        ->capture_default_str();
    add_engine_flags(learn, cfg, flags);

    spcli::DiagnoseOptions dopt;
    auto* diag = app.add_subcommand("diagnose", "Interactive diagnosis over a decision network");
    diag->add_option("old", old_file, "Decision network (Old)")->required()->check(CLI::ExistingFile);
    diag->add_option("--nodes", dopt.nodes_file, "Node texts, one \"id text\" per line")->check(CLI::ExistingFile);
    diag->add_option("--script", dopt.script_file, "Answers file instead of standard input")
        ->check(CLI::ExistingFile);
    diag->add_option("--start", dopt.start, "Symbol that starts the session")->capture_default_str();
    add_engine_flags(diag, cfg, flags);

    spcli::OracleOptions oopt;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive best alignment for a small instance");
    oracle->add_option("old", old_file, "Grammar file (Old)")->check(CLI::ExistingFile);
    oracle->add_option("new", new_file, "Pattern file (New)")->check(CLI::ExistingFile);
    oracle->add_flag("--compare", oopt.compare, "Also run the engine and compare the best CD");
    oracle->add_option("--random", oopt.random, "Compare engine and oracle on N random instances");
    oracle->add_option("--seed", cfg.seed, "Seed for --random")->capture_default_str();
    oracle->add_option("--max-new", oopt.limits.max_new, "Largest New pattern")->capture_default_str();
    oracle->add_option("--max-patterns", oopt.limits.max_patterns, "Most Old patterns")->capture_default_str();
    oracle->add_option("--max-pattern-size", oopt.limits.max_pattern_size, "Largest Old pattern")
        ->capture_default_str();
    oracle->add_option("--max-appearances", oopt.limits.max_appearances, "Appearances of each Old pattern")
        ->capture_default_str();
    add_engine_flags(oracle, cfg, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    apply(cfg, flags);

    try {
        if (*align) return spcli::cmd_align(old_file, new_file, cfg, std::cout);
        if (*probs) return spcli::cmd_probs(old_file, new_file, cfg, std::cout);
        if (*prod) return spcli::cmd_produce(old_file, code, cfg, std::cout, std::cerr);
        if (*learn) return spcli::cmd_learn(new_file, out_dir, cfg, std::cout);
        if (*diag) return spcli::cmd_diagnose(old_file, dopt, cfg, std::cin, std::cout);
        if (*oracle) return spcli::cmd_oracle(old_file, new_file, oopt, cfg, std::cout);
    } catch (const spcli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sp::ParseError& e) {
        std::cerr << "parse error at line " << e.line << ", column " << e.column << ": " << e.what() << "\n";
        return 2;
    } catch (const sp::ValidationError& e) {
        std::cerr << "invalid pattern: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}

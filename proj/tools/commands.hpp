#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "sp/coding.hpp"
#include "sp/learn.hpp"
#include "sp/oracle.hpp"
#include "sp/search.hpp"

namespace spcli {

enum class Format { text, json };

struct SessionConfig {
    sp::EngineConfig engine;
    sp::CodingOptions coding;
    std::optional<double> cost_factor;  // unset: 2 for parsing, 10 for learning
    Format format = Format::text;
    int top_k = 3;
    int prune_width = 20;
    int derive_top = 3;
    double provisional_bits = 10.0;
    std::uint64_t seed = 1;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int cmd_align(const std::string& old_file, const std::string& new_file, const SessionConfig& cfg,
              std::ostream& out);
int cmd_probs(const std::string& old_file, const std::string& new_file, const SessionConfig& cfg,
              std::ostream& out);
int cmd_produce(const std::string& old_file, const std::string& code, const SessionConfig& cfg,
                std::ostream& out, std::ostream& err);
int cmd_learn(const std::string& corpus_file, const std::string& out_dir, const SessionConfig& cfg,
              std::ostream& out);

struct DiagnoseOptions {
    std::string nodes_file;
    std::string script_file;
    std::string start = "Start";
};
int cmd_diagnose(const std::string& old_file, const DiagnoseOptions& opt, const SessionConfig& cfg,
                 std::istream& in, std::ostream& out);

struct OracleOptions {
    sp::OracleLimits limits;
    bool compare = false;
    int random = 0;
};
int cmd_oracle(const std::string& old_file, const std::string& new_file, const OracleOptions& opt,
               const SessionConfig& cfg, std::ostream& out);

}  // namespace spcli
